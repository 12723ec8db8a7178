#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "predsnell/errors.hpp"
#include "predsnell/snell.hpp"

// Discrete Mertens decomposition of the predictable value system:
//
//   V_p(t) = M_t - A_t - C_{t-1},   C_{-1} = 0,
//   dC_t = V_p(t) - V_p+(t) >= 0   (the predictable projection of the right
//                                   limit is exactly V_p+ on this grid),
//   A == 0                         (left jumps need strict left limits, which
//                                   have no slot on this grid; the field stays
//                                   in the data model regardless),
//   M_t = V_p(t) + C_{t-1}         is a martingale for the pre sigma-algebras.
//
// Increments are stored as nonnegative magnitudes; the inequality
// V_p+(t) <= V_p(t) fixes their sign. C only grows on the contact set
// {V_p(t) = phi_t}.

namespace predsnell {

struct MertensDecomposition {
  std::vector<RandomVar> m;        // M_0..M_N
  std::vector<RandomVar> a;       // A_0..A_N, identically zero on this grid
  std::vector<RandomVar> c;       // C_{-1}..C_N, shifted: c[k] holds C_{k-1}
  std::vector<RandomVar> delta_c;  // dC_0..dC_N
  std::vector<OutcomeSet> contact;  // {V_p(t) = phi_t} per time

  int horizon() const { return static_cast<int>(m.size()) - 1; }

  /// C_t for t in [-1, N].
  const RandomVar& c_at(int t) const {
    return c[static_cast<std::size_t>(t + 1)];
  }
};

inline MertensDecomposition decompose(const ValueSystem& vs) {
  const Instance& inst = vs.source;
  const int N = inst.filt.horizon;
  const std::size_t n = inst.space.size();

  MertensDecomposition d;
  d.c.push_back(RandomVar(n, Rational(0)));  // C_{-1}
  for (int t = 0; t <= N; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const RandomVar dc = vs.v[ut] - vs.v_plus[ut];
    for (std::size_t i = 0; i < n; ++i)
      detail::internal_check(dc[i] >= 0, "compensator increment negative");
    detail::internal_check(is_measurable(dc, inst.filt.pre[t]),
                           "dC_t not measurable for pre[t]");
    d.delta_c.push_back(dc);
    d.c.push_back(d.c.back() + dc);
    d.m.push_back(vs.v[ut] + d.c_at(t - 1));
    d.a.push_back(RandomVar(n, Rational(0)));
    d.contact.push_back(where_equal(vs.v[ut], inst.reward.at(t)));
  }

  for (int t = 0; t <= N; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    detail::internal_check(vs.v[ut] == d.m[ut] - d.a[ut] - d.c_at(t - 1),
                           "reconstruction identity broken");
    if (t < N)
      detail::internal_check(
          condexp(d.m[ut + 1], inst.filt.pre[t], inst.space) == d.m[ut],
          "martingale part fails one-step martingality");
  }
  return d;
}

/// dC_t must vanish wherever the value is strictly above the reward.
inline CheckReport flat_off_contact_check(const MertensDecomposition& d) {
  for (int t = 0; t <= d.horizon(); ++t) {
    const auto ut = static_cast<std::size_t>(t);
    for (std::size_t i = 0; i < d.delta_c[ut].size(); ++i)
      if (!d.contact[ut].contains(i) && d.delta_c[ut][i] != 0)
        return {false, "compensator grows off the contact set at t=" +
                           std::to_string(t) + ", outcome index " +
                           std::to_string(i)};
  }
  return {};
}

/// No compensator growth on [S, tau): C_{tau-1} = C_{S-1} pointwise.
inline CheckReport flat_before(const MertensDecomposition& d,
                               const StoppingTime& tau,
                               const StoppingTime& s) {
  detail::require(leq_pointwise(s, tau), "flat_before requires S <= tau");
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const Rational& at_tau = d.c_at(tau[i] - 1)[i];
    const Rational& at_s = d.c_at(s[i] - 1)[i];
    if (at_tau != at_s)
      return {false, "compensator grows on [S, tau) at outcome index " +
                         std::to_string(i) + ": C_{tau-1}=" + to_string(at_tau) +
                         " vs C_{S-1}=" + to_string(at_s)};
  }
  return {};
}

}  // namespace predsnell
