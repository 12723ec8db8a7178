#pragma once

#include <string>
#include <vector>

#include "predsnell/errors.hpp"
#include "predsnell/space.hpp"
#include "predsnell/stopping.hpp"

// Admissible predictable reward families. The family is process-backed:
// phi(tau)(w) := phi_{tau(w)}(w), so consistency on {tau = tau'} holds by
// construction and the only admissibility condition to validate is that each
// phi_t is measurable for pre[t].

namespace predsnell {

struct RewardFamily {
  std::vector<RandomVar> per_time;  // phi_0..phi_N

  int horizon() const { return static_cast<int>(per_time.size()) - 1; }
  const RandomVar& at(int t) const {
    return per_time[static_cast<std::size_t>(t)];
  }
};

/// Everything needed to pose one stopping problem.
struct Instance {
  SampleSpace space;
  TwoSlotFiltration filt;
  RewardFamily reward;
};

/// Admissibility: phi_t constant on every block of pre[t], values
/// nonnegative. Reports every offending (t, block) pair; when measurability
/// fails, the issue also names the witness time tau == t that exhibits a
/// reward not measurable for its pre sigma-algebra.
inline ValidationReport validate_admissible(const RewardFamily& fam,
                                            const TwoSlotFiltration& filt,
                                            const SampleSpace& space) {
  ValidationReport rep;
  const std::size_t n = filt.n_outcomes();
  if (fam.per_time.size() != static_cast<std::size_t>(filt.horizon) + 1) {
    rep.issues.push_back(
        {"reward family must provide one value per grid time", -1, {}});
    return rep;
  }
  for (int t = 0; t <= filt.horizon; ++t) {
    const RandomVar& phi = fam.at(t);
    if (phi.size() != n) {
      rep.issues.push_back(
          {"reward at t=" + std::to_string(t) + " does not cover the outcome set",
           t,
           {}});
      continue;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (phi[i] < 0)
        rep.issues.push_back({"negative reward at t=" + std::to_string(t) +
                                  " for outcome '" + space.outcomes[i] + "'",
                              t,
                              {space.outcomes[i]}});
    for (std::size_t b = 0; b < filt.pre[t].n_blocks(); ++b) {
      const auto& blk = filt.pre[t].block(b);
      bool constant = true;
      for (std::size_t i : blk)
        if (phi[i] != phi[blk.front()]) constant = false;
      if (!constant) {
        std::vector<std::string> ids;
        for (std::size_t i : blk) ids.push_back(space.outcomes[i]);
        std::string members;
        for (std::size_t k = 0; k < ids.size(); ++k)
          members += (k ? "," : "") + ids[k];
        rep.issues.push_back(
            {"reward not measurable at t=" + std::to_string(t) + " on block {" +
                 members + "}: phi(tau) fails pre-sigma measurability for the "
                 "witness tau == " + std::to_string(t),
             t, ids});
      }
    }
  }
  return rep;
}

/// Full instance validation: space, filtration and reward together.
inline ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep = validate_space(inst.space, inst.filt);
  if (!rep.ok()) return rep;
  return validate_admissible(inst.reward, inst.filt, inst.space);
}

/// phi(tau): pointwise phi_{tau(w)}(w). Requires tau predictable; the result
/// is then measurable for pre_sigma(tau), which is asserted blockwise through
/// the trace identity  pre_sigma(tau) on {tau = t}  =  pre[t] on {tau = t}.
inline RandomVar eval_at(const RewardFamily& fam, const StoppingTime& tau,
                         const TwoSlotFiltration& filt) {
  detail::require(is_predictable(tau, filt),
                  "eval_at requires a predictable stopping time");
  const std::size_t n = tau.size();
  RandomVar out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fam.at(tau[i])[i];
  for (int t = 0; t <= filt.horizon; ++t) {
    const OutcomeSet stopped = event_eq(tau, t);
    for (std::size_t b = 0; b < filt.pre[t].n_blocks(); ++b) {
      const auto& blk = filt.pre[t].block(b);
      if (!filt.pre[t].block_set(b).subset_of(stopped)) continue;
      for (std::size_t i : blk)
        detail::internal_check(out[i] == out[blk.front()],
                               "phi(tau) not measurable for pre_sigma(tau)");
    }
  }
  return out;
}

/// The scaled family (alpha * phi) relative to S: values alpha(w)*phi_t(w) on
/// {S <= t} and 0 before S. With alpha measurable for pre_sigma(S) the result
/// is itself admissible on the whole grid, which is asserted.
inline RewardFamily scale_by(const RewardFamily& fam, const RandomVar& alpha,
                             const StoppingTime& s,
                             const TwoSlotFiltration& filt,
                             const SampleSpace& space) {
  detail::require(is_predictable(s, filt),
                  "scale_by requires a predictable stopping time");
  for (std::size_t i = 0; i < alpha.size(); ++i)
    detail::require(alpha[i] >= 0, "scale_by requires nonnegative alpha");
  detail::require(is_measurable(alpha, pre_sigma(s, filt)),
                  "alpha is not measurable for pre_sigma(S)");
  RewardFamily out;
  out.per_time.reserve(fam.per_time.size());
  for (int t = 0; t <= fam.horizon(); ++t) {
    RandomVar scaled(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i)
      scaled[i] = (s[i] <= t) ? alpha[i] * fam.at(t)[i] : Rational(0);
    out.per_time.push_back(std::move(scaled));
  }
  detail::internal_check(validate_admissible(out, filt, space).ok(),
                         "scaled family lost admissibility");
  return out;
}

}  // namespace predsnell
