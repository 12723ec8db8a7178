#pragma once

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "predsnell/errors.hpp"
#include "predsnell/reward.hpp"
#include "predsnell/space.hpp"
#include "predsnell/stopping.hpp"

// Predictable value function V_p and strict value V_p+.
//
// Backward route:  V_p(N) = phi_N,
//                  V_p+(t) = E[V_p(t+1) | pre[t]]   for t < N,
//                  V_p(t)  = phi_t v V_p+(t),
//                  V_p+(N) = phi_N (the strict class degenerates to {N} at
//                  the horizon).
// Brute-force route: pointwise maximum of E[phi(tau) | pre_sigma(S)] over the
// complete enumeration of predictable tau >= S (strictly after S for the
// strict value). The two routes must agree exactly; that equality is the
// engine's core oracle.

namespace predsnell {

struct ValueSystem {
  Instance source;
  std::vector<RandomVar> v;       // V_p(0)..V_p(N)
  std::vector<RandomVar> v_plus;  // V_p+(0)..V_p+(N)

  int horizon() const { return source.filt.horizon; }
};

/// Bellman backward induction. Validates the instance first; no computation
/// proceeds on an inadmissible reward.
inline ValueSystem value_backward(const Instance& inst) {
  const ValidationReport rep = validate_instance(inst);
  if (!rep.ok()) throw InvalidInput("invalid instance: " + rep.summary());

  const int N = inst.filt.horizon;
  ValueSystem vs;
  vs.source = inst;
  vs.v.assign(static_cast<std::size_t>(N) + 1, RandomVar{});
  vs.v_plus.assign(static_cast<std::size_t>(N) + 1, RandomVar{});
  vs.v[static_cast<std::size_t>(N)] = inst.reward.at(N);
  vs.v_plus[static_cast<std::size_t>(N)] = inst.reward.at(N);
  for (int t = N - 1; t >= 0; --t) {
    const auto ut = static_cast<std::size_t>(t);
    vs.v_plus[ut] = condexp(vs.v[ut + 1], inst.filt.pre[ut], inst.space);
    vs.v[ut] = pointwise_max(inst.reward.at(t), vs.v_plus[ut]);
  }
  for (int t = 0; t <= N; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    detail::internal_check(is_measurable(vs.v[ut], inst.filt.pre[ut]),
                           "V_p(t) not measurable for pre[t]");
    detail::internal_check(is_measurable(vs.v_plus[ut], inst.filt.pre[ut]),
                           "V_p+(t) not measurable for pre[t]");
    detail::internal_check(leq_everywhere(inst.reward.at(t), vs.v[ut]),
                           "V_p(t) does not dominate the reward");
  }
  return vs;
}

/// V_p(tau) by aggregation: pointwise composition V_p(tau(w))(w).
inline RandomVar value_at(const ValueSystem& vs, const StoppingTime& tau) {
  detail::require(is_predictable(tau, vs.source.filt),
                  "value_at requires a predictable stopping time");
  RandomVar out(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i)
    out[i] = vs.v[static_cast<std::size_t>(tau[i])][i];
  return out;
}

/// V_p+(tau) by aggregation.
inline RandomVar strict_value_at(const ValueSystem& vs,
                                 const StoppingTime& tau) {
  detail::require(is_predictable(tau, vs.source.filt),
                  "strict_value_at requires a predictable stopping time");
  RandomVar out(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i)
    out[i] = vs.v_plus[static_cast<std::size_t>(tau[i])][i];
  return out;
}

/// Independent route: pointwise max of E[phi(tau) | pre_sigma(S)] over the
/// full enumeration. Exact; throws BudgetExceeded when the class is too big.
inline RandomVar value_bruteforce(const Instance& inst, const StoppingTime& s,
                                  bool strict,
                                  std::size_t budget = kDefaultEnumBudget) {
  const Partition sigma = pre_sigma(s, inst.filt);
  const auto candidates = enumerate_predictable(inst.filt, s, strict, budget);
  detail::internal_check(!candidates.empty(), "empty stopping class");
  RandomVar best(s.size(), Rational(0));
  bool first = true;
  for (const auto& tau : candidates) {
    const RandomVar ce = condexp(eval_at(inst.reward, tau, inst.filt), sigma,
                                 inst.space);
    best = first ? ce : pointwise_max(best, ce);
    first = false;
  }
  return best;
}

/// Classical (post-filtration) Snell values: conditioning on post[t] and the
/// plain stopping class {tau <= t} in post[t]. Reference point for the gap
/// between the predictable and the classical problem.
inline std::vector<RandomVar> classical_backward(const Instance& inst) {
  const int N = inst.filt.horizon;
  std::vector<RandomVar> w(static_cast<std::size_t>(N) + 1);
  w[static_cast<std::size_t>(N)] = inst.reward.at(N);
  for (int t = N - 1; t >= 0; --t) {
    const auto ut = static_cast<std::size_t>(t);
    w[ut] = pointwise_max(inst.reward.at(t),
                          condexp(w[ut + 1], inst.filt.post[ut], inst.space));
  }
  return w;
}

// ---------------------------------------------------------------------------
// supermartingale / martingale system checks

struct SystemViolation {
  StoppingTime tau, tau_prime;
  std::vector<std::string> block;  // offending block of pre_sigma(tau)
  Rational lhs, rhs;               // E[U(tau')|pre_sigma(tau)] vs U(tau)
};

struct SystemCheckReport {
  bool ok = true;
  std::optional<SystemViolation> violation;

  std::string message(const SampleSpace& space) const {
    if (ok) return "ok";
    std::ostringstream os;
    os << "system violation at tau={" << format_time(violation->tau, space)
       << "} tau'={" << format_time(violation->tau_prime, space) << "} block={";
    for (std::size_t k = 0; k < violation->block.size(); ++k)
      os << (k ? "," : "") << violation->block[k];
    os << "} lhs=" << to_string(violation->lhs)
       << " rhs=" << to_string(violation->rhs);
    return os.str();
  }
};

/// Core check over stopping-time-indexed families: for every enumerated pair
/// tau <= tau' in the class from `s`, E[U(tau')|pre_sigma(tau)] <= U(tau)
/// (equality when martingale). The budget bounds the total number of pairs.
template <typename EvalFn>
SystemCheckReport check_system_over(EvalFn&& family, const Instance& inst,
                                    const StoppingTime& s, bool martingale,
                                    std::size_t budget = kDefaultEnumBudget) {
  SystemCheckReport rep;
  const auto base = enumerate_predictable(inst.filt, s, false, budget);
  std::size_t pairs = 0;
  for (const auto& tau : base) {
    const Partition sigma = pre_sigma(tau, inst.filt);
    const RandomVar u_tau = family(tau);
    const auto later = enumerate_predictable(inst.filt, tau, false, budget);
    for (const auto& tau_prime : later) {
      if (++pairs > budget) throw BudgetExceeded(budget);
      const RandomVar lhs = condexp(family(tau_prime), sigma, inst.space);
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        const bool bad = martingale ? lhs[i] != u_tau[i] : lhs[i] > u_tau[i];
        if (!bad) continue;
        SystemViolation viol;
        viol.tau = tau;
        viol.tau_prime = tau_prime;
        for (std::size_t j : sigma.block(sigma.block_index_of(i)))
          viol.block.push_back(inst.space.outcomes[j]);
        viol.lhs = lhs[i];
        viol.rhs = u_tau[i];
        rep.ok = false;
        rep.violation = std::move(viol);
        return rep;
      }
    }
  }
  return rep;
}

inline RandomVar aggregate(const std::vector<RandomVar>& per_time,
                           const StoppingTime& tau) {
  RandomVar out(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i)
    out[i] = per_time[static_cast<std::size_t>(tau[i])][i];
  return out;
}

/// Checks whether the time-indexed family u_0..u_N, aggregated over
/// predictable times, is a predictable supermartingale (or martingale)
/// system. Requires each u_t measurable for pre[t].
inline SystemCheckReport check_supermartingale_system(
    const std::vector<RandomVar>& u, const Instance& inst, bool martingale,
    std::size_t budget = kDefaultEnumBudget) {
  detail::require(
      u.size() == static_cast<std::size_t>(inst.filt.horizon) + 1,
      "system check needs one random variable per grid time");
  for (int t = 0; t <= inst.filt.horizon; ++t)
    detail::require(
        is_measurable(u[static_cast<std::size_t>(t)], inst.filt.pre[t]),
        "u(t) must be measurable for pre[t]");
  const StoppingTime zero = StoppingTime::constant(inst.space.size(), 0);
  return check_system_over([&](const StoppingTime& tau) { return aggregate(u, tau); },
                           inst, zero, martingale, budget);
}

// ---------------------------------------------------------------------------
// optimizing sequences (glue fold)

struct OptimizingSequence {
  std::vector<StoppingTime> times;
  std::vector<RandomVar> conditional_values;  // E[phi(times[k]) | pre_sigma(S)]
};

/// Folds the enumeration of the class from S through the pairwise-max glue:
/// tau~1 = tau^1 and tau~k keeps tau~{k-1} on
/// A = {E[phi(tau^k)|pre_sigma(S)] <= E[phi(tau~{k-1})|pre_sigma(S)]}.
/// Conditional values are pointwise nondecreasing and the terminal one is the
/// (strict) value at S; each glued time stays predictable. All asserted.
inline OptimizingSequence optimizing_sequence(
    const Instance& inst, const StoppingTime& s, bool strict = false,
    std::size_t budget = kDefaultEnumBudget) {
  const Partition sigma = pre_sigma(s, inst.filt);
  const auto candidates = enumerate_predictable(inst.filt, s, strict, budget);
  OptimizingSequence seq;
  for (const auto& tau : candidates) {
    const RandomVar ce =
        condexp(eval_at(inst.reward, tau, inst.filt), sigma, inst.space);
    if (seq.times.empty()) {
      seq.times.push_back(tau);
      seq.conditional_values.push_back(ce);
      continue;
    }
    const RandomVar& prev = seq.conditional_values.back();
    OutcomeSet keep_prev(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
      if (ce[i] <= prev[i]) keep_prev.insert(i);
    detail::internal_check(sigma.contains_event(keep_prev),
                           "comparison event must be a pre_sigma(S) event");
    const StoppingTime glued = glue(seq.times.back(), tau, keep_prev);
    detail::internal_check(is_predictable(glued, inst.filt),
                           "glued optimizing time must stay predictable");
    seq.times.push_back(glued);
    seq.conditional_values.push_back(pointwise_max(prev, ce));
  }
  for (std::size_t k = 1; k < seq.conditional_values.size(); ++k)
    detail::internal_check(leq_everywhere(seq.conditional_values[k - 1],
                                          seq.conditional_values[k]),
                           "optimizing sequence must be nondecreasing");
  return seq;
}

// ---------------------------------------------------------------------------
// localization

/// The family tau |-> 1_A * V_p(tau) over predictable tau >= from, for an
/// event A of pre_sigma(from).
class LocalizedValueFamily {
 public:
  LocalizedValueFamily(ValueSystem vs, OutcomeSet region, StoppingTime from)
      : vs_(std::move(vs)), region_(std::move(region)), from_(std::move(from)) {
    detail::require(
        pre_sigma(from_, vs_.source.filt).contains_event(region_),
        "localization event must be measurable for pre_sigma(S)");
  }

  RandomVar operator()(const StoppingTime& tau) const {
    detail::require(leq_pointwise(from_, tau),
                    "localized family is indexed by times at or after S");
    return indicator(region_) * value_at(vs_, tau);
  }

  const OutcomeSet& region() const { return region_; }
  const StoppingTime& from() const { return from_; }

 private:
  ValueSystem vs_;
  OutcomeSet region_;
  StoppingTime from_;
};

inline LocalizedValueFamily localized_value(const ValueSystem& vs,
                                            const OutcomeSet& a,
                                            const StoppingTime& s) {
  return LocalizedValueFamily(vs, a, s);
}

}  // namespace predsnell
