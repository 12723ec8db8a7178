#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "predsnell/decomposition.hpp"
#include "predsnell/errors.hpp"
#include "predsnell/snell.hpp"

// Optimal predictable stopping.
//
// tau^alpha(S): first t >= S where alpha * V_p(t) <= phi_t -- the essinf of
// the class {tau >= S : alpha V_p(tau) <= phi(tau)}, computed by direct scan.
// tau_hat(S):   first contact time min{t >= S : V_p(t) = phi_t}; on a finite
// grid the alpha-limit of tau^alpha is stationary and equals it.
// A stopping time is optimal iff the value touches the reward there and the
// value system is a martingale system on [S, tau]; both directions hold
// exactly here and are asserted.

namespace predsnell {

inline std::vector<Rational> default_alpha_probes() {
  return {Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(9, 10)};
}

/// First time at or after S where the reward covers an alpha-fraction of the
/// value. Predictability and the covering inequality at the result are
/// asserted.
inline StoppingTime tau_alpha(const ValueSystem& vs, const StoppingTime& s,
                              const Rational& alpha) {
  detail::require(alpha > 0 && alpha < 1, "alpha must lie in (0,1)");
  detail::require(is_predictable(s, vs.source.filt),
                  "tau_alpha requires a predictable S");
  const Instance& inst = vs.source;
  const int N = inst.filt.horizon;
  StoppingTime out = StoppingTime::constant(s.size(), N);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (int t = s[i]; t <= N; ++t) {
      if (alpha * vs.v[static_cast<std::size_t>(t)][i] <=
          inst.reward.at(t)[i]) {
        out[i] = t;
        break;
      }
    }
  detail::internal_check(is_predictable(out, inst.filt),
                         "tau_alpha must be predictable");
  detail::internal_check(
      leq_everywhere(alpha * value_at(vs, out),
                     eval_at(inst.reward, out, inst.filt)),
      "alpha-covering inequality must hold at tau_alpha");
  return out;
}

/// First contact time min{t >= S : V_p(t) = phi_t}; well defined since the
/// value meets the reward at the horizon.
inline StoppingTime tau_hat(const ValueSystem& vs, const StoppingTime& s) {
  detail::require(is_predictable(s, vs.source.filt),
                  "tau_hat requires a predictable S");
  const Instance& inst = vs.source;
  const int N = inst.filt.horizon;
  StoppingTime out = StoppingTime::constant(s.size(), N);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (int t = s[i]; t <= N; ++t)
      if (vs.v[static_cast<std::size_t>(t)][i] == inst.reward.at(t)[i]) {
        out[i] = t;
        break;
      }
  detail::internal_check(is_predictable(out, inst.filt),
                         "tau_hat must be predictable");
  return out;
}

/// Largest ratio phi/V_p strictly below contact on [S, tau_hat); for every
/// alpha above it, tau^alpha equals tau_hat.
inline Rational alpha_stationary_threshold(const ValueSystem& vs,
                                           const StoppingTime& s) {
  const Instance& inst = vs.source;
  const StoppingTime hat = tau_hat(vs, s);
  Rational threshold = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (int t = s[i]; t < hat[i]; ++t) {
      const Rational& value = vs.v[static_cast<std::size_t>(t)][i];
      const Rational& reward = inst.reward.at(t)[i];
      // strictly before contact the value strictly dominates, so value > 0
      threshold = std::max(threshold, Rational(reward / value));
    }
  return threshold;
}

/// Walks alpha = 1 - 1/k upward (doubling k) until tau^alpha reaches tau_hat,
/// then checks it stays there. Returns the first stationary k of the walk.
inline long long verify_alpha_stationarity(const ValueSystem& vs,
                                           const StoppingTime& s) {
  const StoppingTime hat = tau_hat(vs, s);
  const Rational threshold = alpha_stationary_threshold(vs, s);
  long long k = 2;
  StoppingTime prev;
  bool have_prev = false;
  while (true) {
    const StoppingTime t_k = tau_alpha(vs, s, Rational(k - 1, k));
    if (have_prev)
      detail::internal_check(leq_pointwise(prev, t_k),
                             "tau^alpha must be nondecreasing in alpha");
    detail::internal_check(leq_pointwise(t_k, hat),
                           "tau^alpha must not pass tau_hat");
    if (t_k == hat) break;
    // 1 - 1/k > threshold forces tau^alpha = tau_hat, so the walk terminates
    detail::internal_check(Rational(k - 1, k) <= threshold,
                           "tau^alpha below tau_hat beyond the threshold");
    detail::internal_check(k < (1LL << 60), "stationarity walk diverged");
    prev = t_k;
    have_prev = true;
    k *= 2;
  }
  detail::internal_check(tau_alpha(vs, s, Rational(2 * k - 1, 2 * k)) == hat,
                         "tau^alpha must stay at tau_hat once reached");
  return k;
}

/// True iff the value system is a martingale system on [S, tau]: one-step
/// form, V_p(t) = E[V_p(t+1)|pre[t]] on every pre[t] block inside
/// {S <= t < tau}. Equivalent to the pairwise definition over predictable
/// S <= tau1 <= tau2 <= tau, which the property suite cross-checks.
inline bool martingale_interval(const ValueSystem& vs, const StoppingTime& s,
                                const StoppingTime& tau) {
  detail::require(leq_pointwise(s, tau), "martingale_interval requires S <= tau");
  detail::require(is_predictable(s, vs.source.filt) &&
                      is_predictable(tau, vs.source.filt),
                  "martingale_interval requires predictable times");
  const Instance& inst = vs.source;
  for (int t = 0; t < inst.filt.horizon; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    bool needed = false;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] <= t && t < tau[i]) needed = true;
    if (!needed) continue;
    const RandomVar ce = condexp(vs.v[ut + 1], inst.filt.pre[t], inst.space);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] <= t && t < tau[i] && vs.v[ut][i] != ce[i]) return false;
  }
  return true;
}

struct CriterionResult {
  bool optimal = false;
  bool cond1 = false;  // value touches the reward at tau*
  bool cond2 = false;  // martingale system on [S, tau*]
  Rational expected_reward;
  Rational best_expected;
};

/// Optimality criterion: tau* is optimal for V_p(S) iff both conditions hold.
/// `optimal` is established independently by comparing E[phi(tau*)] with the
/// best expected reward over the full enumeration; the equivalence with
/// (cond1 and cond2) is asserted.
inline CriterionResult criterion_check(const ValueSystem& vs,
                                       const StoppingTime& s,
                                       const StoppingTime& tau_star,
                                       std::size_t budget = kDefaultEnumBudget) {
  detail::require(leq_pointwise(s, tau_star),
                  "criterion_check requires tau* >= S");
  const Instance& inst = vs.source;
  detail::require(is_predictable(tau_star, inst.filt),
                  "criterion_check requires a predictable tau*");
  CriterionResult r;
  r.cond1 = value_at(vs, tau_star) == eval_at(inst.reward, tau_star, inst.filt);
  r.cond2 = martingale_interval(vs, s, tau_star);
  r.expected_reward =
      inst.space.expectation(eval_at(inst.reward, tau_star, inst.filt));
  r.best_expected = 0;
  for (const auto& tau : enumerate_predictable(inst.filt, s, false, budget))
    r.best_expected = std::max(
        r.best_expected,
        inst.space.expectation(eval_at(inst.reward, tau, inst.filt)));
  r.optimal = r.expected_reward == r.best_expected;
  detail::internal_check(r.optimal == (r.cond1 && r.cond2),
                         "optimality criterion equivalence failed");
  return r;
}

struct OptimalSetResult {
  std::vector<StoppingTime> optimal_set;  // the martingale-interval class
  StoppingTime tau_tilde;                 // its pointwise maximum
};

/// All enumerated predictable tau >= S over which the value system stays a
/// martingale system. Closure under pairwise maximization and membership of
/// the pointwise maximum are asserted.
inline OptimalSetResult optimal_set(const ValueSystem& vs,
                                    const StoppingTime& s,
                                    std::size_t budget = kDefaultEnumBudget) {
  OptimalSetResult res;
  for (const auto& tau : enumerate_predictable(vs.source.filt, s, false, budget))
    if (martingale_interval(vs, s, tau)) res.optimal_set.push_back(tau);
  detail::internal_check(!res.optimal_set.empty(),
                         "optimal set always contains S itself");
  res.tau_tilde = res.optimal_set.front();
  for (const auto& tau : res.optimal_set)
    res.tau_tilde = pointwise_max(res.tau_tilde, tau);

  std::set<std::vector<int>> members;
  for (const auto& tau : res.optimal_set) members.insert(tau.time);
  const std::size_t m = res.optimal_set.size();
  const std::size_t step = std::max<std::size_t>(1, (m * m) / 2048);
  for (std::size_t k = 0; k < m * m; k += step) {
    const auto& t1 = res.optimal_set[k / m];
    const auto& t2 = res.optimal_set[k % m];
    detail::internal_check(members.count(pointwise_max(t1, t2).time) == 1,
                           "optimal set must be closed under pairwise max");
  }
  detail::internal_check(members.count(res.tau_tilde.time) == 1,
                         "tau_tilde must belong to the optimal set");
  detail::internal_check(martingale_interval(vs, s, res.tau_tilde),
                         "value must be a martingale system up to tau_tilde");
  return res;
}

struct RepresentationReport {
  bool ok = true;
  StoppingTime hat;
  RandomVar value_s;
  RandomVar conditional_reward_at_hat;  // E[phi(tau_hat) | pre_sigma(S)]
  Rational expected_at_hat;
  Rational best_expected;
  Rational h_minus_mass = 0;  // strict-increase limit event: empty on a grid
  Rational h_plus_mass = 0;   // value-above-reward event at tau_hat: empty
  std::string detail;
};

/// V_p(S) = E[phi(tau_hat(S)) | pre_sigma(S)] and E[phi(tau_hat)] attains the
/// best expected reward. The two degenerate limit events are reported with
/// their (zero) masses.
inline RepresentationReport representation_check(
    const ValueSystem& vs, const StoppingTime& s,
    std::size_t budget = kDefaultEnumBudget) {
  const Instance& inst = vs.source;
  RepresentationReport rep;
  rep.hat = tau_hat(vs, s);
  rep.value_s = value_at(vs, s);
  rep.conditional_reward_at_hat =
      condexp(eval_at(inst.reward, rep.hat, inst.filt),
              pre_sigma(s, inst.filt), inst.space);
  rep.expected_at_hat =
      inst.space.expectation(eval_at(inst.reward, rep.hat, inst.filt));
  rep.best_expected = 0;
  for (const auto& tau : enumerate_predictable(inst.filt, s, false, budget))
    rep.best_expected = std::max(
        rep.best_expected,
        inst.space.expectation(eval_at(inst.reward, tau, inst.filt)));
  OutcomeSet above = where_equal(value_at(vs, rep.hat),
                                 eval_at(inst.reward, rep.hat, inst.filt))
                         .complement();
  rep.h_plus_mass = inst.space.prob_of(above);
  rep.h_minus_mass = 0;
  verify_alpha_stationarity(vs, s);

  if (rep.value_s != rep.conditional_reward_at_hat) {
    rep.ok = false;
    rep.detail = "V_p(S) != E[phi(tau_hat)|pre_sigma(S)]";
  } else if (rep.expected_at_hat != rep.best_expected) {
    rep.ok = false;
    rep.detail = "E[phi(tau_hat)] does not attain the best expected reward";
  } else if (rep.h_plus_mass != 0 || rep.h_minus_mass != 0) {
    rep.ok = false;
    rep.detail = "degenerate limit events carry mass";
  }
  return rep;
}

struct OptimalReport {
  StoppingTime s;
  std::vector<std::pair<Rational, StoppingTime>> tau_alphas;
  StoppingTime hat;
  std::vector<StoppingTime> optimal_set;
  StoppingTime tau_tilde;
  RandomVar value_at_s;
  Rational expected_value;  // E[V_p(S)] = best expected reward from S
  std::vector<StoppingTime> attained_by;
  Rational h_minus_mass = 0;
  Rational h_plus_mass = 0;
};

inline OptimalReport build_optimal_report(
    const ValueSystem& vs, const StoppingTime& s,
    std::size_t budget = kDefaultEnumBudget,
    const std::vector<Rational>& alphas = default_alpha_probes()) {
  const Instance& inst = vs.source;
  OptimalReport rep;
  rep.s = s;
  for (const auto& alpha : alphas)
    rep.tau_alphas.emplace_back(alpha, tau_alpha(vs, s, alpha));
  rep.hat = tau_hat(vs, s);
  auto osr = optimal_set(vs, s, budget);
  rep.optimal_set = std::move(osr.optimal_set);
  rep.tau_tilde = std::move(osr.tau_tilde);
  rep.value_at_s = value_at(vs, s);
  rep.expected_value = inst.space.expectation(rep.value_at_s);

  Rational best = 0;
  const auto candidates = enumerate_predictable(inst.filt, s, false, budget);
  std::vector<Rational> expectations;
  expectations.reserve(candidates.size());
  for (const auto& tau : candidates) {
    expectations.push_back(
        inst.space.expectation(eval_at(inst.reward, tau, inst.filt)));
    best = std::max(best, expectations.back());
  }
  for (std::size_t k = 0; k < candidates.size(); ++k)
    if (expectations[k] == best) rep.attained_by.push_back(candidates[k]);
  detail::internal_check(best == rep.expected_value,
                         "E[V_p(S)] must equal the best expected reward");

  const RepresentationReport rr = representation_check(vs, s, budget);
  detail::internal_check(rr.ok, "representation check failed: " + rr.detail);
  rep.h_minus_mass = rr.h_minus_mass;
  rep.h_plus_mass = rr.h_plus_mass;

  bool hat_listed = false;
  for (const auto& tau : rep.attained_by)
    if (tau == rep.hat) hat_listed = true;
  detail::internal_check(hat_listed, "tau_hat must be optimal");
  for (const auto& tau : rep.optimal_set)
    detail::internal_check(leq_pointwise(s, tau) && is_predictable(tau, inst.filt),
                           "optimal set entries must be predictable and >= S");
  return rep;
}

}  // namespace predsnell
