#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "predsnell/decomposition.hpp"
#include "predsnell/io.hpp"
#include "predsnell/optimal.hpp"
#include "predsnell/snell.hpp"

// The executable lemma registry: every structural statement the engine is
// accountable for, as a named machine-checkable property with counterexample
// witnesses. A fail carries the quantifier values that produced it, so
// re-running the property id on the same instance replays it deterministically.
//
// Quantifier schedules are deterministic: full enumeration where the
// statement is the engine's core oracle (system checks, aggregation), strided
// deterministic samples plus all grid constants for the higher-arity
// statements, always including the lexicographic extremes. Properties report
// skipped -- never silently passed -- when the base enumeration exceeds the
// budget.

namespace predsnell {

enum class PropStatus { Pass, Fail, SkippedBudget, NotModeled };

inline std::string to_string(PropStatus s) {
  switch (s) {
    case PropStatus::Pass: return "pass";
    case PropStatus::Fail: return "fail";
    case PropStatus::SkippedBudget: return "skipped-budget";
    case PropStatus::NotModeled: return "not-modeled";
  }
  return "?";
}

struct PropertyWitness {
  std::string relation;
  std::vector<std::pair<std::string, std::string>> fields;
};

struct PropOutcome {
  PropStatus status = PropStatus::Pass;
  std::optional<PropertyWitness> witness;
};

struct PropertyResult {
  std::string id;
  std::string anchor;
  std::string quantifiers;
  PropStatus status = PropStatus::Pass;
  std::optional<PropertyWitness> witness;
};

struct PropertyReport {
  std::string instance_digest;
  std::size_t budget = 0;
  std::vector<PropertyResult> results;

  std::size_t count(PropStatus s) const {
    std::size_t k = 0;
    for (const auto& r : results)
      if (r.status == s) ++k;
    return k;
  }
  bool all_pass() const {
    return count(PropStatus::Fail) == 0 && count(PropStatus::SkippedBudget) == 0;
  }
  std::vector<std::string> failed_ids() const {
    std::vector<std::string> ids;
    for (const auto& r : results)
      if (r.status == PropStatus::Fail) ids.push_back(r.id);
    return ids;
  }
};

// ---------------------------------------------------------------------------
// evaluation context

namespace props {

struct PropContext {
  const ValueSystem& vs;
  const Instance& inst;
  std::size_t budget;
  bool has_enumeration = false;
  std::vector<StoppingTime> all;  // T_0^p when within budget
  std::uint64_t seed = 0;

  mutable std::map<std::vector<int>, Partition> sigma_cache;
  mutable std::map<std::vector<int>, std::vector<StoppingTime>> from_cache;
  mutable std::map<std::vector<int>, std::vector<StoppingTime>> strict_cache;

  int horizon() const { return inst.filt.horizon; }
  std::size_t n() const { return inst.space.size(); }

  const Partition& presig(const StoppingTime& tau) const {
    auto it = sigma_cache.find(tau.time);
    if (it == sigma_cache.end())
      it = sigma_cache.emplace(tau.time, pre_sigma(tau, inst.filt)).first;
    return it->second;
  }

  const std::vector<StoppingTime>& from(const StoppingTime& tau) const {
    auto it = from_cache.find(tau.time);
    if (it == from_cache.end())
      it = from_cache
               .emplace(tau.time,
                        enumerate_predictable(inst.filt, tau, false, budget))
               .first;
    return it->second;
  }

  const std::vector<StoppingTime>& strict_from(const StoppingTime& tau) const {
    auto it = strict_cache.find(tau.time);
    if (it == strict_cache.end())
      it = strict_cache
               .emplace(tau.time,
                        enumerate_predictable(inst.filt, tau, true, budget))
               .first;
    return it->second;
  }

  /// Deterministic strided sample of <= k elements, keeping both extremes.
  std::vector<StoppingTime> sample(const std::vector<StoppingTime>& pool,
                                   std::size_t k) const {
    if (pool.size() <= k) return pool;
    std::vector<StoppingTime> out;
    const std::size_t stride = pool.size() / k;
    for (std::size_t i = 0; i < pool.size(); i += stride) out.push_back(pool[i]);
    if (out.back() != pool.back()) out.push_back(pool.back());
    return out;
  }

  /// Sample plus every constant time members of the class from `base`.
  std::vector<StoppingTime> sample_with_constants(
      const std::vector<StoppingTime>& pool, std::size_t k,
      const StoppingTime& base) const {
    std::set<std::vector<int>> seen;
    std::vector<StoppingTime> out;
    auto push = [&](const StoppingTime& t) {
      if (seen.insert(t.time).second) out.push_back(t);
    };
    int lo = 0;
    for (std::size_t i = 0; i < base.size(); ++i) lo = std::max(lo, base[i]);
    for (int t = lo; t <= horizon(); ++t) push(StoppingTime::constant(n(), t));
    for (const auto& t : sample(pool, k)) push(t);
    return out;
  }

  std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(
      std::size_t pool_size, std::size_t cap) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (pool_size == 0) return out;
    const std::size_t total = pool_size * pool_size;
    const std::size_t stride = std::max<std::size_t>(1, total / cap);
    for (std::size_t k = 0; k < total; k += stride)
      out.emplace_back(k / pool_size, k % pool_size);
    return out;
  }

  StoppingTime successor(const StoppingTime& s) const {
    StoppingTime out = s;
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = std::min(out[i] + 1, horizon());
    return out;
  }

  /// Constant probe weights plus pre-sigma-measurable indicator mixtures.
  std::vector<RandomVar> alpha_probes(const Partition& sigma) const {
    std::vector<RandomVar> out;
    for (const auto& c : default_alpha_probes())
      out.push_back(constant_var(n(), c));
    if (sigma.n_blocks() >= 2) {
      const RandomVar one_b = indicator(sigma.block_set(0));
      const RandomVar one_rest = indicator(sigma.block_set(0).complement());
      out.push_back(Rational(1, 2) * one_b + Rational(2) * one_rest);
      out.push_back(one_b);
    }
    return out;
  }

  std::string fmt(const StoppingTime& t) const {
    return format_time(t, inst.space);
  }
  std::string fmt(const RandomVar& x) const {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i) s += ",";
      s += inst.space.outcomes[i] + "=" + to_string(x[i]);
    }
    return s;
  }
  std::string fmt(const OutcomeSet& a) const {
    std::string s;
    bool first = true;
    for (std::size_t i : a.indices()) {
      if (!first) s += ",";
      s += inst.space.outcomes[i];
      first = false;
    }
    return s;
  }
};

using Field = std::pair<std::string, std::string>;

inline PropOutcome fail_with(std::string relation, std::vector<Field> fields) {
  PropOutcome out;
  out.status = PropStatus::Fail;
  out.witness = PropertyWitness{std::move(relation), std::move(fields)};
  return out;
}

inline PropOutcome pass() { return {}; }

/// Caps the total inner-loop work a property performs; schedules stay
/// deterministic because the cap only truncates the tail of the iteration.
struct WorkMeter {
  std::size_t left;
  bool take(std::size_t cost) {
    if (cost > left) {
      left = 0;
      return false;
    }
    left -= cost;
    return true;
  }
};

// ---------------------------------------------------------------------------
// properties

inline PropOutcome prop_2_2(const PropContext& ctx) {
  for (const auto& s : ctx.sample(ctx.all, 3)) {
    const Partition& sigma_s = ctx.presig(s);
    for (const auto& theta : ctx.sample(ctx.from(s), 3)) {
      for (bool strict : {false, true}) {
        const auto& pool = strict ? ctx.strict_from(theta) : ctx.from(theta);
        for (const auto& [i, j] : ctx.sample_pairs(pool.size(), 48)) {
          const StoppingTime& t1 = pool[i];
          const StoppingTime& t2 = pool[j];
          const RandomVar ce1 = condexp(
              eval_at(ctx.inst.reward, t1, ctx.inst.filt), sigma_s, ctx.inst.space);
          const RandomVar ce2 = condexp(
              eval_at(ctx.inst.reward, t2, ctx.inst.filt), sigma_s, ctx.inst.space);
          OutcomeSet keep_first(ctx.n());
          for (std::size_t w = 0; w < ctx.n(); ++w)
            if (ce2[w] <= ce1[w]) keep_first.insert(w);
          if (!sigma_s.contains_event(keep_first))
            return fail_with("comparison event not pre-sigma(S) measurable",
                             {{"S", ctx.fmt(s)}, {"tau1", ctx.fmt(t1)},
                              {"tau2", ctx.fmt(t2)}});
          const StoppingTime glued = glue(t1, t2, keep_first);
          if (!is_predictable(glued, ctx.inst.filt))
            return fail_with("glued time not predictable",
                             {{"S", ctx.fmt(s)}, {"tau1", ctx.fmt(t1)},
                              {"tau2", ctx.fmt(t2)}, {"glued", ctx.fmt(glued)}});
          bool in_class = true;
          for (std::size_t w = 0; w < ctx.n(); ++w) {
            if (strict)
              in_class &= theta[w] < ctx.horizon() ? glued[w] > theta[w]
                                                   : glued[w] == ctx.horizon();
            else
              in_class &= glued[w] >= theta[w];
          }
          if (!in_class)
            return fail_with("glued time escapes the stopping class",
                             {{"theta", ctx.fmt(theta)}, {"glued", ctx.fmt(glued)},
                              {"strict", strict ? "true" : "false"}});
          const RandomVar ce3 = condexp(
              eval_at(ctx.inst.reward, glued, ctx.inst.filt), sigma_s,
              ctx.inst.space);
          if (ce3 != pointwise_max(ce1, ce2))
            return fail_with(
                "E[phi(glued)|S-] != max of the two conditional rewards",
                {{"S", ctx.fmt(s)}, {"tau1", ctx.fmt(t1)}, {"tau2", ctx.fmt(t2)},
                 {"lhs", ctx.fmt(ce3)},
                 {"rhs", ctx.fmt(pointwise_max(ce1, ce2))}});
        }
      }
    }
  }
  return pass();
}

inline PropOutcome prop_2_3(const PropContext& ctx) {
  for (const auto& s : ctx.sample(ctx.all, 4)) {
    for (bool strict : {false, true}) {
      const auto seq = optimizing_sequence(ctx.inst, s, strict, ctx.budget);
      const RandomVar target =
          strict ? strict_value_at(ctx.vs, s) : value_at(ctx.vs, s);
      if (seq.conditional_values.back() != target)
        return fail_with("optimizing sequence terminal value misses the value",
                         {{"S", ctx.fmt(s)}, {"strict", strict ? "true" : "false"},
                          {"lhs", ctx.fmt(seq.conditional_values.back())},
                          {"rhs", ctx.fmt(target)}});
    }
  }
  return pass();
}

inline PropOutcome prop_2_4(const PropContext& ctx) {
  WorkMeter meter{60000};
  for (const auto& s : ctx.sample(ctx.all, 3)) {
    const Partition& sigma_s = ctx.presig(s);
    for (const auto& theta : ctx.sample(ctx.from(s), 3)) {
      const auto& plain = ctx.from(theta);
      const auto& strict = ctx.strict_from(theta);
      for (const auto& alpha : ctx.alpha_probes(ctx.presig(theta))) {
        if (!meter.take(plain.size() + strict.size())) return pass();
        const RandomVar lhs =
            condexp(alpha * value_at(ctx.vs, theta), sigma_s, ctx.inst.space);
        RandomVar rhs(ctx.n(), Rational(0));
        bool first = true;
        for (const auto& tau : plain) {
          const RandomVar ce =
              condexp(alpha * eval_at(ctx.inst.reward, tau, ctx.inst.filt),
                      sigma_s, ctx.inst.space);
          rhs = first ? ce : pointwise_max(rhs, ce);
          first = false;
        }
        if (lhs != rhs)
          return fail_with("E[alpha V_p(theta)|S-] != sup E[alpha phi(tau)|S-]",
                           {{"S", ctx.fmt(s)}, {"theta", ctx.fmt(theta)},
                            {"alpha", ctx.fmt(alpha)}, {"lhs", ctx.fmt(lhs)},
                            {"rhs", ctx.fmt(rhs)}});
        const RandomVar lhs2 = condexp(alpha * strict_value_at(ctx.vs, theta),
                                       sigma_s, ctx.inst.space);
        RandomVar rhs2(ctx.n(), Rational(0));
        first = true;
        for (const auto& tau : strict) {
          const RandomVar ce =
              condexp(alpha * eval_at(ctx.inst.reward, tau, ctx.inst.filt),
                      sigma_s, ctx.inst.space);
          rhs2 = first ? ce : pointwise_max(rhs2, ce);
          first = false;
        }
        if (lhs2 != rhs2)
          return fail_with(
              "E[alpha V_p+(theta)|S-] != sup over the strict class",
              {{"S", ctx.fmt(s)}, {"theta", ctx.fmt(theta)},
               {"alpha", ctx.fmt(alpha)}, {"lhs", ctx.fmt(lhs2)},
               {"rhs", ctx.fmt(rhs2)}});
      }
    }
  }
  return pass();
}

inline PropOutcome prop_2_6(const PropContext& ctx) {
  WorkMeter meter{40000};
  for (const auto& s : ctx.sample(ctx.all, 2)) {
    for (const auto& alpha : ctx.alpha_probes(ctx.presig(s))) {
      Instance scaled = ctx.inst;
      scaled.reward =
          scale_by(ctx.inst.reward, alpha, s, ctx.inst.filt, ctx.inst.space);
      for (const auto& tau : ctx.sample(ctx.from(s), 3)) {
        if (!meter.take(ctx.from(tau).size())) return pass();
        const RandomVar lhs = value_bruteforce(scaled, tau, false, ctx.budget);
        const RandomVar rhs = alpha * value_at(ctx.vs, tau);
        if (lhs != rhs)
          return fail_with("V^alpha(tau) != alpha V_p(tau)",
                           {{"S", ctx.fmt(s)}, {"tau", ctx.fmt(tau)},
                            {"alpha", ctx.fmt(alpha)}, {"lhs", ctx.fmt(lhs)},
                            {"rhs", ctx.fmt(rhs)}});
      }
      for (const auto& tau : ctx.sample(ctx.strict_from(s), 2)) {
        if (!meter.take(ctx.strict_from(tau).size())) return pass();
        const RandomVar lhs = value_bruteforce(scaled, tau, true, ctx.budget);
        const RandomVar rhs = alpha * strict_value_at(ctx.vs, tau);
        if (lhs != rhs)
          return fail_with("V^{alpha+}(tau) != alpha V_p+(tau)",
                           {{"S", ctx.fmt(s)}, {"tau", ctx.fmt(tau)},
                            {"alpha", ctx.fmt(alpha)}, {"lhs", ctx.fmt(lhs)},
                            {"rhs", ctx.fmt(rhs)}});
      }
    }
  }
  return pass();
}

inline PropOutcome prop_2_7(const PropContext& ctx) {
  WorkMeter meter{40000};
  for (const auto& [i, j] : ctx.sample_pairs(ctx.all.size(), 12)) {
    const StoppingTime& tau = ctx.all[i];
    const StoppingTime& til = ctx.all[j];
    const OutcomeSet agree = where_eq(tau, til);
    if (!agree.empty()) {
      if (!meter.take(ctx.from(tau).size() + ctx.from(til).size())) return pass();
      Instance at_tau = ctx.inst;
      at_tau.reward = scale_by(ctx.inst.reward, indicator(agree), tau,
                               ctx.inst.filt, ctx.inst.space);
      Instance at_til = ctx.inst;
      at_til.reward = scale_by(ctx.inst.reward, indicator(agree), til,
                               ctx.inst.filt, ctx.inst.space);
      const RandomVar va = value_bruteforce(at_tau, tau, false, ctx.budget);
      const RandomVar vb = value_bruteforce(at_til, til, false, ctx.budget);
      if (va != vb)
        return fail_with("V^A(tau) != V^A(tau~) for A = {tau = tau~}",
                         {{"tau", ctx.fmt(tau)}, {"tau~", ctx.fmt(til)},
                          {"A", ctx.fmt(agree)}, {"lhs", ctx.fmt(va)},
                          {"rhs", ctx.fmt(vb)}});
      const RandomVar va_strict = value_bruteforce(at_tau, tau, true, ctx.budget);
      const RandomVar vb_strict = value_bruteforce(at_til, til, true, ctx.budget);
      if (va_strict != vb_strict)
        return fail_with("V^{A+}(tau) != V^{A+}(tau~) for A = {tau = tau~}",
                         {{"tau", ctx.fmt(tau)}, {"tau~", ctx.fmt(til)},
                          {"A", ctx.fmt(agree)}, {"lhs", ctx.fmt(va_strict)},
                          {"rhs", ctx.fmt(vb_strict)}});
    }
    const OutcomeSet beyond = where_gt(tau, til);
    if (!beyond.empty()) {
      const RandomVar lhs =
          condexp(eval_at(ctx.inst.reward, tau, ctx.inst.filt), ctx.presig(til),
                  ctx.inst.space);
      const RandomVar rhs = strict_value_at(ctx.vs, til);
      if (!leq_on(lhs, rhs, beyond))
        return fail_with(
            "E[phi(tau)|tau~-] exceeds V_p+(tau~) on {tau > tau~}",
            {{"tau", ctx.fmt(tau)}, {"tau~", ctx.fmt(til)},
             {"B", ctx.fmt(beyond)}, {"lhs", ctx.fmt(lhs)},
             {"rhs", ctx.fmt(rhs)}});
    }
  }
  return pass();
}

inline std::vector<OutcomeSet> localization_events(const PropContext& ctx,
                                                   const Partition& sigma) {
  std::vector<OutcomeSet> events;
  events.push_back(OutcomeSet::all(ctx.n()));
  events.push_back(OutcomeSet::none(ctx.n()));
  for (std::size_t b = 0; b < sigma.n_blocks() && b < 2; ++b) {
    events.push_back(sigma.block_set(b));
    events.push_back(sigma.block_set(b).complement());
  }
  return events;
}

inline PropOutcome prop_2_8(const PropContext& ctx) {
  WorkMeter meter{40000};
  for (const auto& s : ctx.sample(ctx.all, 2)) {
    for (const auto& region : localization_events(ctx, ctx.presig(s))) {
      const auto family = localized_value(ctx.vs, region, s);
      Instance masked = ctx.inst;
      masked.reward = scale_by(ctx.inst.reward, indicator(region), s,
                               ctx.inst.filt, ctx.inst.space);
      for (const auto& tau : ctx.sample(ctx.from(s), 3)) {
        if (!meter.take(ctx.from(tau).size())) return pass();
        const RandomVar lhs = value_bruteforce(masked, tau, false, ctx.budget);
        const RandomVar rhs = family(tau);
        if (lhs != rhs)
          return fail_with("V^A(tau) != 1_A V_p(tau)",
                           {{"S", ctx.fmt(s)}, {"A", ctx.fmt(region)},
                            {"tau", ctx.fmt(tau)}, {"lhs", ctx.fmt(lhs)},
                            {"rhs", ctx.fmt(rhs)}});
      }
      for (const auto& tau : ctx.sample(ctx.strict_from(s), 2)) {
        if (!meter.take(ctx.strict_from(tau).size())) return pass();
        const RandomVar lhs = value_bruteforce(masked, tau, true, ctx.budget);
        const RandomVar rhs = indicator(region) * strict_value_at(ctx.vs, tau);
        if (lhs != rhs)
          return fail_with("V^{A+}(tau) != 1_A V_p+(tau)",
                           {{"S", ctx.fmt(s)}, {"A", ctx.fmt(region)},
                            {"tau", ctx.fmt(tau)}, {"lhs", ctx.fmt(lhs)},
                            {"rhs", ctx.fmt(rhs)}});
      }
    }
  }
  return pass();
}

inline PropOutcome prop_rem_p(const PropContext& ctx) {
  WorkMeter meter{30000};
  for (const auto& s : ctx.sample(ctx.all, 2)) {
    const Partition& sigma = ctx.presig(s);
    if (sigma.n_blocks() < 1) continue;
    for (std::size_t b = 0; b < sigma.n_blocks() && b < 2; ++b) {
      const OutcomeSet region = sigma.block_set(b);
      Instance on = ctx.inst;
      on.reward = scale_by(ctx.inst.reward, indicator(region), s, ctx.inst.filt,
                           ctx.inst.space);
      Instance off = ctx.inst;
      off.reward = scale_by(ctx.inst.reward, indicator(region.complement()), s,
                            ctx.inst.filt, ctx.inst.space);
      for (const auto& tau : ctx.sample(ctx.from(s), 3)) {
        if (!meter.take(2 * ctx.from(tau).size())) return pass();
        const RandomVar sum = value_bruteforce(on, tau, false, ctx.budget) +
                              value_bruteforce(off, tau, false, ctx.budget);
        const RandomVar whole = value_at(ctx.vs, tau);
        if (sum != whole)
          return fail_with("V^A(tau) + V^{A^c}(tau) != V_p(tau)",
                           {{"S", ctx.fmt(s)}, {"A", ctx.fmt(region)},
                            {"tau", ctx.fmt(tau)}, {"lhs", ctx.fmt(sum)},
                            {"rhs", ctx.fmt(whole)}});
      }
    }
  }
  return pass();
}

inline PropOutcome prop_2_10(const PropContext& ctx) {
  for (int t = 0; t <= ctx.horizon(); ++t) {
    const auto ut = static_cast<std::size_t>(t);
    if (!is_measurable(ctx.vs.v[ut], ctx.inst.filt.pre[t]))
      return fail_with("V_p(t) not measurable for pre[t]",
                       {{"t", std::to_string(t)}});
    if (!is_measurable(ctx.vs.v_plus[ut], ctx.inst.filt.pre[t]))
      return fail_with("V_p+(t) not measurable for pre[t]",
                       {{"t", std::to_string(t)}});
  }
  for (const auto& [i, j] : ctx.sample_pairs(ctx.all.size(), 64)) {
    const StoppingTime& tau = ctx.all[i];
    const StoppingTime& til = ctx.all[j];
    const OutcomeSet agree = where_eq(tau, til);
    if (agree.empty()) continue;
    if (!equal_on(value_at(ctx.vs, tau), value_at(ctx.vs, til), agree))
      return fail_with("V_p(tau) != V_p(tau') on {tau = tau'}",
                       {{"tau", ctx.fmt(tau)}, {"tau'", ctx.fmt(til)}});
    if (!equal_on(strict_value_at(ctx.vs, tau), strict_value_at(ctx.vs, til),
                  agree))
      return fail_with("V_p+(tau) != V_p+(tau') on {tau = tau'}",
                       {{"tau", ctx.fmt(tau)}, {"tau'", ctx.fmt(til)}});
  }
  return pass();
}

inline PropOutcome prop_2_11(const PropContext& ctx) {
  const MertensDecomposition d = decompose(ctx.vs);
  for (const auto& s : ctx.sample(ctx.all, 2)) {
    const Partition& sigma = ctx.presig(s);
    const bool value_is_martingale = martingale_interval(
        ctx.vs, s, StoppingTime::constant(ctx.n(), ctx.horizon()));
    std::vector<OutcomeSet> events;
    for (std::size_t b = 0; b < sigma.n_blocks() && b < 2; ++b)
      events.push_back(sigma.block_set(b));
    for (const auto& region : events) {
      const RandomVar mask = indicator(region);
      const auto taus = ctx.sample(ctx.from(s), 8);
      for (const auto& t1 : taus) {
        const Partition& sigma1 = ctx.presig(t1);
        for (const auto& t2 : ctx.sample(ctx.from(t1), 8)) {
          const RandomVar lhs_m = condexp(mask * aggregate(d.m, t2), sigma1,
                                          ctx.inst.space);
          if (lhs_m != mask * aggregate(d.m, t1))
            return fail_with("localized martingale part loses martingality",
                             {{"S", ctx.fmt(s)}, {"A", ctx.fmt(region)},
                              {"tau1", ctx.fmt(t1)}, {"tau2", ctx.fmt(t2)}});
          if (value_is_martingale) {
            const RandomVar lhs_v = condexp(mask * value_at(ctx.vs, t2), sigma1,
                                            ctx.inst.space);
            if (lhs_v != mask * value_at(ctx.vs, t1))
              return fail_with("localized value family loses martingality",
                               {{"S", ctx.fmt(s)}, {"A", ctx.fmt(region)},
                                {"tau1", ctx.fmt(t1)}, {"tau2", ctx.fmt(t2)}});
          }
        }
      }
    }
  }
  return pass();
}

inline PropOutcome prop_2_12(const PropContext& ctx) {
  const StoppingTime zero = StoppingTime::constant(ctx.n(), 0);
  auto rep = check_system_over(
      [&](const StoppingTime& tau) { return value_at(ctx.vs, tau); }, ctx.inst,
      zero, false, ctx.budget);
  if (!rep.ok)
    return fail_with("V_p is not a predictable supermartingale system",
                     {{"detail", rep.message(ctx.inst.space)}});
  rep = check_system_over(
      [&](const StoppingTime& tau) { return strict_value_at(ctx.vs, tau); },
      ctx.inst, zero, false, ctx.budget);
  if (!rep.ok)
    return fail_with("V_p+ is not a predictable supermartingale system",
                     {{"detail", rep.message(ctx.inst.space)}});

  for (int t = 0; t <= ctx.horizon(); ++t)
    if (!leq_everywhere(ctx.inst.reward.at(t),
                        ctx.vs.v[static_cast<std::size_t>(t)]))
      return fail_with("value does not dominate the reward",
                       {{"t", std::to_string(t)}});

  // minimality: any dominating supermartingale system sits above the value
  std::mt19937_64 rng(ctx.seed ^ 0x5eed5eedULL);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<RandomVar> u(static_cast<std::size_t>(ctx.horizon()) + 1);
    for (int t = ctx.horizon(); t >= 0; --t) {
      const auto ut = static_cast<std::size_t>(t);
      RandomVar base =
          t == ctx.horizon()
              ? ctx.inst.reward.at(t)
              : pointwise_max(ctx.inst.reward.at(t),
                              condexp(u[ut + 1], ctx.inst.filt.pre[t],
                                      ctx.inst.space));
      const Partition& q = ctx.inst.filt.pre[t];
      for (std::size_t b = 0; b < q.n_blocks(); ++b) {
        const Rational bump(rng() % 5, 2);
        for (std::size_t i : q.block(b)) base[i] += bump;
      }
      u[ut] = std::move(base);
    }
    for (int t = 0; t <= ctx.horizon(); ++t) {
      const auto ut = static_cast<std::size_t>(t);
      if (!leq_everywhere(ctx.inst.reward.at(t), u[ut]))
        return fail_with("synthesized system must dominate the reward",
                         {{"t", std::to_string(t)}, {"trial", std::to_string(trial)}});
      if (!leq_everywhere(ctx.vs.v[ut], u[ut]))
        return fail_with(
            "value exceeds a dominating supermartingale system (not minimal)",
            {{"t", std::to_string(t)}, {"trial", std::to_string(trial)},
             {"u", ctx.fmt(u[ut])}, {"V_p", ctx.fmt(ctx.vs.v[ut])}});
    }
  }
  return pass();
}

inline PropOutcome prop_2_13(const PropContext& ctx) {
  for (int t = 0; t <= ctx.horizon(); ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const RandomVar rhs =
        pointwise_max(ctx.inst.reward.at(t), ctx.vs.v_plus[ut]);
    if (ctx.vs.v[ut] != rhs) {
      for (std::size_t i = 0; i < ctx.n(); ++i)
        if (ctx.vs.v[ut][i] != rhs[i]) {
          const Partition& q = ctx.inst.filt.pre[t];
          return fail_with(
              "V_p(t) != phi_t v V_p+(t)",
              {{"t", std::to_string(t)},
               {"block", ctx.fmt(q.block_set(q.block_index_of(i)))},
               {"lhs", to_string(ctx.vs.v[ut][i])},
               {"rhs", to_string(rhs[i])}});
        }
    }
  }
  if (!ctx.has_enumeration) return pass();
  for (const auto& s : ctx.sample(ctx.all, 6)) {
    const RandomVar rhs = pointwise_max(
        eval_at(ctx.inst.reward, s, ctx.inst.filt), strict_value_at(ctx.vs, s));
    if (value_at(ctx.vs, s) != rhs)
      return fail_with("V_p(S) != phi(S) v V_p+(S)",
                       {{"S", ctx.fmt(s)},
                        {"lhs", ctx.fmt(value_at(ctx.vs, s))},
                        {"rhs", ctx.fmt(rhs)}});
  }
  return pass();
}

inline PropOutcome prop_2_14(const PropContext& ctx) {
  for (const auto& s : ctx.sample(ctx.all, 6)) {
    const Partition& sigma = ctx.presig(s);
    for (const auto& tau : ctx.sample(ctx.from(s), 6)) {
      const OutcomeSet beyond = where_gt(tau, s);
      if (beyond.empty()) continue;
      const RandomVar lhs =
          condexp(value_at(ctx.vs, tau), sigma, ctx.inst.space);
      const RandomVar rhs = strict_value_at(ctx.vs, s);
      if (!leq_on(lhs, rhs, beyond))
        return fail_with("E[V_p(tau)|S-] exceeds V_p+(S) on {tau > S}",
                         {{"S", ctx.fmt(s)}, {"tau", ctx.fmt(tau)},
                          {"lhs", ctx.fmt(lhs)}, {"rhs", ctx.fmt(rhs)}});
    }
  }
  return pass();
}

inline PropOutcome prop_3_6_1(const PropContext& ctx) {
  for (const auto& s : ctx.sample(ctx.all, 6)) {
    const Partition& sigma = ctx.presig(s);
    const RandomVar right = condexp(value_at(ctx.vs, ctx.successor(s)), sigma,
                                    ctx.inst.space);
    for (const auto& tau : ctx.sample(ctx.strict_from(s), 4)) {
      const RandomVar lhs = condexp(value_at(ctx.vs, tau), sigma, ctx.inst.space);
      if (!leq_everywhere(lhs, right))
        return fail_with("E[V_p(tau)|S-] exceeds E[V_p(S+)|S-] for tau > S",
                         {{"S", ctx.fmt(s)}, {"tau", ctx.fmt(tau)},
                          {"lhs", ctx.fmt(lhs)}, {"rhs", ctx.fmt(right)}});
    }
  }
  return pass();
}

inline PropOutcome prop_3_6_2(const PropContext& ctx) {
  for (const auto& s : ctx.sample(ctx.all, 8)) {
    const RandomVar right = condexp(value_at(ctx.vs, ctx.successor(s)),
                                    ctx.presig(s), ctx.inst.space);
    const RandomVar strict = strict_value_at(ctx.vs, s);
    if (!leq_everywhere(strict, right))
      return fail_with("V_p+(S) exceeds E[V_p(S+)|S-]",
                       {{"S", ctx.fmt(s)}, {"lhs", ctx.fmt(strict)},
                        {"rhs", ctx.fmt(right)}});
    OutcomeSet before_horizon(ctx.n());
    for (std::size_t i = 0; i < ctx.n(); ++i)
      if (s[i] < ctx.horizon()) before_horizon.insert(i);
    // the grid successor makes the inequality an equality before the horizon
    if (!equal_on(strict, right, before_horizon))
      return fail_with("V_p+(S) != E[V_p(S+)|S-] on {S < N}",
                       {{"S", ctx.fmt(s)}, {"lhs", ctx.fmt(strict)},
                        {"rhs", ctx.fmt(right)}});
  }
  return pass();
}

inline PropOutcome prop_3_7_1(const PropContext& ctx) {
  for (const auto& s : ctx.sample(ctx.all, 8)) {
    const RandomVar right = condexp(value_at(ctx.vs, ctx.successor(s)),
                                    ctx.presig(s), ctx.inst.space);
    if (!leq_everywhere(right, value_at(ctx.vs, s)))
      return fail_with("E[V_p(S+)|S-] exceeds V_p(S)",
                       {{"S", ctx.fmt(s)}, {"lhs", ctx.fmt(right)},
                        {"rhs", ctx.fmt(value_at(ctx.vs, s))}});
  }
  return pass();
}

inline PropOutcome prop_3_8_1(const PropContext& ctx) {
  for (const auto& s : ctx.sample(ctx.all, 8)) {
    const RandomVar right = condexp(value_at(ctx.vs, ctx.successor(s)),
                                    ctx.presig(s), ctx.inst.space);
    const RandomVar rhs =
        pointwise_max(eval_at(ctx.inst.reward, s, ctx.inst.filt), right);
    if (value_at(ctx.vs, s) != rhs)
      return fail_with("V_p(S) != phi(S) v E[V_p(S+)|S-]",
                       {{"S", ctx.fmt(s)}, {"lhs", ctx.fmt(value_at(ctx.vs, s))},
                        {"rhs", ctx.fmt(rhs)}});
  }
  return pass();
}

inline PropOutcome prop_3_8_2(const PropContext& ctx) {
  for (const auto& s : ctx.sample(ctx.all, 8)) {
    const RandomVar value = value_at(ctx.vs, s);
    const RandomVar right = condexp(value_at(ctx.vs, ctx.successor(s)),
                                    ctx.presig(s), ctx.inst.space);
    const OutcomeSet off_contact =
        where_equal(value, eval_at(ctx.inst.reward, s, ctx.inst.filt))
            .complement();
    if (!equal_on(value, right, off_contact))
      return fail_with("V_p(S) - E[V_p(S+)|S-] lives off the contact set",
                       {{"S", ctx.fmt(s)}, {"lhs", ctx.fmt(value)},
                        {"rhs", ctx.fmt(right)}});
  }
  return pass();
}

inline PropOutcome prop_3_11(const PropContext& ctx) {
  std::vector<RandomVar> psi(static_cast<std::size_t>(ctx.horizon()) + 1);
  for (int t = 0; t <= ctx.horizon(); ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const RandomVar& next =
        t < ctx.horizon() ? ctx.vs.v[ut + 1] : ctx.vs.v[ut];
    psi[ut] = condexp(next, ctx.inst.filt.pre[t], ctx.inst.space);
    if (psi[ut] != ctx.vs.v_plus[ut])
      return fail_with(
          "projected right limit differs from the strict value at t",
          {{"t", std::to_string(t)}, {"lhs", ctx.fmt(psi[ut])},
           {"rhs", ctx.fmt(ctx.vs.v_plus[ut])}});
  }
  const auto rep =
      check_supermartingale_system(psi, ctx.inst, false, ctx.budget);
  if (!rep.ok)
    return fail_with(
        "projected right-limit family is not a supermartingale system",
        {{"detail", rep.message(ctx.inst.space)}});
  return pass();
}

inline PropOutcome prop_4_2(const PropContext& ctx) {
  for (const auto& s : ctx.sample(ctx.all, 3)) {
    std::vector<StoppingTime> probes = ctx.sample(ctx.from(s), 3);
    probes.push_back(s);
    probes.push_back(tau_hat(ctx.vs, s));
    probes.push_back(StoppingTime::constant(ctx.n(), ctx.horizon()));
    for (const auto& tau_star : probes) {
      CriterionResult r;
      try {
        r = criterion_check(ctx.vs, s, tau_star, ctx.budget);
      } catch (const InternalError& e) {
        return fail_with("optimality criterion equivalence broken",
                         {{"S", ctx.fmt(s)}, {"tau*", ctx.fmt(tau_star)},
                          {"error", e.what()}});
      }
      if (r.optimal != (r.cond1 && r.cond2))
        return fail_with("optimal <=> (contact and martingale) violated",
                         {{"S", ctx.fmt(s)}, {"tau*", ctx.fmt(tau_star)}});
    }
  }
  return pass();
}

inline PropOutcome prop_4_3(const PropContext& ctx) {
  for (const auto& s : ctx.sample(ctx.all, 3)) {
    OptimalSetResult osr;
    try {
      osr = optimal_set(ctx.vs, s, ctx.budget);
    } catch (const InternalError& e) {
      return fail_with("optimal-set construction broke an invariant",
                       {{"S", ctx.fmt(s)}, {"error", e.what()}});
    }
    std::set<std::vector<int>> members;
    for (const auto& tau : osr.optimal_set) members.insert(tau.time);
    for (const auto& [i, j] : ctx.sample_pairs(osr.optimal_set.size(), 128)) {
      const StoppingTime bigger =
          pointwise_max(osr.optimal_set[i], osr.optimal_set[j]);
      if (members.count(bigger.time) == 0)
        return fail_with("martingale class not closed under pairwise max",
                         {{"S", ctx.fmt(s)},
                          {"tau1", ctx.fmt(osr.optimal_set[i])},
                          {"tau2", ctx.fmt(osr.optimal_set[j])}});
    }
    if (members.count(tau_hat(ctx.vs, s).time) == 0)
      return fail_with("tau_hat escapes the martingale class",
                       {{"S", ctx.fmt(s)}, {"tau^", ctx.fmt(tau_hat(ctx.vs, s))}});
    if (!martingale_interval(ctx.vs, s, osr.tau_tilde))
      return fail_with("value not a martingale system up to tau_tilde",
                       {{"S", ctx.fmt(s)}, {"tau~", ctx.fmt(osr.tau_tilde)}});
  }
  return pass();
}

inline PropOutcome prop_4_6(const PropContext& ctx) {
  for (const auto& s : ctx.sample(ctx.all, 4)) {
    const StoppingTime hat = tau_hat(ctx.vs, s);
    StoppingTime prev;
    bool have_prev = false;
    for (const auto& alpha : default_alpha_probes()) {
      StoppingTime ta;
      try {
        ta = tau_alpha(ctx.vs, s, alpha);
      } catch (const InternalError& e) {
        return fail_with("tau_alpha violated its contract",
                         {{"S", ctx.fmt(s)}, {"alpha", to_string(alpha)},
                          {"error", e.what()}});
      }
      if (!leq_everywhere(alpha * value_at(ctx.vs, ta),
                          eval_at(ctx.inst.reward, ta, ctx.inst.filt)))
        return fail_with("alpha V_p(tau^alpha) > phi(tau^alpha)",
                         {{"S", ctx.fmt(s)}, {"alpha", to_string(alpha)},
                          {"tau^alpha", ctx.fmt(ta)}});
      if (have_prev && !leq_pointwise(prev, ta))
        return fail_with("tau^alpha not nondecreasing in alpha",
                         {{"S", ctx.fmt(s)}, {"alpha", to_string(alpha)}});
      if (!leq_pointwise(ta, hat))
        return fail_with("tau^alpha passes tau_hat",
                         {{"S", ctx.fmt(s)}, {"alpha", to_string(alpha)}});
      prev = ta;
      have_prev = true;

      // stability by pairwise minimization and essinf of the alpha class
      std::vector<StoppingTime> members;
      for (const auto& tau : ctx.from(s))
        if (leq_everywhere(alpha * value_at(ctx.vs, tau),
                           eval_at(ctx.inst.reward, tau, ctx.inst.filt)))
          members.push_back(tau);
      std::set<std::vector<int>> member_set;
      for (const auto& tau : members) member_set.insert(tau.time);
      if (member_set.count(ta.time) == 0)
        return fail_with("tau^alpha not a member of its own class",
                         {{"S", ctx.fmt(s)}, {"alpha", to_string(alpha)}});
      for (const auto& [i, j] : ctx.sample_pairs(members.size(), 64))
        if (member_set.count(pointwise_min(members[i], members[j]).time) == 0)
          return fail_with("alpha class not stable by pairwise min",
                           {{"S", ctx.fmt(s)}, {"alpha", to_string(alpha)},
                            {"tau1", ctx.fmt(members[i])},
                            {"tau2", ctx.fmt(members[j])}});
      StoppingTime inf = members.front();
      for (const auto& tau : members) inf = pointwise_min(inf, tau);
      if (!(inf == ta))
        return fail_with("essinf of the alpha class differs from the scan",
                         {{"S", ctx.fmt(s)}, {"alpha", to_string(alpha)},
                          {"essinf", ctx.fmt(inf)}, {"scan", ctx.fmt(ta)}});
    }
    try {
      verify_alpha_stationarity(ctx.vs, s);
    } catch (const InternalError& e) {
      return fail_with("tau^alpha is not stationary at tau_hat",
                       {{"S", ctx.fmt(s)}, {"error", e.what()}});
    }
  }
  return pass();
}

inline PropOutcome prop_4_7(const PropContext& ctx) {
  for (const auto& s : ctx.all) {
    const RandomVar brute = value_bruteforce(ctx.inst, s, false, ctx.budget);
    if (value_at(ctx.vs, s) != brute)
      return fail_with("backward value differs from brute force at S",
                       {{"S", ctx.fmt(s)}, {"lhs", ctx.fmt(value_at(ctx.vs, s))},
                        {"rhs", ctx.fmt(brute)}});
    const RandomVar brute_strict =
        value_bruteforce(ctx.inst, s, true, ctx.budget);
    if (strict_value_at(ctx.vs, s) != brute_strict)
      return fail_with("backward strict value differs from brute force at S",
                       {{"S", ctx.fmt(s)},
                        {"lhs", ctx.fmt(strict_value_at(ctx.vs, s))},
                        {"rhs", ctx.fmt(brute_strict)}});
  }
  return pass();
}

inline PropOutcome prop_4_8(const PropContext& ctx) {
  MertensDecomposition d;
  try {
    d = decompose(ctx.vs);
  } catch (const InternalError& e) {
    return fail_with("decomposition broke an invariant", {{"error", e.what()}});
  }
  for (int t = 0; t <= ctx.horizon(); ++t) {
    const auto ut = static_cast<std::size_t>(t);
    if (ctx.vs.v[ut] != d.m[ut] - d.a[ut] - d.c_at(t - 1))
      return fail_with("reconstruction V_p(t) = M_t - A_t - C_{t-1} broken",
                       {{"t", std::to_string(t)}});
    if (!(d.a[ut] == RandomVar(ctx.n(), Rational(0))))
      return fail_with("left-jump compensator must vanish on the grid",
                       {{"t", std::to_string(t)}});
    if (d.delta_c[ut] != ctx.vs.v[ut] - ctx.vs.v_plus[ut])
      return fail_with("dC_t != V_p(t) - V_p+(t)", {{"t", std::to_string(t)}});
    if (!is_measurable(d.delta_c[ut], ctx.inst.filt.pre[t]))
      return fail_with("dC_t not measurable for pre[t]",
                       {{"t", std::to_string(t)}});
    for (std::size_t i = 0; i < ctx.n(); ++i)
      if (d.delta_c[ut][i] < 0)
        return fail_with("compensator decreases", {{"t", std::to_string(t)}});
    if (t < ctx.horizon() &&
        condexp(d.m[ut + 1], ctx.inst.filt.pre[t], ctx.inst.space) != d.m[ut])
      return fail_with("martingale part fails one-step martingality",
                       {{"t", std::to_string(t)}});
  }
  const CheckReport flat = flat_off_contact_check(d);
  if (!flat.ok)
    return fail_with("compensator grows off the contact set",
                     {{"detail", flat.detail}});
  if (!ctx.has_enumeration) return pass();
  const auto rep = check_supermartingale_system(d.m, ctx.inst, true, ctx.budget);
  if (!rep.ok)
    return fail_with("martingale part is not a martingale system",
                     {{"detail", rep.message(ctx.inst.space)}});
  return pass();
}

inline PropOutcome prop_4_9(const PropContext& ctx) {
  const MertensDecomposition d = decompose(ctx.vs);
  for (const auto& s : ctx.sample(ctx.all, 3)) {
    std::vector<StoppingTime> taus{tau_hat(ctx.vs, s)};
    for (const auto& alpha : default_alpha_probes())
      taus.push_back(tau_alpha(ctx.vs, s, alpha));
    for (const auto& tau : taus) {
      const CheckReport flat = flat_before(d, tau, s);
      if (!flat.ok)
        return fail_with("compensator grows before the penalized time",
                         {{"S", ctx.fmt(s)}, {"tau", ctx.fmt(tau)},
                          {"detail", flat.detail}});
      RandomVar c_before(ctx.n());
      for (std::size_t i = 0; i < ctx.n(); ++i)
        c_before[i] = d.c_at(tau[i] - 1)[i];
      const RandomVar lhs = condexp(aggregate(d.m, tau) - c_before,
                                    ctx.presig(s), ctx.inst.space);
      if (lhs != value_at(ctx.vs, s))
        return fail_with("V_p(S) != E[M_tau - A_tau - C_{tau-}|S-]",
                         {{"S", ctx.fmt(s)}, {"tau", ctx.fmt(tau)},
                          {"lhs", ctx.fmt(lhs)},
                          {"rhs", ctx.fmt(value_at(ctx.vs, s))}});
    }
  }
  return pass();
}

inline PropOutcome prop_4_10(const PropContext& ctx) {
  for (const auto& s : ctx.sample(ctx.all, 4)) {
    RepresentationReport rep;
    try {
      rep = representation_check(ctx.vs, s, ctx.budget);
    } catch (const InternalError& e) {
      return fail_with("representation check broke an invariant",
                       {{"S", ctx.fmt(s)}, {"error", e.what()}});
    }
    if (!rep.ok)
      return fail_with("value representation at tau_hat fails",
                       {{"S", ctx.fmt(s)}, {"detail", rep.detail},
                        {"tau^", ctx.fmt(rep.hat)},
                        {"lhs", ctx.fmt(rep.value_s)},
                        {"rhs", ctx.fmt(rep.conditional_reward_at_hat)},
                        {"H-", to_string(rep.h_minus_mass)},
                        {"H+", to_string(rep.h_plus_mass)}});
  }
  return pass();
}

}  // namespace props

// ---------------------------------------------------------------------------
// registry

struct PropertyDescriptor {
  std::string id;
  std::string anchor;       // the statement the property checks
  std::string quantifiers;  // its quantifier schedule
  bool not_modeled = false;
  bool needs_enumeration = true;
  std::function<PropOutcome(const props::PropContext&)> run;
};

inline const std::vector<PropertyDescriptor>& registry() {
  static const std::vector<PropertyDescriptor> regs = [] {
    std::vector<PropertyDescriptor> r;
    auto add = [&](std::string id, std::string anchor, std::string quant,
                   std::function<PropOutcome(const props::PropContext&)> fn,
                   bool needs_enum = true) {
      r.push_back({std::move(id), std::move(anchor), std::move(quant), false,
                   needs_enum, std::move(fn)});
    };
    add("P-2.2",
        "conditional reward families are closed under pairwise maximization "
        "via gluing",
        "S,theta sampled (<=3 each); strided pairs (<=48); plain and strict",
        props::prop_2_2);
    add("P-2.3", "optimizing sequences increase to the (strict) value",
        "S sampled (<=4); full enumeration fold; plain and strict",
        props::prop_2_3);
    add("P-2.4",
        "Bellman equation E[a V_p(theta)|S-] = sup E[a phi(tau)|S-], plain "
        "and strict",
        "S,theta sampled (<=3 each); alpha constants {1/4,1/2,3/4,9/10} plus "
        "indicator mixtures; work-capped",
        props::prop_2_4);
    add("P-2.6", "V^alpha(tau) = alpha V_p(tau), plain and strict",
        "S sampled (<=2); alpha probes; tau sampled (<=3); work-capped",
        props::prop_2_6);
    add("P-2.7",
        "localized values agree on {tau = tau~}; conditional reward beyond "
        "tau~ bounded by the strict value",
        "strided time pairs (<=12); work-capped", props::prop_2_7);
    add("P-2.8", "V^A(tau) = 1_A V_p(tau), plain and strict",
        "S sampled (<=2); A over pre-sigma blocks/complements; tau sampled",
        props::prop_2_8);
    add("P-rem.p", "V_p(tau) = V^A(tau) + V^{A^c}(tau)",
        "S sampled (<=2); A over pre-sigma blocks; tau sampled (<=3)",
        props::prop_rem_p);
    add("P-2.10",
        "value families are admissible: pre-measurable and consistent on "
        "{tau = tau'}",
        "all grid times; strided time pairs (<=64)", props::prop_2_10);
    add("P-2.11", "localization preserves predictable martingale systems",
        "S sampled (<=2); A over pre-sigma blocks (<=2); pairs sampled (8x8); "
        "martingale part always, value family when it is a martingale system",
        props::prop_2_11);
    add("P-2.12",
        "V_p and V_p+ are predictable supermartingale systems; V_p is the "
        "smallest one dominating the reward",
        "full pair enumeration within budget; 3 synthesized dominating "
        "systems",
        props::prop_2_12);
    add("P-2.13", "V_p(S) = phi(S) v V_p+(S)",
        "all grid times; aggregated S sampled (<=6)", props::prop_2_13,
        false);
    add("P-2.14", "E[V_p(tau)|S-] <= V_p+(S) on {tau > S}",
        "S sampled (<=6); tau sampled (<=6)", props::prop_2_14);
    add("P-3.6.1", "E[V_p(tau)|S-] <= E[V_p(S+)|S-] for tau strictly after S",
        "S sampled (<=6); strict tau sampled (<=4)", props::prop_3_6_1);
    add("P-3.6.2",
        "V_p+(S) <= E[V_p(S+)|S-], with equality before the horizon",
        "S sampled (<=8)", props::prop_3_6_2);
    add("P-3.7.1", "E[V_p(S+)|S-] <= V_p(S)", "S sampled (<=8)",
        props::prop_3_7_1);
    add("P-3.8.1", "V_p(S) = phi(S) v E[V_p(S+)|S-]", "S sampled (<=8)",
        props::prop_3_8_1);
    add("P-3.8.2",
        "V_p(S) - E[V_p(S+)|S-] vanishes off the contact set {V_p = phi}",
        "S sampled (<=8)", props::prop_3_8_2);
    add("P-3.11",
        "the projected right-limit family equals V_p+ and is a strong "
        "predictable supermartingale system",
        "all grid times; full pair enumeration within budget",
        props::prop_3_11);
    add("P-4.2",
        "optimality criterion: optimal <=> value touches reward and value is "
        "a martingale system up to tau*",
        "S sampled (<=3); tau* in {S, tau_hat, N} plus samples (<=3)",
        props::prop_4_2);
    add("P-4.3",
        "the martingale-interval class is closed under pairwise max; its "
        "essential supremum tau~ stays in it",
        "S sampled (<=3); closure pairs strided (<=128)", props::prop_4_3);
    add("P-4.6",
        "alpha-penalized times: covering inequality, monotone in alpha, "
        "stationary at tau_hat, class stable by pairwise min with essinf = "
        "scan",
        "S sampled (<=4); alpha in {1/4,1/2,3/4,9/10} plus 1-1/k walk",
        props::prop_4_6);
    add("P-4.7",
        "aggregation: backward (strict) values equal brute force at every "
        "enumerated predictable time",
        "every enumerated S within budget", props::prop_4_7);
    add("P-4.8",
        "Mertens reconstruction; A = 0 on the grid; dC = V_p - V_p+ >= 0, "
        "pre-measurable, flat off contact; M is a martingale system",
        "all grid times; full pair enumeration within budget",
        props::prop_4_8, false);
    add("P-4.9",
        "no compensator growth on [S, tau) for the penalized and contact "
        "times; V_p(S) = E[M_tau - A_tau - C_{tau-}|S-]",
        "S sampled (<=3); tau in {tau_hat} and the alpha probes",
        props::prop_4_9);
    add("P-4.10",
        "V_p(S) = E[phi(tau_hat)|S-]; E[phi(tau_hat)] attains the best "
        "expected reward; degenerate limit events carry no mass",
        "S sampled (<=4)", props::prop_4_10);

    auto add_unmodeled = [&](std::string id, std::string anchor) {
      r.push_back({std::move(id), std::move(anchor),
                   "out of scope on a finite grid", true, false, nullptr});
    };
    add_unmodeled("P-3.5-LL",
                  "left limits of supermartingale families along stopping "
                  "times (no strict left slot on this grid)");
    add_unmodeled("P-3.7.2",
                  "right-continuity-in-expectation equality (no strictly "
                  "decreasing grid sequences)");
    add_unmodeled("P-3.9",
                  "left-limit identity V_p(tau-) = phi(tau-) v V_p(tau) (no "
                  "strict left slot on this grid)");
    add_unmodeled("P-4.10-H",
                  "nondegenerate limit-event trichotomy (both side events are "
                  "empty on a finite grid)");
    return r;
  }();
  return regs;
}

// ---------------------------------------------------------------------------
// suite

inline PropertyReport run_suite_on(const ValueSystem& vs, std::size_t budget,
                                   const std::vector<std::string>& only = {}) {
  props::PropContext ctx{vs, vs.source, budget, false, {}, 0, {}, {}, {}};
  const std::string dig = digest(vs.source);
  ctx.seed = 0xcbf29ce484222325ULL;
  for (unsigned char c : dig) ctx.seed = (ctx.seed ^ c) * 1099511628211ULL;
  try {
    ctx.all = enumerate_predictable(
        vs.source.filt, StoppingTime::constant(vs.source.space.size(), 0),
        false, budget);
    ctx.has_enumeration = true;
  } catch (const BudgetExceeded&) {
    ctx.has_enumeration = false;
  }

  PropertyReport report;
  report.instance_digest = dig;
  report.budget = budget;
  for (const auto& desc : registry()) {
    if (!only.empty()) {
      bool wanted = false;
      for (const auto& id : only) wanted = wanted || id == desc.id;
      if (!wanted) continue;
    }
    PropertyResult res;
    res.id = desc.id;
    res.anchor = desc.anchor;
    res.quantifiers = desc.quantifiers;
    if (desc.not_modeled) {
      res.status = PropStatus::NotModeled;
    } else if (!ctx.has_enumeration && desc.needs_enumeration) {
      res.status = PropStatus::SkippedBudget;
    } else {
      try {
        const PropOutcome out = desc.run(ctx);
        res.status = out.status;
        res.witness = out.witness;
      } catch (const BudgetExceeded&) {
        res.status = PropStatus::SkippedBudget;
      } catch (const Error& e) {
        res.status = PropStatus::Fail;
        res.witness = PropertyWitness{"engine error", {{"error", e.what()}}};
      }
    }
    report.results.push_back(std::move(res));
  }
  return report;
}

inline PropertyReport run_suite(const Instance& inst, std::size_t budget,
                                const std::vector<std::string>& only = {}) {
  return run_suite_on(value_backward(inst), budget, only);
}

inline ordered_json report_to_json(const PropertyReport& report) {
  ordered_json doc;
  doc["digest"] = report.instance_digest;
  doc["budget"] = report.budget;
  doc["properties"] = ordered_json::array();
  for (const auto& r : report.results) {
    ordered_json p;
    p["id"] = r.id;
    p["anchor"] = r.anchor;
    p["quantifiers"] = r.quantifiers;
    p["status"] = to_string(r.status);
    if (r.witness) {
      ordered_json w;
      w["relation"] = r.witness->relation;
      for (const auto& [key, value] : r.witness->fields) w[key] = value;
      p["witness"] = w;
    }
    doc["properties"].push_back(p);
  }
  doc["summary"] = {{"pass", report.count(PropStatus::Pass)},
                    {"fail", report.count(PropStatus::Fail)},
                    {"skipped", report.count(PropStatus::SkippedBudget)},
                    {"not_modeled", report.count(PropStatus::NotModeled)}};
  return doc;
}

}  // namespace predsnell
