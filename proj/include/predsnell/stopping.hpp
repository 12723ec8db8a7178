#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "predsnell/errors.hpp"
#include "predsnell/space.hpp"

// Stopping times on the two-slot grid.
//
// Plain stopping:  {tau <= t} is an event of post[t] for every t.
// Predictable:     {tau = t} is an event of pre[t] for every t (announceable
//                  from strictly-before-t information). Constants are always
//                  predictable, and predictable implies plain stopping since
//                  the pre chain refines into the post chain.

namespace predsnell {

inline constexpr std::size_t kDefaultEnumBudget = 20000;

/// Outcome-indexed time map with values in [0, N].
struct StoppingTime {
  std::vector<int> time;

  StoppingTime() = default;
  explicit StoppingTime(std::vector<int> t) : time(std::move(t)) {}
  static StoppingTime constant(std::size_t n, int t) {
    return StoppingTime(std::vector<int>(n, t));
  }

  std::size_t size() const { return time.size(); }
  int operator[](std::size_t i) const { return time[i]; }
  int& operator[](std::size_t i) { return time[i]; }
  bool operator==(const StoppingTime&) const = default;
  bool operator<(const StoppingTime& o) const { return time < o.time; }
};

// event helpers ------------------------------------------------------------

inline OutcomeSet event_eq(const StoppingTime& tau, int t) {
  OutcomeSet s(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (tau[i] == t) s.insert(i);
  return s;
}

inline OutcomeSet event_le(const StoppingTime& tau, int t) {
  OutcomeSet s(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (tau[i] <= t) s.insert(i);
  return s;
}

inline OutcomeSet event_ge(const StoppingTime& tau, int t) {
  OutcomeSet s(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (tau[i] >= t) s.insert(i);
  return s;
}

inline OutcomeSet event_gt(const StoppingTime& tau, int t) {
  return event_ge(tau, t + 1);
}

inline OutcomeSet where_eq(const StoppingTime& a, const StoppingTime& b) {
  OutcomeSet s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] == b[i]) s.insert(i);
  return s;
}

inline OutcomeSet where_gt(const StoppingTime& a, const StoppingTime& b) {
  OutcomeSet s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) s.insert(i);
  return s;
}

inline bool leq_pointwise(const StoppingTime& a, const StoppingTime& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

// classification -----------------------------------------------------------

enum class TimeClass { NotStopping, Stopping, Predictable };

inline TimeClass classify(const StoppingTime& tau,
                          const TwoSlotFiltration& filt) {
  detail::require(tau.size() == filt.n_outcomes(),
                  "stopping time does not match the outcome set");
  for (std::size_t i = 0; i < tau.size(); ++i)
    detail::require(tau[i] >= 0 && tau[i] <= filt.horizon,
                    "stopping time value outside [0, N]");
  bool predictable = true;
  for (int t = 0; t <= filt.horizon && predictable; ++t)
    predictable = filt.pre[t].contains_event(event_eq(tau, t));
  if (predictable) return TimeClass::Predictable;
  for (int t = 0; t <= filt.horizon; ++t)
    if (!filt.post[t].contains_event(event_le(tau, t)))
      return TimeClass::NotStopping;
  return TimeClass::Stopping;
}

inline bool is_predictable(const StoppingTime& tau,
                           const TwoSlotFiltration& filt) {
  return classify(tau, filt) == TimeClass::Predictable;
}

inline bool is_stopping(const StoppingTime& tau,
                        const TwoSlotFiltration& filt) {
  return classify(tau, filt) != TimeClass::NotStopping;
}

// pre sigma-algebra ---------------------------------------------------------

/// The sigma-algebra of events strictly prior to a predictable tau, generated
/// by  { B & {tau > t} : B block of post[t], t < N }  and
///     { B & {tau >= t} : B block of pre[t], t <= N }.
/// For constant tau == t this collapses to pre[t] exactly.
inline Partition pre_sigma(const StoppingTime& tau,
                           const TwoSlotFiltration& filt) {
  detail::require(is_predictable(tau, filt),
                  "pre_sigma requires a predictable stopping time");
  const std::size_t n = filt.n_outcomes();
  std::vector<OutcomeSet> gens;
  for (int t = 0; t < filt.horizon; ++t) {
    const OutcomeSet after = event_gt(tau, t);
    for (std::size_t b = 0; b < filt.post[t].n_blocks(); ++b)
      gens.push_back(filt.post[t].block_set(b) & after);
  }
  for (int t = 0; t <= filt.horizon; ++t) {
    const OutcomeSet at_or_after = event_ge(tau, t);
    for (std::size_t b = 0; b < filt.pre[t].n_blocks(); ++b)
      gens.push_back(filt.pre[t].block_set(b) & at_or_after);
  }
  return generated_partition(n, gens);
}

// gluing and lattice ---------------------------------------------------------

/// Pointwise tau1 on A, tau2 off A. Classification of the result is the
/// caller's concern.
inline StoppingTime glue(const StoppingTime& tau1, const StoppingTime& tau2,
                         const OutcomeSet& a) {
  detail::require(tau1.size() == tau2.size() &&
                      a.universe_size() == tau1.size(),
                  "glue: size mismatch");
  StoppingTime out = tau2;
  for (std::size_t i = 0; i < tau1.size(); ++i)
    if (a.contains(i)) out[i] = tau1[i];
  return out;
}

inline StoppingTime pointwise_min(const StoppingTime& a,
                                  const StoppingTime& b) {
  StoppingTime out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::min(a[i], b[i]);
  return out;
}

inline StoppingTime pointwise_max(const StoppingTime& a,
                                  const StoppingTime& b) {
  StoppingTime out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::max(a[i], b[i]);
  return out;
}

/// (min, max) pair; both are predictable whenever the inputs are.
inline std::pair<StoppingTime, StoppingTime> lattice(const StoppingTime& a,
                                                     const StoppingTime& b) {
  return {pointwise_min(a, b), pointwise_max(a, b)};
}

// enumeration ----------------------------------------------------------------

/// Complete list of predictable tau with tau >= from pointwise, or, when
/// strict, tau > from on {from < N} and tau = N on {from = N}. Each time is
/// produced exactly once: recursing over t, the stop set {tau = t} ranges over
/// the unions of pre[t] blocks inside the still-active eligible region (the
/// region is itself pre[t]-measurable, so those are whole blocks). Output is
/// sorted lexicographically in outcome order. Throws BudgetExceeded rather
/// than truncating.
inline std::vector<StoppingTime> enumerate_predictable(
    const TwoSlotFiltration& filt, const StoppingTime& from, bool strict,
    std::size_t budget = kDefaultEnumBudget) {
  detail::require(is_predictable(from, filt),
                  "enumerate_predictable: 'from' must be predictable");
  const std::size_t n = filt.n_outcomes();
  const int N = filt.horizon;

  auto eligible_at = [&](int t) {
    OutcomeSet e(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int s = from[static_cast<std::size_t>(i)];
      const bool ok = strict ? (s < N ? t > s : t == N) : t >= s;
      if (ok) e.insert(i);
    }
    return e;
  };

  std::vector<StoppingTime> out;
  StoppingTime current = StoppingTime::constant(n, -1);

  auto emit = [&](const OutcomeSet& active) {
    StoppingTime tau = current;
    for (std::size_t i = 0; i < n; ++i)
      if (active.contains(i)) tau[i] = N;
    if (out.size() >= budget) throw BudgetExceeded(budget);
    out.push_back(std::move(tau));
  };

  auto rec = [&](auto&& self, int t, const OutcomeSet& active) -> void {
    if (t == N) {
      emit(active);  // whatever is still running stops at the horizon
      return;
    }
    const OutcomeSet room = active & eligible_at(t);
    std::vector<std::size_t> cand;
    for (std::size_t b = 0; b < filt.pre[t].n_blocks(); ++b)
      if (filt.pre[t].block_set(b).subset_of(room)) cand.push_back(b);
    detail::internal_check(cand.size() < 63, "enumeration: too many candidate blocks");
    const std::uint64_t limit = std::uint64_t{1} << cand.size();
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
      OutcomeSet next = active;
      for (std::size_t k = 0; k < cand.size(); ++k)
        if (mask & (std::uint64_t{1} << k))
          for (std::size_t i : filt.pre[t].block(cand[k])) {
            current[i] = t;
            next.erase(i);
          }
      self(self, t + 1, next);
      for (std::size_t i = 0; i < n; ++i)
        if (current[i] == t) current[i] = -1;
    }
  };

  rec(rec, 0, OutcomeSet::all(n));
  std::sort(out.begin(), out.end());
  return out;
}

// formatting -----------------------------------------------------------------

inline std::string format_time(const StoppingTime& tau,
                               const SampleSpace& space) {
  std::string s;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (i) s += ",";
    s += space.outcomes[i] + "=" + std::to_string(tau[i]);
  }
  return s;
}

}  // namespace predsnell
