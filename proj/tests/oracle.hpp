#pragma once

// Test-only oracles, kept independent of the engine's enumeration and
// backward-induction paths: stopping classes are recovered by filtering the
// full (N+1)^n grid of time maps through the definitions, and values are
// rebuilt directly from the essential-supremum definition.

#include <vector>

#include "predsnell/predsnell.hpp"

namespace oracle {

using namespace predsnell;

/// Every map outcomes -> {0..N}.
inline std::vector<StoppingTime> all_time_maps(std::size_t n, int horizon) {
  std::vector<StoppingTime> out;
  StoppingTime cur = StoppingTime::constant(n, 0);
  while (true) {
    out.push_back(cur);
    std::size_t i = 0;
    while (i < n && cur[i] == horizon) cur[i++] = 0;
    if (i == n) break;
    ++cur[i];
  }
  return out;
}

inline bool predictable_by_definition(const StoppingTime& tau,
                                      const TwoSlotFiltration& filt) {
  for (int t = 0; t <= filt.horizon; ++t)
    if (!filt.pre[t].contains_event(event_eq(tau, t))) return false;
  return true;
}

inline bool plain_stopping_by_definition(const StoppingTime& tau,
                                         const TwoSlotFiltration& filt) {
  for (int t = 0; t <= filt.horizon; ++t)
    if (!filt.post[t].contains_event(event_le(tau, t))) return false;
  return true;
}

inline bool in_class(const StoppingTime& tau, const StoppingTime& from,
                     bool strict, int horizon) {
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (strict) {
      if (from[i] < horizon ? tau[i] <= from[i] : tau[i] != horizon)
        return false;
    } else if (tau[i] < from[i]) {
      return false;
    }
  }
  return true;
}

/// The stopping class by definition: filter the full grid of time maps.
inline std::vector<StoppingTime> class_by_definition(
    const TwoSlotFiltration& filt, const StoppingTime& from, bool strict) {
  std::vector<StoppingTime> out;
  for (const auto& tau : all_time_maps(from.size(), filt.horizon))
    if (predictable_by_definition(tau, filt) &&
        in_class(tau, from, strict, filt.horizon))
      out.push_back(tau);
  std::sort(out.begin(), out.end());
  return out;
}

/// The value straight from its definition, over the definitional class.
inline RandomVar value_by_definition(const Instance& inst,
                                     const StoppingTime& from, bool strict) {
  const Partition sigma = pre_sigma(from, inst.filt);
  RandomVar best(inst.space.size(), Rational(0));
  bool first = true;
  for (const auto& tau : class_by_definition(inst.filt, from, strict)) {
    const RandomVar ce =
        condexp(eval_at(inst.reward, tau, inst.filt), sigma, inst.space);
    best = first ? ce : pointwise_max(best, ce);
    first = false;
  }
  return best;
}

}  // namespace oracle
