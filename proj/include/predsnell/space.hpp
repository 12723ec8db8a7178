#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "predsnell/errors.hpp"
#include "predsnell/rational.hpp"

// Finite filtered probability space in the two-slot model.
//
// A finite sigma-algebra is represented by the partition of its atoms, so
// measurability is a constancy check and the essential supremum of a finite
// family is a pointwise maximum. Each grid time t carries two partitions:
// pre[t] (information strictly before t) and post[t] (information at t),
// chained  pre[0] <= post[0] <= pre[1] <= ... <= pre[N] <= post[N]
// where "<=" reads "coarser than". A strictly finer post[t] than pre[t] is an
// information jump at the announced time t.

namespace predsnell {

// ---------------------------------------------------------------------------
// outcome sets

/// Subset of the outcome indices {0..n-1} of a sample space.
class OutcomeSet {
 public:
  OutcomeSet() = default;
  explicit OutcomeSet(std::size_t n, bool full = false)
      : in_(n, full ? 1 : 0) {}

  static OutcomeSet none(std::size_t n) { return OutcomeSet(n, false); }
  static OutcomeSet all(std::size_t n) { return OutcomeSet(n, true); }
  static OutcomeSet of(std::size_t n, std::initializer_list<std::size_t> ix) {
    OutcomeSet s(n);
    for (auto i : ix) s.insert(i);
    return s;
  }

  std::size_t universe_size() const { return in_.size(); }
  bool contains(std::size_t i) const { return in_[i] != 0; }
  void insert(std::size_t i) { in_[i] = 1; }
  void erase(std::size_t i) { in_[i] = 0; }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(in_.begin(), in_.end(), 1));
  }
  bool empty() const { return count() == 0; }
  bool full() const { return count() == in_.size(); }

  OutcomeSet complement() const {
    OutcomeSet s(in_.size());
    for (std::size_t i = 0; i < in_.size(); ++i) s.in_[i] = in_[i] ? 0 : 1;
    return s;
  }
  bool subset_of(const OutcomeSet& o) const {
    for (std::size_t i = 0; i < in_.size(); ++i)
      if (in_[i] && !o.in_[i]) return false;
    return true;
  }
  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> ix;
    for (std::size_t i = 0; i < in_.size(); ++i)
      if (in_[i]) ix.push_back(i);
    return ix;
  }

  friend OutcomeSet operator&(const OutcomeSet& a, const OutcomeSet& b) {
    OutcomeSet s(a.in_.size());
    for (std::size_t i = 0; i < a.in_.size(); ++i)
      s.in_[i] = (a.in_[i] && b.in_[i]) ? 1 : 0;
    return s;
  }
  friend OutcomeSet operator|(const OutcomeSet& a, const OutcomeSet& b) {
    OutcomeSet s(a.in_.size());
    for (std::size_t i = 0; i < a.in_.size(); ++i)
      s.in_[i] = (a.in_[i] || b.in_[i]) ? 1 : 0;
    return s;
  }
  friend OutcomeSet operator-(const OutcomeSet& a, const OutcomeSet& b) {
    OutcomeSet s(a.in_.size());
    for (std::size_t i = 0; i < a.in_.size(); ++i)
      s.in_[i] = (a.in_[i] && !b.in_[i]) ? 1 : 0;
    return s;
  }
  bool operator==(const OutcomeSet&) const = default;

 private:
  std::vector<char> in_;
};

// ---------------------------------------------------------------------------
// random variables

/// Outcome-indexed vector of exact rationals.
struct RandomVar {
  std::vector<Rational> values;

  RandomVar() = default;
  explicit RandomVar(std::size_t n, const Rational& fill = Rational(0))
      : values(n, fill) {}
  RandomVar(std::initializer_list<Rational> vs) : values(vs) {}

  std::size_t size() const { return values.size(); }
  Rational& operator[](std::size_t i) { return values[i]; }
  const Rational& operator[](std::size_t i) const { return values[i]; }
  bool operator==(const RandomVar&) const = default;
};

inline RandomVar constant_var(std::size_t n, const Rational& c) {
  return RandomVar(n, c);
}

inline RandomVar indicator(const OutcomeSet& a) {
  RandomVar x(a.universe_size());
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = a.contains(i) ? 1 : 0;
  return x;
}

inline RandomVar pointwise_max(const RandomVar& a, const RandomVar& b) {
  RandomVar r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

inline RandomVar pointwise_min(const RandomVar& a, const RandomVar& b) {
  RandomVar r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::min(a[i], b[i]);
  return r;
}

inline RandomVar operator+(const RandomVar& a, const RandomVar& b) {
  RandomVar r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline RandomVar operator-(const RandomVar& a, const RandomVar& b) {
  RandomVar r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

/// Pointwise product.
inline RandomVar operator*(const RandomVar& a, const RandomVar& b) {
  RandomVar r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
  return r;
}

inline RandomVar operator*(const Rational& c, const RandomVar& a) {
  RandomVar r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline bool leq_everywhere(const RandomVar& a, const RandomVar& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

inline bool leq_on(const RandomVar& a, const RandomVar& b,
                   const OutcomeSet& where) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (where.contains(i) && a[i] > b[i]) return false;
  return true;
}

inline bool equal_on(const RandomVar& a, const RandomVar& b,
                     const OutcomeSet& where) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (where.contains(i) && a[i] != b[i]) return false;
  return true;
}

inline OutcomeSet where_equal(const RandomVar& a, const RandomVar& b) {
  OutcomeSet s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] == b[i]) s.insert(i);
  return s;
}

// ---------------------------------------------------------------------------
// sample space

/// Finite outcome set with strictly positive rational probabilities.
/// With no null outcomes, "almost surely" means "for every outcome".
struct SampleSpace {
  std::vector<std::string> outcomes;  // unique ids, fixed order
  std::vector<Rational> prob;         // aligned with outcomes

  std::size_t size() const { return outcomes.size(); }

  std::optional<std::size_t> index_of(std::string_view id) const {
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      if (outcomes[i] == id) return i;
    return std::nullopt;
  }

  Rational prob_of(const OutcomeSet& a) const {
    Rational p = 0;
    for (std::size_t i = 0; i < prob.size(); ++i)
      if (a.contains(i)) p += prob[i];
    return p;
  }

  Rational expectation(const RandomVar& x) const {
    Rational e = 0;
    for (std::size_t i = 0; i < prob.size(); ++i) e += prob[i] * x[i];
    return e;
  }
};

// ---------------------------------------------------------------------------
// partitions

/// Partition of {0..n-1} into disjoint nonempty blocks; the atoms of a finite
/// sigma-algebra. Canonical form: blocks ordered by smallest member, members
/// ascending, so equality of partitions is structural equality.
class Partition {
 public:
  Partition() = default;

  static Partition trivial(std::size_t n) {
    return from_block_ids(std::vector<std::size_t>(n, 0));
  }

  static Partition discrete(std::size_t n) {
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    return from_block_ids(ids);
  }

  /// Builds from explicit blocks; throws InvalidInput unless the blocks are
  /// nonempty, pairwise disjoint and cover {0..n-1}.
  static Partition from_blocks(std::size_t n,
                               const std::vector<std::vector<std::size_t>>& blocks) {
    std::vector<std::size_t> ids(n, n);  // n = unassigned marker
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      detail::require(!blocks[b].empty(), "blocks not a partition: empty block");
      for (std::size_t i : blocks[b]) {
        detail::require(i < n, "blocks not a partition: outcome index out of range");
        detail::require(ids[i] == n, "blocks not a partition: blocks overlap");
        ids[i] = b;
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      detail::require(ids[i] != n, "blocks not a partition: outcomes not covered");
    return from_block_ids(ids);
  }

  /// Builds from an outcome -> block-id map (ids arbitrary, renumbered).
  static Partition from_block_ids(const std::vector<std::size_t>& raw) {
    Partition p;
    const std::size_t n = raw.size();
    p.block_of_.assign(n, 0);
    std::vector<std::size_t> seen;  // raw id -> canonical id, by first occurrence
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t canon = seen.size();
      for (std::size_t k = 0; k < seen.size(); ++k)
        if (seen[k] == raw[i]) { canon = k; break; }
      if (canon == seen.size()) {
        seen.push_back(raw[i]);
        p.blocks_.emplace_back();
      }
      p.block_of_[i] = canon;
      p.blocks_[canon].push_back(i);
    }
    return p;
  }

  std::size_t n_outcomes() const { return block_of_.size(); }
  std::size_t n_blocks() const { return blocks_.size(); }
  std::size_t block_index_of(std::size_t outcome) const { return block_of_[outcome]; }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  const std::vector<std::size_t>& block(std::size_t b) const { return blocks_[b]; }

  OutcomeSet block_set(std::size_t b) const {
    OutcomeSet s(n_outcomes());
    for (std::size_t i : blocks_[b]) s.insert(i);
    return s;
  }

  bool is_trivial() const { return blocks_.size() <= 1; }

  /// True when *this is finer than (or equal to) `coarser`: every block of
  /// *this lies inside a single block of `coarser`.
  bool refines(const Partition& coarser) const {
    for (const auto& blk : blocks_) {
      const std::size_t target = coarser.block_of_[blk.front()];
      for (std::size_t i : blk)
        if (coarser.block_of_[i] != target) return false;
    }
    return true;
  }

  /// True when `a` is a union of blocks (an event of this sigma-algebra).
  bool contains_event(const OutcomeSet& a) const {
    for (const auto& blk : blocks_) {
      const bool first = a.contains(blk.front());
      for (std::size_t i : blk)
        if (a.contains(i) != first) return false;
    }
    return true;
  }

  bool operator==(const Partition&) const = default;

 private:
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> block_of_;
};

/// Coarsest partition making every input set a union of blocks: outcomes are
/// grouped by their membership signature across the sets (the atoms of the
/// generated sigma-algebra).
inline Partition generated_partition(std::size_t n,
                                     const std::vector<OutcomeSet>& sets) {
  std::vector<std::vector<char>> sig(n);
  for (std::size_t i = 0; i < n; ++i) {
    sig[i].reserve(sets.size());
    for (const auto& s : sets) sig[i].push_back(s.contains(i) ? 1 : 0);
  }
  std::vector<std::size_t> ids(n, 0);
  std::vector<std::size_t> reps;  // representative outcome per class
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cls = reps.size();
    for (std::size_t k = 0; k < reps.size(); ++k)
      if (sig[reps[k]] == sig[i]) { cls = k; break; }
    if (cls == reps.size()) reps.push_back(i);
    ids[i] = cls;
  }
  return Partition::from_block_ids(ids);
}

/// Join: the common refinement (sigma-algebra generated by both).
inline Partition partition_join(const Partition& a, const Partition& b) {
  const std::size_t n = a.n_outcomes();
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i)
    ids[i] = a.block_index_of(i) * b.n_blocks() + b.block_index_of(i);
  return Partition::from_block_ids(ids);
}

/// Meet: the intersection sigma-algebra. Its atoms are the connected
/// components of the overlap graph of the two block systems.
inline Partition partition_meet(const Partition& a, const Partition& b) {
  const std::size_t n = a.n_outcomes();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) { parent[x] = parent[parent[x]]; x = parent[x]; }
    return x;
  };
  auto unite = [&](std::size_t x, std::size_t y) { parent[find(x)] = find(y); };
  for (const Partition* p : {&a, &b})
    for (const auto& blk : p->blocks())
      for (std::size_t k = 1; k < blk.size(); ++k) unite(blk[0], blk[k]);
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = find(i);
  return Partition::from_block_ids(ids);
}

// ---------------------------------------------------------------------------
// conditional expectation, measurability

/// E[x | b]: on each block, the probability-weighted average. Exact.
inline RandomVar condexp(const RandomVar& x, const Partition& b,
                         const SampleSpace& space) {
  RandomVar out(x.size());
  for (const auto& blk : b.blocks()) {
    Rational num = 0, den = 0;
    for (std::size_t i : blk) {
      num += space.prob[i] * x[i];
      den += space.prob[i];
    }
    const Rational v = num / den;
    for (std::size_t i : blk) out[i] = v;
  }
  return out;
}

/// True iff x is constant on every block of b.
inline bool is_measurable(const RandomVar& x, const Partition& b) {
  for (const auto& blk : b.blocks())
    for (std::size_t i : blk)
      if (x[i] != x[blk.front()]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// two-slot filtration

struct TwoSlotFiltration {
  int horizon = 0;              // N >= 0; grid times are 0..N
  std::vector<Partition> pre;   // Q_0..Q_N, information strictly before t
  std::vector<Partition> post;  // P_0..P_N, information at t

  std::size_t n_outcomes() const {
    return pre.empty() ? 0 : pre.front().n_outcomes();
  }

  /// Times where the pre-partition is strictly coarser than the post one,
  /// i.e. where quasi-left-continuity fails.
  std::vector<int> jump_times() const {
    std::vector<int> ts;
    for (int t = 0; t <= horizon; ++t)
      if (pre[t].n_blocks() < post[t].n_blocks()) ts.push_back(t);
    return ts;
  }
};

// ---------------------------------------------------------------------------
// validation

struct ValidationIssue {
  std::string message;
  int time = -1;                      // grid time, -1 when not applicable
  std::vector<std::string> outcomes;  // offending block/outcomes, if any
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < issues.size(); ++k) {
      if (k) os << "; ";
      os << issues[k].message;
    }
    return os.str();
  }
};

/// Checks every space and filtration invariant; returns the complete list of
/// violations rather than stopping at the first.
inline ValidationReport validate_space(const SampleSpace& space,
                                       const TwoSlotFiltration& filt) {
  ValidationReport rep;
  auto add = [&](std::string msg, int t = -1,
                 std::vector<std::string> outs = {}) {
    rep.issues.push_back({std::move(msg), t, std::move(outs)});
  };

  const std::size_t n = space.size();
  if (space.prob.size() != n) {
    add("probability vector size does not match outcome count");
    return rep;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (space.outcomes[i] == space.outcomes[j])
        add("duplicate outcome id '" + space.outcomes[i] + "'");
  Rational total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (space.prob[i] <= 0)
      add("nonpositive probability for outcome '" + space.outcomes[i] + "'",
          -1, {space.outcomes[i]});
    total += space.prob[i];
  }
  if (total != 1) add("probabilities sum to " + to_string(total));

  if (filt.horizon < 0) {
    add("horizon is negative");
    return rep;
  }
  const auto expected = static_cast<std::size_t>(filt.horizon) + 1;
  if (filt.pre.size() != expected || filt.post.size() != expected) {
    add("filtration does not provide one pre and one post partition per time");
    return rep;
  }
  for (std::size_t t = 0; t < expected; ++t)
    if (filt.pre[t].n_outcomes() != n || filt.post[t].n_outcomes() != n) {
      add("partition at t=" + std::to_string(t) +
              " does not cover the outcome set",
          static_cast<int>(t));
      return rep;
    }

  if (!filt.pre[0].is_trivial()) add("Q_0 is not the trivial partition", 0);
  for (int t = 0; t <= filt.horizon; ++t) {
    if (!filt.post[t].refines(filt.pre[t]))
      add("refinement chain broken at t=" + std::to_string(t) +
              " (pre-partition not coarser than post-partition)",
          t);
    if (t > 0 && !filt.pre[t].refines(filt.post[t - 1]))
      add("refinement chain broken at t=" + std::to_string(t) +
              " (pre-partition does not refine the previous post-partition)",
          t);
  }
  return rep;
}

/// Small pass/fail report used by the flatness and system checks.
struct CheckReport {
  bool ok = true;
  std::string detail;  // empty when ok
};

}  // namespace predsnell
