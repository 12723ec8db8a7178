#pragma once

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "predsnell/errors.hpp"
#include "predsnell/reward.hpp"

// Instance documents.
//
// {
//   "horizon": 2,
//   "outcomes": [{"id": "u", "prob": "1/2"}, ...],
//   "filtration": [{"t": 0, "pre": [["u","d"]], "post": [["u","d"]]}, ...],
//   "reward": [{"t": 0, "values": {"u": "0", "d": "0"}}, ...]
// }
//
// Rationals travel as strings "p/q" in lowest terms ("n" for integers);
// decimals are rejected. Serialization is canonical -- fixed key order,
// blocks ordered by first outcome, two-space indent -- so saving a loaded
// canonical document reproduces it byte for byte.

namespace predsnell {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace detail {

inline Rational parse_rational_at(const json& node, const std::string& path) {
  if (!node.is_string())
    throw InvalidInput("schema error at " + path +
                       ": expected a rational string like \"1/2\"");
  const auto parsed = parse_rational(node.get<std::string>());
  if (!parsed)
    throw InvalidInput("schema error at " + path + ": '" +
                       node.get<std::string>() +
                       "' is not a nonnegative rational \"p\" or \"p/q\"");
  return *parsed;
}

inline const json& member(const json& node, const char* key,
                          const std::string& path) {
  if (!node.is_object() || !node.contains(key))
    throw InvalidInput("schema error at " + path + ": missing member '" +
                       key + "'");
  return node.at(key);
}

inline Partition partition_from_json(const json& node, const SampleSpace& space,
                                     const std::string& path) {
  if (!node.is_array())
    throw InvalidInput("schema error at " + path + ": expected a block list");
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t b = 0; b < node.size(); ++b) {
    const json& blk = node[b];
    const std::string bpath = path + "/" + std::to_string(b);
    if (!blk.is_array())
      throw InvalidInput("schema error at " + bpath + ": expected a block");
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < blk.size(); ++k) {
      if (!blk[k].is_string())
        throw InvalidInput("schema error at " + bpath + "/" +
                           std::to_string(k) + ": expected an outcome id");
      const auto ix = space.index_of(blk[k].get<std::string>());
      if (!ix)
        throw InvalidInput("schema error at " + bpath + "/" +
                           std::to_string(k) + ": unknown outcome id '" +
                           blk[k].get<std::string>() + "'");
      members.push_back(*ix);
    }
    blocks.push_back(std::move(members));
  }
  try {
    return Partition::from_blocks(space.size(), blocks);
  } catch (const InvalidInput& e) {
    throw InvalidInput("schema error at " + path + ": " + e.what());
  }
}

}  // namespace detail

inline Instance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("schema error at /: expected an object");
  const json& horizon_node = detail::member(doc, "horizon", "/");
  if (!horizon_node.is_number_integer() || horizon_node.get<int>() < 0)
    throw InvalidInput("schema error at /horizon: expected an integer >= 0");
  const int N = horizon_node.get<int>();

  Instance inst;
  const json& outcomes = detail::member(doc, "outcomes", "/");
  if (!outcomes.is_array() || outcomes.empty())
    throw InvalidInput("schema error at /outcomes: expected a nonempty array");
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const std::string path = "/outcomes/" + std::to_string(i);
    const json& id = detail::member(outcomes[i], "id", path);
    if (!id.is_string())
      throw InvalidInput("schema error at " + path + "/id: expected a string");
    inst.space.outcomes.push_back(id.get<std::string>());
    inst.space.prob.push_back(detail::parse_rational_at(
        detail::member(outcomes[i], "prob", path), path + "/prob"));
  }

  inst.filt.horizon = N;
  const json& filtration = detail::member(doc, "filtration", "/");
  if (!filtration.is_array() ||
      filtration.size() != static_cast<std::size_t>(N) + 1)
    throw InvalidInput(
        "schema error at /filtration: expected one entry per time 0..N");
  for (std::size_t t = 0; t < filtration.size(); ++t) {
    const std::string path = "/filtration/" + std::to_string(t);
    const json& tt = detail::member(filtration[t], "t", path);
    if (!tt.is_number_integer() || tt.get<std::size_t>() != t)
      throw InvalidInput("schema error at " + path +
                         "/t: entries must be ordered 0..N");
    inst.filt.pre.push_back(detail::partition_from_json(
        detail::member(filtration[t], "pre", path), inst.space, path + "/pre"));
    inst.filt.post.push_back(detail::partition_from_json(
        detail::member(filtration[t], "post", path), inst.space,
        path + "/post"));
  }

  const json& reward = detail::member(doc, "reward", "/");
  if (!reward.is_array() || reward.size() != static_cast<std::size_t>(N) + 1)
    throw InvalidInput(
        "schema error at /reward: expected one entry per time 0..N");
  for (std::size_t t = 0; t < reward.size(); ++t) {
    const std::string path = "/reward/" + std::to_string(t);
    const json& tt = detail::member(reward[t], "t", path);
    if (!tt.is_number_integer() || tt.get<std::size_t>() != t)
      throw InvalidInput("schema error at " + path +
                         "/t: entries must be ordered 0..N");
    const json& values = detail::member(reward[t], "values", path);
    RandomVar phi(inst.space.size());
    std::vector<char> seen(inst.space.size(), 0);
    if (!values.is_object())
      throw InvalidInput("schema error at " + path +
                         "/values: expected an id -> rational map");
    for (const auto& [key, val] : values.items()) {
      const auto ix = inst.space.index_of(key);
      if (!ix)
        throw InvalidInput("schema error at " + path + "/values: unknown outcome id '" +
                           key + "'");
      phi[*ix] = detail::parse_rational_at(val, path + "/values/" + key);
      seen[*ix] = 1;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i])
        throw InvalidInput("schema error at " + path + "/values: missing outcome '" +
                           inst.space.outcomes[i] + "'");
    inst.reward.per_time.push_back(std::move(phi));
  }

  const ValidationReport rep = validate_instance(inst);
  if (!rep.ok()) throw InvalidInput("invalid instance: " + rep.summary());
  return inst;
}

inline ordered_json partition_to_json(const Partition& p,
                                      const SampleSpace& space) {
  ordered_json blocks = ordered_json::array();
  for (const auto& blk : p.blocks()) {
    ordered_json ids = ordered_json::array();
    for (std::size_t i : blk) ids.push_back(space.outcomes[i]);
    blocks.push_back(ids);
  }
  return blocks;
}

inline ordered_json instance_to_json(const Instance& inst) {
  ordered_json doc;
  doc["horizon"] = inst.filt.horizon;
  doc["outcomes"] = ordered_json::array();
  for (std::size_t i = 0; i < inst.space.size(); ++i)
    doc["outcomes"].push_back({{"id", inst.space.outcomes[i]},
                               {"prob", to_string(inst.space.prob[i])}});
  doc["filtration"] = ordered_json::array();
  for (int t = 0; t <= inst.filt.horizon; ++t)
    doc["filtration"].push_back(
        {{"t", t},
         {"pre", partition_to_json(inst.filt.pre[t], inst.space)},
         {"post", partition_to_json(inst.filt.post[t], inst.space)}});
  doc["reward"] = ordered_json::array();
  for (int t = 0; t <= inst.filt.horizon; ++t) {
    ordered_json values;
    for (std::size_t i = 0; i < inst.space.size(); ++i)
      values[inst.space.outcomes[i]] = to_string(inst.reward.at(t)[i]);
    doc["reward"].push_back({{"t", t}, {"values", values}});
  }
  return doc;
}

/// Canonical bytes of an instance document.
inline std::string save_string(const Instance& inst) {
  return instance_to_json(inst).dump(2) + "\n";
}

inline Instance load_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("not valid JSON: ") + e.what());
  }
  return instance_from_json(doc);
}

inline Instance load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_string(buf.str());
}

inline void save_file(const Instance& inst, const std::string& path) {
  const std::string payload = save_string(inst);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + tmp + "'");
    out << payload;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw InvalidInput("cannot move '" + tmp + "' into place");
}

/// FNV-1a of the canonical bytes; stable instance identifier.
inline std::string digest(const Instance& inst) {
  const std::string bytes = save_string(inst);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// canonical instances

/// E1 "deterministic": one outcome, N=2, rewards (1,3,2).
/// E2 "preslot-coin": fair coin revealed in the post slot of t=1 with the
///     reward using it -- an information jump at an announced time.
/// E3 "gap": the coin is revealed at the post slot of t=1, so no predictable
///     time can react before t=2; the predictable value 3/2 sits strictly
///     below the classical Snell value 2.
inline Instance canonical_instance(const std::string& name) {
  auto rv = [](std::initializer_list<int> xs) {
    RandomVar r;
    for (int x : xs) r.values.emplace_back(x);
    return r;
  };
  Instance inst;
  if (name == "E1") {
    inst.space.outcomes = {"w"};
    inst.space.prob = {Rational(1)};
    inst.filt.horizon = 2;
    const Partition triv = Partition::trivial(1);
    inst.filt.pre = {triv, triv, triv};
    inst.filt.post = {triv, triv, triv};
    inst.reward.per_time = {rv({1}), rv({3}), rv({2})};
    return inst;
  }
  if (name == "E2") {
    inst.space.outcomes = {"u", "d"};
    inst.space.prob = {Rational(1, 2), Rational(1, 2)};
    inst.filt.horizon = 1;
    const Partition triv = Partition::trivial(2);
    const Partition split = Partition::discrete(2);
    inst.filt.pre = {triv, split};
    inst.filt.post = {triv, split};
    inst.reward.per_time = {rv({1, 1}), rv({2, 0})};
    return inst;
  }
  if (name == "E3") {
    inst.space.outcomes = {"u", "d"};
    inst.space.prob = {Rational(1, 2), Rational(1, 2)};
    inst.filt.horizon = 2;
    const Partition triv = Partition::trivial(2);
    const Partition split = Partition::discrete(2);
    inst.filt.pre = {triv, triv, split};
    inst.filt.post = {triv, split, split};
    inst.reward.per_time = {rv({0, 0}), rv({1, 1}), rv({3, 0})};
    return inst;
  }
  throw InvalidInput("unknown canonical instance '" + name + "'");
}

// ---------------------------------------------------------------------------
// random instances

struct GenParams {
  int max_outcomes = 3;               // outcome count drawn from [1, max]
  int horizon = 3;                    // horizon drawn from [0, horizon]
  Rational qlc_violation_prob{1, 2};  // chance of a pre < post jump per time
  int reward_max = 4;                 // rewards are rationals in [0, reward_max]
};

namespace detail {

inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) {
  return n == 0 ? 0 : rng() % n;
}

inline bool bernoulli(std::mt19937_64& rng, const Rational& p) {
  const auto den = static_cast<std::uint64_t>(denominator(p));
  const auto num = static_cast<std::uint64_t>(numerator(p));
  return draw(rng, den) < num;
}

/// Splits each block of size >= 2 into two nonempty halves with prob 1/2
/// (always, when forced). Returns the refined partition.
inline Partition split_blocks(std::mt19937_64& rng, const Partition& p,
                              bool force_strict) {
  std::vector<std::size_t> ids(p.n_outcomes());
  std::size_t next = 0;
  bool split_any = false;
  std::size_t fallback_block = p.n_blocks();  // last splittable block, if any
  for (std::size_t b = 0; b < p.n_blocks(); ++b)
    if (p.block(b).size() >= 2) fallback_block = b;
  for (std::size_t b = 0; b < p.n_blocks(); ++b) {
    const auto& blk = p.block(b);
    const bool want_split =
        blk.size() >= 2 &&
        (draw(rng, 2) == 1 || (force_strict && !split_any && b == fallback_block));
    if (!want_split) {
      for (std::size_t i : blk) ids[i] = next;
      ++next;
      continue;
    }
    // first member anchors one half; the rest flip coins, with the last one
    // forced across if nobody else moved
    const std::size_t left = next++;
    const std::size_t right = next++;
    ids[blk.front()] = left;
    bool moved = false;
    for (std::size_t k = 1; k < blk.size(); ++k) {
      const bool go_right = (k + 1 == blk.size() && !moved) || draw(rng, 2) == 1;
      ids[blk[k]] = go_right ? right : left;
      moved = moved || go_right;
    }
    split_any = true;
  }
  return Partition::from_block_ids(ids);
}

/// A partition strictly between fine and coarse (coarse <= out < fine):
/// merges the children of at least one coarse block back together.
inline Partition merge_between(std::mt19937_64& rng, const Partition& coarse,
                               const Partition& fine) {
  std::vector<std::size_t> ids(fine.n_outcomes());
  std::size_t next = 0;
  bool merged_any = false;
  std::size_t fallback = coarse.n_blocks();  // last mergeable block
  for (std::size_t b = 0; b < coarse.n_blocks(); ++b) {
    const auto& blk = coarse.block(b);
    for (std::size_t i : blk)
      if (fine.block_index_of(i) != fine.block_index_of(blk.front()))
        fallback = b;
  }
  for (std::size_t b = 0; b < coarse.n_blocks(); ++b) {
    const auto& blk = coarse.block(b);
    bool children_differ = false;
    for (std::size_t i : blk)
      if (fine.block_index_of(i) != fine.block_index_of(blk.front()))
        children_differ = true;
    const bool merge_back =
        children_differ &&
        (draw(rng, 2) == 1 || (!merged_any && b == fallback));
    if (merge_back) {
      for (std::size_t i : blk) ids[i] = next;
      ++next;
      merged_any = true;
    } else {
      // keep the fine children of this block as they are
      std::vector<std::pair<std::size_t, std::size_t>> child_map;
      for (std::size_t i : blk) {
        const std::size_t f = fine.block_index_of(i);
        std::size_t assigned = next;
        for (const auto& [ff, id] : child_map)
          if (ff == f) assigned = id;
        if (assigned == next) {
          child_map.emplace_back(f, next);
          ++next;
        }
        ids[i] = assigned;
      }
    }
  }
  return Partition::from_block_ids(ids);
}

}  // namespace detail

/// Deterministic in the seed. Builds a random refinement chain (with an
/// information jump at each time with the given probability, where the chain
/// leaves room for one) and pre-measurable rewards. Always validates.
inline Instance generate_random(std::uint64_t seed, const GenParams& params) {
  detail::require(params.max_outcomes >= 1, "max_outcomes must be >= 1");
  detail::require(params.horizon >= 0, "horizon must be >= 0");
  detail::require(params.qlc_violation_prob >= 0 && params.qlc_violation_prob <= 1,
                  "qlc_violation_prob must lie in [0,1]");
  detail::require(params.reward_max >= 0, "reward_max must be >= 0");
  std::mt19937_64 rng(seed);

  Instance inst;
  const auto n = static_cast<std::size_t>(
      1 + detail::draw(rng, static_cast<std::uint64_t>(params.max_outcomes)));
  const int N = static_cast<int>(
      detail::draw(rng, static_cast<std::uint64_t>(params.horizon) + 1));
  for (std::size_t i = 0; i < n; ++i) {
    inst.space.outcomes.push_back("w" + std::to_string(i));
    inst.space.prob.emplace_back(1 + detail::draw(rng, 9));
  }
  Rational total = 0;
  for (const auto& w : inst.space.prob) total += w;
  for (auto& w : inst.space.prob) w /= total;

  inst.filt.horizon = N;
  const Partition triv = Partition::trivial(n);
  for (int t = 0; t <= N; ++t) {
    if (t == 0) {
      const bool jump = n >= 2 && detail::bernoulli(rng, params.qlc_violation_prob);
      inst.filt.pre.push_back(triv);
      inst.filt.post.push_back(jump ? detail::split_blocks(rng, triv, true)
                                    : triv);
      continue;
    }
    const Partition& prev_post = inst.filt.post.back();
    const Partition fine = detail::split_blocks(rng, prev_post, false);
    const bool can_jump = !(fine == prev_post);
    const bool jump =
        can_jump && detail::bernoulli(rng, params.qlc_violation_prob);
    inst.filt.pre.push_back(jump ? detail::merge_between(rng, prev_post, fine)
                                 : fine);
    inst.filt.post.push_back(fine);
  }

  for (int t = 0; t <= N; ++t) {
    RandomVar phi(n);
    const Partition& q = inst.filt.pre[t];
    for (std::size_t b = 0; b < q.n_blocks(); ++b) {
      const auto den = 1 + detail::draw(rng, 4);
      const auto num = detail::draw(
          rng, static_cast<std::uint64_t>(params.reward_max) * den + 1);
      const Rational value(num, den);
      for (std::size_t i : q.block(b)) phi[i] = value;
    }
    inst.reward.per_time.push_back(std::move(phi));
  }

  detail::internal_check(validate_instance(inst).ok(),
                         "generated instance failed validation");
  return inst;
}

}  // namespace predsnell
