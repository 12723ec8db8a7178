#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "oracle.hpp"
#include "predsnell/predsnell.hpp"

using namespace predsnell;

TEST_CASE("classification of the canonical examples") {
  const Instance e2 = canonical_instance("E2");
  const Instance e3 = canonical_instance("E3");

  for (int t = 0; t <= 2; ++t)
    CHECK(classify(StoppingTime::constant(2, t), e3.filt) ==
          TimeClass::Predictable);

  // revealed only in the post slot of t=1: plain stopping, not announceable
  CHECK(classify(StoppingTime({2, 1}), e3.filt) == TimeClass::Stopping);

  // not even adapted: {tau = 0} is invisible at time 0
  CHECK(classify(StoppingTime({1, 0}), e2.filt) == TimeClass::NotStopping);

  CHECK_THROWS_AS(classify(StoppingTime({5, 0}), e2.filt), InvalidInput);
}

TEST_CASE("classification agrees with the definitions on random instances") {
  GenParams params;
  params.max_outcomes = 4;
  params.horizon = 3;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = generate_random(seed, params);
    for (const auto& tau :
         oracle::all_time_maps(inst.space.size(), inst.filt.horizon)) {
      const TimeClass cls = classify(tau, inst.filt);
      CHECK((cls == TimeClass::Predictable) ==
            oracle::predictable_by_definition(tau, inst.filt));
      CHECK((cls != TimeClass::NotStopping) ==
            oracle::plain_stopping_by_definition(tau, inst.filt));
    }
  }
}

TEST_CASE("pre_sigma collapses to pre[t] at constant times") {
  GenParams params;
  params.max_outcomes = 5;
  params.horizon = 3;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = generate_random(seed, params);
    for (int t = 0; t <= inst.filt.horizon; ++t)
      CHECK(pre_sigma(StoppingTime::constant(inst.space.size(), t),
                      inst.filt) == inst.filt.pre[t]);
  }
  const Instance e3 = canonical_instance("E3");
  CHECK(pre_sigma(StoppingTime::constant(2, 2), e3.filt) ==
        Partition::discrete(2));
  const Instance e1 = canonical_instance("E1");
  CHECK(pre_sigma(StoppingTime::constant(1, 1), e1.filt) ==
        Partition::trivial(1));
}

TEST_CASE("pre_sigma rejects non-predictable times") {
  const Instance e3 = canonical_instance("E3");
  CHECK_THROWS_AS(pre_sigma(StoppingTime({2, 1}), e3.filt), InvalidInput);
}

TEST_CASE("enumeration matches the definitional class") {
  GenParams params;
  params.max_outcomes = 4;
  params.horizon = 3;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Instance inst = generate_random(seed, params);
    const auto all = enumerate_predictable(
        inst.filt, StoppingTime::constant(inst.space.size(), 0), false);
    // spot-check the classes from a few base times
    std::vector<StoppingTime> bases{
        StoppingTime::constant(inst.space.size(), 0)};
    if (all.size() > 2) bases.push_back(all[all.size() / 2]);
    bases.push_back(all.back());
    for (const auto& base : bases) {
      for (bool strict : {false, true}) {
        const auto got = enumerate_predictable(inst.filt, base, strict);
        const auto want = oracle::class_by_definition(inst.filt, base, strict);
        REQUIRE(got.size() == want.size());
        for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == want[k]);
        // no duplicates, sorted
        std::set<std::vector<int>> uniq;
        for (const auto& tau : got) uniq.insert(tau.time);
        CHECK(uniq.size() == got.size());
      }
    }
  }
}

TEST_CASE("enumeration of the canonical instances") {
  const Instance e1 = canonical_instance("E1");
  const auto taus1 =
      enumerate_predictable(e1.filt, StoppingTime::constant(1, 0), false);
  REQUIRE(taus1.size() == 3);  // one outcome: the three constants
  for (int t = 0; t <= 2; ++t) CHECK(taus1[t] == StoppingTime::constant(1, t));

  // trivial pre-partitions at t=0,1 leave only the constants
  const Instance e3 = canonical_instance("E3");
  const auto taus3 =
      enumerate_predictable(e3.filt, StoppingTime::constant(2, 0), false);
  REQUIRE(taus3.size() == 3);
  for (int t = 0; t <= 2; ++t) CHECK(taus3[t] == StoppingTime::constant(2, t));

  const Instance e2 = canonical_instance("E2");
  const auto at_horizon =
      enumerate_predictable(e2.filt, StoppingTime::constant(2, 1), false);
  REQUIRE(at_horizon.size() == 1);
  CHECK(at_horizon[0] == StoppingTime::constant(2, 1));
}

TEST_CASE("enumeration classes contain the base and the horizon time") {
  GenParams params;
  params.max_outcomes = 4;
  params.horizon = 3;
  for (std::uint64_t seed = 30; seed <= 40; ++seed) {
    const Instance inst = generate_random(seed, params);
    const auto all = enumerate_predictable(
        inst.filt, StoppingTime::constant(inst.space.size(), 0), false);
    for (const auto& base : {all.front(), all[all.size() / 2], all.back()}) {
      const auto got = enumerate_predictable(inst.filt, base, false);
      std::set<std::vector<int>> members;
      for (const auto& tau : got) members.insert(tau.time);
      CHECK(members.count(base.time) == 1);
      CHECK(members.count(
                StoppingTime::constant(inst.space.size(), inst.filt.horizon)
                    .time) == 1);
      const auto strict = enumerate_predictable(inst.filt, base, true);
      for (const auto& tau : strict) CHECK(members.count(tau.time) == 1);
    }
  }
}

TEST_CASE("enumeration budget errors instead of truncating") {
  const Instance e1 = canonical_instance("E1");
  CHECK_THROWS_AS(enumerate_predictable(e1.filt, StoppingTime::constant(1, 0),
                                        false, 2),
                  BudgetExceeded);
}

TEST_CASE("glue and lattice") {
  const Instance e3 = canonical_instance("E3");
  const StoppingTime two = StoppingTime::constant(2, 2);
  const StoppingTime one = StoppingTime::constant(2, 1);
  CHECK(glue(two, one, OutcomeSet::all(2)) == two);
  CHECK(glue(two, one, OutcomeSet::none(2)) == one);
  const StoppingTime mixed = glue(two, one, OutcomeSet::of(2, {0}));
  CHECK(mixed == StoppingTime({2, 1}));

  CHECK(pointwise_max(mixed, mixed) == mixed);
  const auto [lo, hi] = lattice(StoppingTime::constant(2, 0), two);
  CHECK(lo == StoppingTime::constant(2, 0));
  CHECK(hi == two);
  CHECK(pointwise_max(one, mixed) == StoppingTime({2, 1}));
}

TEST_CASE("lattice and gluing preserve predictability") {
  GenParams params;
  params.max_outcomes = 4;
  params.horizon = 3;
  for (std::uint64_t seed = 50; seed <= 62; ++seed) {
    const Instance inst = generate_random(seed, params);
    const auto all = enumerate_predictable(
        inst.filt, StoppingTime::constant(inst.space.size(), 0), false);
    const std::size_t step = std::max<std::size_t>(1, all.size() / 6);
    for (std::size_t i = 0; i < all.size(); i += step)
      for (std::size_t j = 0; j < all.size(); j += step) {
        const StoppingTime lo = pointwise_min(all[i], all[j]);
        const StoppingTime hi = pointwise_max(all[i], all[j]);
        CHECK(is_predictable(lo, inst.filt));
        CHECK(is_predictable(hi, inst.filt));
        // gluing along any event of pre_sigma(min) stays predictable
        const Partition sigma = pre_sigma(lo, inst.filt);
        for (std::size_t b = 0; b < sigma.n_blocks(); ++b)
          CHECK(is_predictable(glue(all[i], all[j], sigma.block_set(b)),
                               inst.filt));
      }
  }
}

TEST_CASE("pre_sigma of a minimum is the meet of the pre sigma-algebras") {
  GenParams params;
  params.max_outcomes = 4;
  params.horizon = 3;
  for (std::uint64_t seed = 70; seed <= 82; ++seed) {
    const Instance inst = generate_random(seed, params);
    const auto all = enumerate_predictable(
        inst.filt, StoppingTime::constant(inst.space.size(), 0), false);
    const std::size_t step = std::max<std::size_t>(1, all.size() / 6);
    for (std::size_t i = 0; i < all.size(); i += step)
      for (std::size_t j = 0; j < all.size(); j += step) {
        const Partition meet = partition_meet(pre_sigma(all[i], inst.filt),
                                              pre_sigma(all[j], inst.filt));
        CHECK(pre_sigma(pointwise_min(all[i], all[j]), inst.filt) == meet);
      }
  }
}

TEST_CASE("stopping events are pre_sigma(tau) events") {
  GenParams params;
  params.max_outcomes = 5;
  params.horizon = 3;
  for (std::uint64_t seed = 90; seed <= 100; ++seed) {
    const Instance inst = generate_random(seed, params);
    const auto all = enumerate_predictable(
        inst.filt, StoppingTime::constant(inst.space.size(), 0), false);
    const std::size_t step = std::max<std::size_t>(1, all.size() / 8);
    for (std::size_t i = 0; i < all.size(); i += step) {
      const Partition sigma = pre_sigma(all[i], inst.filt);
      for (int t = 0; t <= inst.filt.horizon; ++t) {
        CHECK(sigma.contains_event(event_eq(all[i], t)));
        CHECK(sigma.contains_event(event_gt(all[i], t)));
        // the trace of pre_sigma(tau) on {tau = t} is the trace of pre[t]
        const OutcomeSet stopped = event_eq(all[i], t);
        for (std::size_t b = 0; b < sigma.n_blocks(); ++b)
          if (sigma.block_set(b).subset_of(stopped))
            CHECK(inst.filt.pre[t].contains_event(sigma.block_set(b)));
        for (std::size_t b = 0; b < inst.filt.pre[t].n_blocks(); ++b)
          if (inst.filt.pre[t].block_set(b).subset_of(stopped))
            CHECK(sigma.contains_event(inst.filt.pre[t].block_set(b)));
      }
    }
  }
}
