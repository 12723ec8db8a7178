#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"
#include "predsnell/predsnell.hpp"

using namespace predsnell;

TEST_CASE("alpha-penalized times on the canonical instances") {
  const ValueSystem vs1 = value_backward(canonical_instance("E1"));
  const StoppingTime zero1 = StoppingTime::constant(1, 0);
  // t=0: 3/2 > 1 fails, t=1: 3/2 <= 3 holds
  CHECK(tau_alpha(vs1, zero1, Rational(1, 2)) == StoppingTime::constant(1, 1));
  // small enough alpha stops immediately: 3/4 <= 1
  CHECK(tau_alpha(vs1, zero1, Rational(1, 4)) == StoppingTime::constant(1, 0));

  const ValueSystem vs3 = value_backward(canonical_instance("E3"));
  const StoppingTime zero3 = StoppingTime::constant(2, 0);
  // t=0: 3/4 <= 0 fails, t=1: 3/4 <= 1 holds
  CHECK(tau_alpha(vs3, zero3, Rational(1, 2)) == StoppingTime::constant(2, 1));

  CHECK_THROWS_AS(tau_alpha(vs1, zero1, Rational(1)), InvalidInput);
  CHECK_THROWS_AS(tau_alpha(vs1, zero1, Rational(0)), InvalidInput);
  CHECK_THROWS_AS(tau_alpha(vs1, zero1, Rational(3, 2)), InvalidInput);
}

TEST_CASE("first contact times") {
  const ValueSystem vs1 = value_backward(canonical_instance("E1"));
  CHECK(tau_hat(vs1, StoppingTime::constant(1, 0)) ==
        StoppingTime::constant(1, 1));
  const ValueSystem vs3 = value_backward(canonical_instance("E3"));
  CHECK(tau_hat(vs3, StoppingTime::constant(2, 0)) ==
        StoppingTime::constant(2, 2));
  // contact at zero when the reward already meets the value
  const ValueSystem vs2 = value_backward(canonical_instance("E2"));
  CHECK(tau_hat(vs2, StoppingTime::constant(2, 0)) ==
        StoppingTime::constant(2, 0));
}

TEST_CASE("alpha walk is stationary at the contact time") {
  for (const char* name : {"E1", "E2", "E3"}) {
    const ValueSystem vs = value_backward(canonical_instance(name));
    const StoppingTime zero = StoppingTime::constant(vs.source.space.size(), 0);
    CHECK_NOTHROW(verify_alpha_stationarity(vs, zero));
  }
}

TEST_CASE("martingale intervals") {
  const ValueSystem vs = value_backward(canonical_instance("E1"));
  const StoppingTime zero = StoppingTime::constant(1, 0);
  CHECK(martingale_interval(vs, zero, zero));  // vacuous
  CHECK(martingale_interval(vs, zero, StoppingTime::constant(1, 1)));
  CHECK_FALSE(martingale_interval(vs, zero, StoppingTime::constant(1, 2)));
  CHECK_THROWS_AS(martingale_interval(vs, StoppingTime::constant(1, 1), zero),
                  InvalidInput);
}

TEST_CASE("one-step martingale intervals match the pairwise definition") {
  GenParams params;
  params.max_outcomes = 4;
  params.horizon = 3;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Instance inst = generate_random(seed, params);
    const ValueSystem vs = value_backward(inst);
    const auto all = enumerate_predictable(
        inst.filt, StoppingTime::constant(inst.space.size(), 0), false);
    const StoppingTime s = StoppingTime::constant(inst.space.size(), 0);
    const std::size_t step = std::max<std::size_t>(1, all.size() / 6);
    for (std::size_t k = 0; k < all.size(); k += step) {
      const StoppingTime& tau = all[k];
      // pairwise: every S <= t1 <= t2 <= tau keeps the conditional value
      bool pairwise = true;
      for (const auto& t1 : enumerate_predictable(inst.filt, s, false)) {
        if (!leq_pointwise(t1, tau)) continue;
        const Partition sigma1 = pre_sigma(t1, inst.filt);
        for (const auto& t2 : enumerate_predictable(inst.filt, t1, false)) {
          if (!leq_pointwise(t2, tau)) continue;
          if (condexp(value_at(vs, t2), sigma1, inst.space) !=
              value_at(vs, t1))
            pairwise = false;
        }
      }
      CHECK(martingale_interval(vs, s, tau) == pairwise);
    }
  }
}

TEST_CASE("optimality criterion on the canonical instances") {
  const ValueSystem vs1 = value_backward(canonical_instance("E1"));
  const StoppingTime zero1 = StoppingTime::constant(1, 0);
  const CriterionResult good =
      criterion_check(vs1, zero1, StoppingTime::constant(1, 1));
  CHECK(good.optimal);
  CHECK(good.cond1);
  CHECK(good.cond2);
  CHECK(good.expected_reward == Rational(3));

  const CriterionResult bad = criterion_check(vs1, zero1, zero1);
  CHECK_FALSE(bad.optimal);
  CHECK_FALSE(bad.cond1);  // value 3 exceeds reward 1 at zero
  CHECK(bad.expected_reward == Rational(1));
  CHECK(bad.best_expected == Rational(3));

  const ValueSystem vs3 = value_backward(canonical_instance("E3"));
  const CriterionResult gap = criterion_check(vs3, StoppingTime::constant(2, 0),
                                              StoppingTime::constant(2, 2));
  CHECK(gap.optimal);
  CHECK(gap.cond1);
  CHECK(gap.cond2);
  CHECK(gap.expected_reward == Rational(3, 2));
}

TEST_CASE("optimal sets and their essential suprema") {
  const ValueSystem vs1 = value_backward(canonical_instance("E1"));
  const auto set1 = optimal_set(vs1, StoppingTime::constant(1, 0));
  REQUIRE(set1.optimal_set.size() == 2);
  CHECK(set1.optimal_set[0] == StoppingTime::constant(1, 0));
  CHECK(set1.optimal_set[1] == StoppingTime::constant(1, 1));
  CHECK(set1.tau_tilde == StoppingTime::constant(1, 1));

  const ValueSystem vs3 = value_backward(canonical_instance("E3"));
  const auto set3 = optimal_set(vs3, StoppingTime::constant(2, 0));
  REQUIRE(set3.optimal_set.size() == 3);
  CHECK(set3.tau_tilde == StoppingTime::constant(2, 2));

  // constant rewards make every predictable time optimal
  Instance flat = canonical_instance("E3");
  for (auto& phi : flat.reward.per_time) phi = constant_var(2, Rational(1));
  const ValueSystem vsf = value_backward(flat);
  const auto setf = optimal_set(vsf, StoppingTime::constant(2, 0));
  CHECK(setf.optimal_set.size() ==
        enumerate_predictable(flat.filt, StoppingTime::constant(2, 0), false)
            .size());
  CHECK(setf.tau_tilde == StoppingTime::constant(2, 2));
}

TEST_CASE("value representation at the first contact time") {
  const ValueSystem vs1 = value_backward(canonical_instance("E1"));
  const auto rep1 = representation_check(vs1, StoppingTime::constant(1, 0));
  CHECK(rep1.ok);
  CHECK(rep1.expected_at_hat == Rational(3));
  CHECK(rep1.h_minus_mass == 0);
  CHECK(rep1.h_plus_mass == 0);

  const ValueSystem vs3 = value_backward(canonical_instance("E3"));
  const auto rep3 = representation_check(vs3, StoppingTime::constant(2, 0));
  CHECK(rep3.ok);
  CHECK(rep3.expected_at_hat == Rational(3, 2));

  Instance flat = canonical_instance("E2");
  for (auto& phi : flat.reward.per_time) phi = constant_var(2, Rational(4, 3));
  const auto repf = representation_check(value_backward(flat),
                                         StoppingTime::constant(2, 0));
  CHECK(repf.ok);
  CHECK(repf.expected_at_hat == Rational(4, 3));
}

TEST_CASE("optimal reports carry consistent pieces") {
  for (const char* name : {"E1", "E2", "E3"}) {
    const Instance inst = canonical_instance(name);
    const ValueSystem vs = value_backward(inst);
    const StoppingTime zero = StoppingTime::constant(inst.space.size(), 0);
    const OptimalReport rep = build_optimal_report(vs, zero);
    CHECK(rep.h_minus_mass == 0);
    CHECK(rep.h_plus_mass == 0);
    bool hat_found = false;
    for (const auto& tau : rep.attained_by)
      if (tau == rep.hat) hat_found = true;
    CHECK(hat_found);
    CHECK(rep.expected_value ==
          inst.space.expectation(value_at(vs, zero)));
    REQUIRE(rep.tau_alphas.size() == 4);
    for (std::size_t k = 1; k < rep.tau_alphas.size(); ++k)
      CHECK(leq_pointwise(rep.tau_alphas[k - 1].second,
                          rep.tau_alphas[k].second));
  }
}
