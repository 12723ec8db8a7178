#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "predsnell/predsnell.hpp"

using namespace predsnell;

TEST_CASE("registry shape") {
  const auto& regs = registry();
  std::size_t modeled = 0;
  std::set<std::string> ids;
  for (const auto& d : regs) {
    CHECK(ids.insert(d.id).second);  // unique ids
    CHECK_FALSE(d.anchor.empty());
    CHECK_FALSE(d.quantifiers.empty());
    if (!d.not_modeled) {
      ++modeled;
      CHECK(d.run != nullptr);
    }
  }
  CHECK(modeled >= 20);
  CHECK(regs.size() >= modeled + 4);
}

TEST_CASE("the suite passes on the canonical instances") {
  for (const char* name : {"E1", "E2", "E3"}) {
    const PropertyReport rep = run_suite(canonical_instance(name), 20000);
    INFO("instance " << name);
    CHECK(rep.count(PropStatus::Fail) == 0);
    CHECK(rep.count(PropStatus::SkippedBudget) == 0);
    CHECK(rep.count(PropStatus::NotModeled) == 4);
    CHECK(rep.all_pass());
  }
}

TEST_CASE("out-of-scope statements are reported as not-modeled, never pass") {
  const PropertyReport rep = run_suite(canonical_instance("E1"), 20000);
  std::size_t seen = 0;
  for (const auto& r : rep.results)
    if (r.id == "P-3.5-LL" || r.id == "P-3.7.2" || r.id == "P-3.9" ||
        r.id == "P-4.10-H") {
      CHECK(r.status == PropStatus::NotModeled);
      ++seen;
    }
  CHECK(seen == 4);
}

TEST_CASE("a corrupted value system fails with a replayable witness") {
  const Instance e1 = canonical_instance("E1");
  ValueSystem vs = value_backward(e1);
  vs.v[1] = RandomVar{Rational(2)};  // overwrite V_p(1), truth is 3

  const PropertyReport rep = run_suite_on(vs, 20000);
  const PropertyResult* p213 = nullptr;
  for (const auto& r : rep.results)
    if (r.id == "P-2.13") p213 = &r;
  REQUIRE(p213 != nullptr);
  REQUIRE(p213->status == PropStatus::Fail);
  REQUIRE(p213->witness.has_value());
  std::map<std::string, std::string> fields(p213->witness->fields.begin(),
                                            p213->witness->fields.end());
  CHECK(fields["t"] == "1");
  CHECK(fields["block"] == "w");
  CHECK(fields["lhs"] == "2");
  CHECK(fields["rhs"] == "3");

  // replay: running the single property reproduces the identical witness
  const PropertyReport again = run_suite_on(vs, 20000, {"P-2.13"});
  REQUIRE(again.results.size() == 1);
  REQUIRE(again.results[0].status == PropStatus::Fail);
  REQUIRE(again.results[0].witness.has_value());
  CHECK(again.results[0].witness->fields == p213->witness->fields);
  CHECK(again.results[0].witness->relation == p213->witness->relation);
}

TEST_CASE("a corrupted strict value is caught from several directions") {
  const Instance e1 = canonical_instance("E1");
  ValueSystem vs = value_backward(e1);
  vs.v_plus[0] = RandomVar{Rational(0)};  // truth is 3
  const PropertyReport rep = run_suite_on(vs, 20000);
  std::set<std::string> failing;
  for (const auto& r : rep.results)
    if (r.status == PropStatus::Fail) failing.insert(r.id);
  CHECK(failing.count("P-2.13") == 1);  // V_p(0) != phi_0 v V_p+(0)
  CHECK(failing.count("P-3.11") == 1);  // projected right limit differs
  CHECK(failing.count("P-4.7") == 1);   // strict brute force disagrees
  CHECK(failing.count("P-4.8") == 1);   // dC_0 would be 3, off contact
}

TEST_CASE("property filters select exactly the requested ids") {
  const PropertyReport rep =
      run_suite(canonical_instance("E3"), 20000, {"P-2.13", "P-4.7"});
  REQUIRE(rep.results.size() == 2);
  CHECK(rep.results[0].id == "P-2.13");
  CHECK(rep.results[1].id == "P-4.7");
}

TEST_CASE("budget exhaustion marks properties skipped, never passed") {
  const PropertyReport rep = run_suite(canonical_instance("E3"), 2);
  CHECK(rep.count(PropStatus::Fail) == 0);
  CHECK(rep.count(PropStatus::SkippedBudget) > 0);
  CHECK_FALSE(rep.all_pass());
  // the pure grid statements still run without any enumeration
  for (const auto& r : rep.results)
    if (r.id == "P-2.13" || r.id == "P-4.8")
      CHECK(r.status == PropStatus::Pass);
}

TEST_CASE("suite soundness on random instances") {
  GenParams params;
  params.max_outcomes = 5;
  params.horizon = 3;
  for (std::uint64_t seed = 200; seed <= 230; ++seed) {
    const PropertyReport rep = run_suite(generate_random(seed, params), 20000);
    INFO("seed " << seed);
    CHECK(rep.count(PropStatus::Fail) == 0);
    CHECK(rep.count(PropStatus::SkippedBudget) == 0);
  }
}

TEST_CASE("report serialization carries ids, anchors, statuses and witnesses") {
  const Instance e1 = canonical_instance("E1");
  ValueSystem vs = value_backward(e1);
  vs.v[1] = RandomVar{Rational(2)};
  const ordered_json doc = report_to_json(run_suite_on(vs, 20000));
  CHECK(doc.contains("digest"));
  CHECK(doc["budget"] == 20000);
  bool found = false;
  for (const auto& p : doc["properties"]) {
    CHECK(p.contains("id"));
    CHECK(p.contains("anchor"));
    CHECK(p.contains("status"));
    if (p["id"] == "P-2.13") {
      found = true;
      CHECK(p["status"] == "fail");
      CHECK(p["witness"]["t"] == "1");
    }
  }
  CHECK(found);
  CHECK(doc["summary"]["fail"].get<int>() >= 1);
}
