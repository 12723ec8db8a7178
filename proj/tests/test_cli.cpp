#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "predsnell/predsnell.hpp"

using namespace predsnell;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string(PREDSNELL_CLI) + " " + args + " 2>cli_stderr.txt";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    res.out.append(buf.data(), got);
  const int rc = pclose(pipe);
  res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

std::string write_instance(const char* name) {
  const std::string path = std::string("cli_") + name + ".json";
  save_file(canonical_instance(name), path);
  return path;
}

}  // namespace

TEST_CASE("solve reports the value in exact rational strings") {
  const std::string path = write_instance("E1");
  const CliResult res = run_cli("solve " + path + " --format json");
  REQUIRE(res.exit_code == 0);
  const json doc = json::parse(res.out);
  CHECK(doc["v"][0]["values"]["w"] == "3");
  CHECK(doc["expected_value"] == "3");
  CHECK(doc["optimal_value"] == "3");
  CHECK(doc["tau_hat"]["w"] == 1);
  CHECK(doc["h_minus"] == "0");
  CHECK(doc["h_plus"] == "0");
}

TEST_CASE("solve on the gap instance") {
  const std::string path = write_instance("E3");
  const CliResult res = run_cli("solve " + path + " --format json");
  REQUIRE(res.exit_code == 0);
  const json doc = json::parse(res.out);
  CHECK(doc["expected_value"] == "3/2");
  CHECK(doc["value_at_s"]["u"] == "3/2");
  CHECK(doc["tau_hat"]["u"] == 2);
  CHECK(doc["tau_hat"]["d"] == 2);
  CHECK(doc["criterion"]["optimal"] == true);
  CHECK(doc["criterion"]["value_touches_reward"] == true);
  CHECK(doc["criterion"]["martingale_to_tau"] == true);
  CHECK(doc["optimal_set"].size() == 3);
}

TEST_CASE("solve evaluates at a constant time") {
  const std::string path = write_instance("E1");
  const CliResult res = run_cli("solve " + path + " --at 2 --format json");
  REQUIRE(res.exit_code == 0);
  const json doc = json::parse(res.out);
  CHECK(doc["value_at_s"]["w"] == "2");
  CHECK(doc["expected_value"] == "2");
  CHECK(run_cli("solve " + path + " --at 7 --format json").exit_code == 2);
}

TEST_CASE("the budget environment variable feeds the default") {
  const std::string path = write_instance("E3");
  const CliResult res =
      run_cli("enumerate " + path + " --format json");  // fits in any budget
  REQUIRE(res.exit_code == 0);
  const std::string cmd = std::string("PREDSNELL_BUDGET=1 ") + PREDSNELL_CLI +
                          " enumerate " + path + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 512> buf{};
  while (fread(buf.data(), 1, buf.size(), pipe) > 0) {
  }
  const int rc = pclose(pipe);
  CHECK(WEXITSTATUS(rc) == 3);
}

TEST_CASE("solve validates stopping-time maps") {
  const std::string path = write_instance("E3");
  {
    std::ofstream f("cli_badmap.json");
    f << R"({"u": 2, "d": 1})";  // plain stopping but not predictable
  }
  const CliResult res =
      run_cli("solve " + path + " --at-map cli_badmap.json --format json");
  CHECK(res.exit_code == 2);
  {
    std::ofstream f("cli_goodmap.json");
    f << R"({"u": 1, "d": 1})";
  }
  const CliResult ok =
      run_cli("solve " + path + " --at-map cli_goodmap.json --format json");
  REQUIRE(ok.exit_code == 0);
  CHECK(json::parse(ok.out)["value_at_s"]["u"] == "3/2");
}

TEST_CASE("solve csv emits the long-format value table") {
  const std::string path = write_instance("E1");
  const CliResult res = run_cli("solve " + path + " --format csv");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out == "time,outcome,value\n0,w,3\n1,w,3\n2,w,2\n");
}

TEST_CASE("verify passes the canonical instances") {
  const std::string path = write_instance("E3");
  const CliResult res = run_cli("verify " + path);
  REQUIRE(res.exit_code == 0);
  const json doc = json::parse(res.out);
  CHECK(doc["summary"]["fail"] == 0);
  CHECK(doc["summary"]["skipped"] == 0);
  CHECK(doc["summary"]["not_modeled"] == 4);
}

TEST_CASE("verify honors property filters") {
  const std::string path = write_instance("E1");
  const CliResult res = run_cli("verify " + path + " --props P-2.13,P-4.7");
  REQUIRE(res.exit_code == 0);
  const json doc = json::parse(res.out);
  REQUIRE(doc["properties"].size() == 2);
  CHECK(doc["properties"][0]["id"] == "P-2.13");
}

TEST_CASE("verify escalates budget skips only under --strict-budget") {
  const std::string path = write_instance("E3");
  const CliResult soft = run_cli("verify " + path + " --budget 2");
  CHECK(soft.exit_code == 0);
  CHECK(json::parse(soft.out)["summary"]["skipped"].get<int>() > 0);
  const CliResult hard =
      run_cli("verify " + path + " --budget 2 --strict-budget");
  CHECK(hard.exit_code == 3);
}

TEST_CASE("enumerate lists the class with expectations") {
  const std::string path = write_instance("E3");
  const CliResult res =
      run_cli("enumerate " + path + " --from 0 --format json");
  REQUIRE(res.exit_code == 0);
  const json doc = json::parse(res.out);
  REQUIRE(doc.size() == 3);
  CHECK(doc[0]["expected_reward"] == "0");
  CHECK(doc[1]["expected_reward"] == "1");
  CHECK(doc[2]["expected_reward"] == "3/2");
  const CliResult strict =
      run_cli("enumerate " + path + " --from 0 --strict --format json");
  REQUIRE(strict.exit_code == 0);
  CHECK(json::parse(strict.out).size() == 2);
}

TEST_CASE("enumerate exits 3 when the budget is too small") {
  const std::string path = write_instance("E3");
  const CliResult res = run_cli("enumerate " + path + " --budget 1");
  CHECK(res.exit_code == 3);
}

TEST_CASE("decompose emits martingale and compensator tables") {
  const std::string path = write_instance("E1");
  const CliResult res = run_cli("decompose " + path + " --format json");
  REQUIRE(res.exit_code == 0);
  const json doc = json::parse(res.out);
  CHECK(doc["m"][0]["values"]["w"] == "3");
  CHECK(doc["m"][2]["values"]["w"] == "3");
  CHECK(doc["c"][0]["t"] == -1);
  CHECK(doc["c"][0]["values"]["w"] == "0");
  CHECK(doc["c"][3]["values"]["w"] == "1");
  CHECK(doc["delta_c"][1]["values"]["w"] == "1");
  CHECK(doc["a"][0]["values"]["w"] == "0");
}

TEST_CASE("generate writes valid canonical bytes deterministically") {
  const CliResult a = run_cli("generate --seed 7 --max-outcomes 4 --horizon 3");
  const CliResult b = run_cli("generate --seed 7 --max-outcomes 4 --horizon 3");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  const Instance inst = load_string(a.out);
  CHECK(validate_instance(inst).ok());

  const CliResult f = run_cli(
      "generate --seed 7 --max-outcomes 4 --horizon 3 --out cli_gen.json");
  REQUIRE(f.exit_code == 0);
  std::ifstream in("cli_gen.json", std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == a.out);
}

TEST_CASE("fuzz summarizes seeds and is deterministic") {
  const CliResult a =
      run_cli("fuzz --seeds 3 --max-outcomes 4 --horizon 3 --qlc-prob 1/2");
  REQUIRE(a.exit_code == 0);
  const CliResult b =
      run_cli("fuzz --seeds 3 --max-outcomes 4 --horizon 3 --qlc-prob 1/2");
  CHECK(a.out == b.out);
  CHECK(a.out.find("seed=1") != std::string::npos);
  CHECK(a.out.find("seeds=3 passed=3") != std::string::npos);
  // parallel workers must not change the bytes
  const CliResult c = run_cli(
      "fuzz --seeds 3 --max-outcomes 4 --horizon 3 --qlc-prob 1/2 --jobs 3");
  CHECK(c.out == a.out);
}

TEST_CASE("fuzz writes artifacts only for failing seeds") {
  std::remove("cli_fuzz_out/seed-1.instance.json");
  std::remove("cli_fuzz_out");
  REQUIRE(system("mkdir -p cli_fuzz_out") == 0);
  const CliResult res = run_cli(
      "fuzz --seeds 2 --max-outcomes 4 --horizon 2 --out cli_fuzz_out");
  REQUIRE(res.exit_code == 0);
  std::ifstream probe("cli_fuzz_out/seed-1.instance.json");
  CHECK_FALSE(probe.good());  // nothing failed, nothing written
}

TEST_CASE("invalid inputs exit 2") {
  CHECK(run_cli("solve no_such_file.json").exit_code == 2);
  {
    std::ofstream f("cli_broken.json");
    f << "{\"horizon\": 2}";
  }
  CHECK(run_cli("solve cli_broken.json").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
}
