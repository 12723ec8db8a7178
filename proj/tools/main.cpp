// predsnell command line: solve / verify / fuzz / decompose / enumerate /
// generate over instance documents. Machine output goes to stdout,
// diagnostics to stderr. Exit codes: 0 success or all properties pass,
// 1 property violation found, 2 invalid input, 3 enumeration budget exceeded.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "predsnell/predsnell.hpp"

namespace ps = predsnell;

namespace {

void emit(const std::string& text) {
  std::fwrite(text.data(), 1, text.size(), stdout);
  std::fflush(stdout);
}

std::size_t default_budget() {
  if (const char* env = std::getenv("PREDSNELL_BUDGET")) {
    try {
      const long long v = std::stoll(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return ps::kDefaultEnumBudget;
}

ps::StoppingTime parse_at_map(const std::string& path, const ps::Instance& inst) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ps::InvalidInput("cannot open '" + path + "'");
  ps::json doc;
  try {
    doc = ps::json::parse(in);
  } catch (const ps::json::parse_error& e) {
    throw ps::InvalidInput(std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw ps::InvalidInput("stopping-time map must be an object id -> time");
  ps::StoppingTime tau = ps::StoppingTime::constant(inst.space.size(), -1);
  for (const auto& [key, val] : doc.items()) {
    const auto ix = inst.space.index_of(key);
    if (!ix) throw ps::InvalidInput("unknown outcome id '" + key + "'");
    if (!val.is_number_integer())
      throw ps::InvalidInput("time for outcome '" + key + "' must be an integer");
    tau[*ix] = val.get<int>();
  }
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (tau[i] < 0)
      throw ps::InvalidInput("missing time for outcome '" +
                             inst.space.outcomes[i] + "'");
  return tau;
}

ps::ordered_json time_to_json(const ps::StoppingTime& tau,
                              const ps::SampleSpace& space) {
  ps::ordered_json out;
  for (std::size_t i = 0; i < tau.size(); ++i) out[space.outcomes[i]] = tau[i];
  return out;
}

ps::ordered_json var_to_json(const ps::RandomVar& x,
                             const ps::SampleSpace& space) {
  ps::ordered_json out;
  for (std::size_t i = 0; i < x.size(); ++i)
    out[space.outcomes[i]] = ps::to_string(x[i]);
  return out;
}

ps::ordered_json table_to_json(const std::vector<ps::RandomVar>& rows,
                               const ps::SampleSpace& space, int t0 = 0) {
  ps::ordered_json out = ps::ordered_json::array();
  for (std::size_t k = 0; k < rows.size(); ++k)
    out.push_back({{"t", t0 + static_cast<int>(k)},
                   {"values", var_to_json(rows[k], space)}});
  return out;
}

std::string render_table(const std::string& title,
                         const std::vector<ps::RandomVar>& rows,
                         const ps::SampleSpace& space, int t0 = 0) {
  std::vector<std::size_t> width(space.size() + 1, 1);
  width[0] = std::max<std::size_t>(1, std::string("t").size());
  std::vector<std::vector<std::string>> cells;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::vector<std::string> row{std::to_string(t0 + static_cast<int>(k))};
    for (std::size_t i = 0; i < space.size(); ++i)
      row.push_back(ps::to_string(rows[k][i]));
    cells.push_back(row);
  }
  for (std::size_t i = 0; i < space.size(); ++i)
    width[i + 1] = space.outcomes[i].size();
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c)
      width[c] = std::max(width[c], row[c].size());

  std::ostringstream os;
  os << title << "\n";
  os << "  t";
  for (std::size_t k = width[0]; k > 1; --k) os << ' ';
  for (std::size_t i = 0; i < space.size(); ++i) {
    os << " | " << space.outcomes[i];
    for (std::size_t k = space.outcomes[i].size(); k < width[i + 1]; ++k)
      os << ' ';
  }
  os << "\n";
  for (const auto& row : cells) {
    os << "  " << row[0];
    for (std::size_t k = row[0].size(); k < width[0]; ++k) os << ' ';
    for (std::size_t c = 1; c < row.size(); ++c) {
      os << " | " << row[c];
      for (std::size_t k = row[c].size(); k < width[c]; ++k) os << ' ';
    }
    os << "\n";
  }
  return os.str();
}

std::string render_csv(const std::vector<ps::RandomVar>& rows,
                       const ps::SampleSpace& space, int t0 = 0) {
  std::ostringstream os;
  os << "time,outcome,value\n";
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t i = 0; i < space.size(); ++i)
      os << (t0 + static_cast<int>(k)) << "," << space.outcomes[i] << ","
         << ps::to_string(rows[k][i]) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_solve(const std::string& file, std::optional<int> at,
              const std::string& at_map, const std::string& format,
              std::size_t budget) {
  const ps::Instance inst = ps::load_file(file);
  ps::StoppingTime s = ps::StoppingTime::constant(inst.space.size(), 0);
  if (!at_map.empty())
    s = parse_at_map(at_map, inst);
  else if (at)
    s = ps::StoppingTime::constant(inst.space.size(), *at);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] < 0 || s[i] > inst.filt.horizon)
      throw ps::InvalidInput("evaluation time outside [0, N]");
  if (!ps::is_predictable(s, inst.filt))
    throw ps::InvalidInput("evaluation time is not a predictable stopping time");

  const ps::ValueSystem vs = ps::value_backward(inst);
  const ps::OptimalReport report = ps::build_optimal_report(vs, s, budget);

  if (format == "json") {
    ps::ordered_json doc;
    doc["digest"] = ps::digest(inst);
    doc["horizon"] = inst.filt.horizon;
    doc["at"] = time_to_json(s, inst.space);
    doc["v"] = table_to_json(vs.v, inst.space);
    doc["v_plus"] = table_to_json(vs.v_plus, inst.space);
    doc["value_at_s"] = var_to_json(report.value_at_s, inst.space);
    doc["expected_value"] = ps::to_string(report.expected_value);
    doc["tau_hat"] = time_to_json(report.hat, inst.space);
    doc["tau_tilde"] = time_to_json(report.tau_tilde, inst.space);
    ps::ordered_json alphas = ps::ordered_json::array();
    for (const auto& [alpha, tau] : report.tau_alphas)
      alphas.push_back({{"alpha", ps::to_string(alpha)},
                        {"time", time_to_json(tau, inst.space)}});
    doc["tau_alpha"] = alphas;
    doc["optimal_value"] = ps::to_string(report.expected_value);
    ps::ordered_json times = ps::ordered_json::array();
    for (const auto& tau : report.attained_by)
      times.push_back(time_to_json(tau, inst.space));
    doc["optimal_times"] = times;
    ps::ordered_json mset = ps::ordered_json::array();
    for (const auto& tau : report.optimal_set)
      mset.push_back(time_to_json(tau, inst.space));
    doc["optimal_set"] = mset;
    const ps::CriterionResult crit =
        ps::criterion_check(vs, s, report.hat, budget);
    doc["criterion"] = {{"optimal", crit.optimal},
                        {"value_touches_reward", crit.cond1},
                        {"martingale_to_tau", crit.cond2}};
    doc["h_minus"] = ps::to_string(report.h_minus_mass);
    doc["h_plus"] = ps::to_string(report.h_plus_mass);
    emit(doc.dump(2) + "\n");
    return 0;
  }
  if (format == "csv") {
    emit(render_csv(vs.v, inst.space));
    return 0;
  }
  std::ostringstream os;
  os << render_table("V_p", vs.v, inst.space);
  os << render_table("V_p+", vs.v_plus, inst.space);
  os << "at S: " << ps::format_time(s, inst.space) << "\n";
  os << "V_p(S): ";
  for (std::size_t i = 0; i < inst.space.size(); ++i)
    os << (i ? ", " : "") << inst.space.outcomes[i] << "="
       << ps::to_string(report.value_at_s[i]);
  os << "\n";
  os << "optimal value E[V_p(S)]: " << ps::to_string(report.expected_value)
     << "\n";
  os << "tau_hat: " << ps::format_time(report.hat, inst.space) << "\n";
  os << "tau_tilde: " << ps::format_time(report.tau_tilde, inst.space) << "\n";
  os << "optimal times (" << report.attained_by.size() << "):\n";
  for (const auto& tau : report.attained_by)
    os << "  " << ps::format_time(tau, inst.space) << "\n";
  emit(os.str());
  return 0;
}

int cmd_verify(const std::string& file, const std::string& props,
               std::size_t budget, bool strict_budget) {
  const ps::Instance inst = ps::load_file(file);
  std::vector<std::string> only;
  if (!props.empty()) {
    std::stringstream ss(props);
    std::string id;
    while (std::getline(ss, id, ','))
      if (!id.empty()) only.push_back(id);
  }
  const ps::PropertyReport report = ps::run_suite(inst, budget, only);
  emit(ps::report_to_json(report).dump(2) + "\n");
  if (report.count(ps::PropStatus::Fail) > 0) return 1;
  if (strict_budget && report.count(ps::PropStatus::SkippedBudget) > 0) return 3;
  return 0;
}

int cmd_decompose(const std::string& file, const std::string& format) {
  const ps::Instance inst = ps::load_file(file);
  const ps::ValueSystem vs = ps::value_backward(inst);
  const ps::MertensDecomposition d = ps::decompose(vs);

  if (format == "json") {
    ps::ordered_json doc;
    doc["digest"] = ps::digest(inst);
    doc["m"] = table_to_json(d.m, inst.space);
    doc["a"] = table_to_json(d.a, inst.space);
    doc["c"] = table_to_json(d.c, inst.space, -1);
    doc["delta_c"] = table_to_json(d.delta_c, inst.space);
    ps::ordered_json contact = ps::ordered_json::array();
    for (std::size_t t = 0; t < d.contact.size(); ++t) {
      ps::ordered_json ids = ps::ordered_json::array();
      for (std::size_t i : d.contact[t].indices())
        ids.push_back(inst.space.outcomes[i]);
      contact.push_back({{"t", static_cast<int>(t)}, {"outcomes", ids}});
    }
    doc["contact"] = contact;
    emit(doc.dump(2) + "\n");
    return 0;
  }
  if (format == "csv") {
    std::ostringstream os;
    os << "series,time,outcome,value\n";
    auto series = [&](const char* name, const std::vector<ps::RandomVar>& rows,
                      int t0) {
      for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t i = 0; i < inst.space.size(); ++i)
          os << name << "," << (t0 + static_cast<int>(k)) << ","
             << inst.space.outcomes[i] << "," << ps::to_string(rows[k][i])
             << "\n";
    };
    series("M", d.m, 0);
    series("A", d.a, 0);
    series("C", d.c, -1);
    series("dC", d.delta_c, 0);
    emit(os.str());
    return 0;
  }
  std::ostringstream os;
  os << render_table("M", d.m, inst.space);
  os << render_table("A", d.a, inst.space);
  os << render_table("C (from t = -1)", d.c, inst.space, -1);
  os << render_table("dC", d.delta_c, inst.space);
  emit(os.str());
  return 0;
}

int cmd_enumerate(const std::string& file, int from, bool strict,
                  const std::string& format, std::size_t budget) {
  const ps::Instance inst = ps::load_file(file);
  if (from < 0 || from > inst.filt.horizon)
    throw ps::InvalidInput("--from outside [0, N]");
  const ps::StoppingTime s = ps::StoppingTime::constant(inst.space.size(), from);
  const auto taus = ps::enumerate_predictable(inst.filt, s, strict, budget);

  if (format == "json") {
    ps::ordered_json doc = ps::ordered_json::array();
    for (const auto& tau : taus)
      doc.push_back({{"time", time_to_json(tau, inst.space)},
                     {"expected_reward",
                      ps::to_string(inst.space.expectation(
                          ps::eval_at(inst.reward, tau, inst.filt)))}});
    emit(doc.dump(2) + "\n");
    return 0;
  }
  std::ostringstream os;
  for (const auto& tau : taus)
    os << ps::format_time(tau, inst.space) << "  E[phi(tau)]="
       << ps::to_string(
              inst.space.expectation(ps::eval_at(inst.reward, tau, inst.filt)))
       << "\n";
  emit(os.str());
  return 0;
}

int cmd_generate(std::uint64_t seed, const ps::GenParams& params,
                 const std::string& out) {
  const ps::Instance inst = ps::generate_random(seed, params);
  if (out.empty())
    emit(ps::save_string(inst));
  else
    ps::save_file(inst, out);
  return 0;
}

struct SeedResult {
  std::uint64_t seed = 0;
  std::string line;
  bool failed = false;
  bool skipped = false;
};

SeedResult run_seed(std::uint64_t seed, const ps::GenParams& params,
                    std::size_t budget, const std::string& out_dir) {
  SeedResult res;
  res.seed = seed;
  const ps::Instance inst = ps::generate_random(seed, params);
  const ps::PropertyReport report = ps::run_suite(inst, budget);
  std::ostringstream os;
  os << "seed=" << seed << " digest=" << report.instance_digest
     << " outcomes=" << inst.space.size() << " horizon=" << inst.filt.horizon;
  res.failed = report.count(ps::PropStatus::Fail) > 0;
  res.skipped = report.count(ps::PropStatus::SkippedBudget) > 0;
  if (res.failed) {
    os << " status=fail failed=";
    const auto ids = report.failed_ids();
    for (std::size_t k = 0; k < ids.size(); ++k) os << (k ? "," : "") << ids[k];
  } else if (res.skipped) {
    os << " status=skipped-budget";
  } else {
    os << " status=pass";
  }
  os << "\n";
  if (res.failed) {
    if (!out_dir.empty()) {
      const std::string stem = out_dir + "/seed-" + std::to_string(seed);
      ps::save_file(inst, stem + ".instance.json");
      const std::string payload = ps::report_to_json(report).dump(2) + "\n";
      const std::string tmp = stem + ".report.json.tmp";
      {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f << payload;
      }
      std::rename(tmp.c_str(), (stem + ".report.json").c_str());
      os << "witness written to " << stem << ".report.json\n";
    } else {
      os << ps::report_to_json(report).dump() << "\n";
    }
  }
  res.line = os.str();
  return res;
}

int cmd_fuzz(std::uint64_t seeds, std::uint64_t seed_base,
             const ps::GenParams& params, std::size_t budget,
             const std::string& out_dir, bool strict_budget, unsigned jobs) {
  std::vector<SeedResult> results(static_cast<std::size_t>(seeds));
  if (jobs <= 1) {
    for (std::uint64_t k = 0; k < seeds; ++k)
      results[static_cast<std::size_t>(k)] =
          run_seed(seed_base + k, params, budget, out_dir);
  } else {
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::uint64_t k = next.fetch_add(1);
        if (k >= seeds) return;
        results[static_cast<std::size_t>(k)] =
            run_seed(seed_base + k, params, budget, out_dir);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::ostringstream os;
  bool any_fail = false, any_skip = false;
  for (const auto& res : results) {
    os << res.line;
    any_fail = any_fail || res.failed;
    any_skip = any_skip || res.skipped;
  }
  std::size_t passed = 0;
  for (const auto& res : results)
    if (!res.failed && !res.skipped) ++passed;
  os << "seeds=" << seeds << " passed=" << passed << "\n";
  emit(os.str());
  if (any_fail) return 1;
  if (any_skip && strict_budget) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact optimal-stopping engine for predictable stopping times "
               "on finite two-slot filtered spaces"};
  app.require_subcommand(1);
  std::size_t budget = default_budget();

  std::string file, format = "table", at_map, props, out;
  std::optional<int> at;
  bool strict = false, strict_budget = false;
  int from = 0;
  std::uint64_t seed = 1, seeds = 1, seed_base = 1;
  unsigned jobs = 1;
  ps::GenParams params;
  std::string qlc = "1/2";

  auto* solve = app.add_subcommand("solve", "value tables and optimal times");
  solve->add_option("file", file)->required();
  solve->add_option("--at", at, "evaluate at the constant time T");
  solve->add_option("--at-map", at_map, "evaluate at the stopping time in FILE");
  solve->add_option("--format", format)->check(CLI::IsMember({"table", "json", "csv"}));
  solve->add_option("--budget", budget);

  auto* verify = app.add_subcommand("verify", "run the property suite");
  verify->add_option("file", file)->required();
  verify->add_option("--props", props, "comma-separated property ids");
  verify->add_option("--budget", budget);
  verify->add_flag("--strict-budget", strict_budget,
                   "exit 3 when any property is skipped for budget");

  auto* decomp = app.add_subcommand("decompose", "Mertens decomposition tables");
  decomp->add_option("file", file)->required();
  decomp->add_option("--format", format)->check(CLI::IsMember({"table", "json", "csv"}));

  auto* enumerate = app.add_subcommand("enumerate",
                                       "list predictable stopping times");
  enumerate->add_option("file", file)->required();
  enumerate->add_option("--from", from, "constant time lower bound");
  enumerate->add_flag("--strict", strict, "strictly-after class");
  enumerate->add_option("--format", format)->check(CLI::IsMember({"table", "json"}));
  enumerate->add_option("--budget", budget);

  auto* generate = app.add_subcommand("generate", "write a random instance");
  generate->add_option("--seed", seed)->required();
  generate->add_option("--max-outcomes", params.max_outcomes);
  generate->add_option("--horizon", params.horizon);
  generate->add_option("--qlc-prob", qlc, "rational probability of a pre < post jump");
  generate->add_option("--reward-max", params.reward_max);
  generate->add_option("--out", out, "output file (stdout when omitted)");

  auto* fuzz = app.add_subcommand("fuzz", "property suite over random seeds");
  fuzz->add_option("--seeds", seeds)->required();
  fuzz->add_option("--seed-base", seed_base);
  fuzz->add_option("--max-outcomes", params.max_outcomes);
  fuzz->add_option("--horizon", params.horizon);
  fuzz->add_option("--qlc-prob", qlc);
  fuzz->add_option("--reward-max", params.reward_max);
  fuzz->add_option("--out", out, "directory for failing instances and witnesses");
  fuzz->add_option("--budget", budget);
  fuzz->add_flag("--strict-budget", strict_budget);
  fuzz->add_option("--jobs", jobs, "parallel workers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const auto parsed_qlc = ps::parse_rational(qlc);
    if (!parsed_qlc || *parsed_qlc > 1)
      throw ps::InvalidInput("--qlc-prob must be a rational in [0,1]");
    params.qlc_violation_prob = *parsed_qlc;

    if (solve->parsed()) return cmd_solve(file, at, at_map, format, budget);
    if (verify->parsed()) return cmd_verify(file, props, budget, strict_budget);
    if (decomp->parsed()) return cmd_decompose(file, format);
    if (enumerate->parsed())
      return cmd_enumerate(file, from, strict, format, budget);
    if (generate->parsed()) return cmd_generate(seed, params, out);
    if (fuzz->parsed())
      return cmd_fuzz(seeds, seed_base, params, budget, out, strict_budget,
                      jobs);
  } catch (const ps::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ps::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ps::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
