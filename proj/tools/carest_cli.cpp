// carest: simulate, estimate, validate and asymptotics front end.
//
// Exit codes: 0 success, 1 a validation suite failed, 2 usage or input error.

#include "carest/experiments.hpp"
#include "carest/validation.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<long> reps;
  int jobs{1};
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* opt = cmd->add_option("--config", f.config, "experiment config (JSON)");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
  cmd->add_option("--out", f.out, "output directory (overrides the config)");
  cmd->add_option("--reps", f.reps, "repetitions (overrides the config)")->check(CLI::Range(1, 1 << 30));
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::Range(1, 1 << 30));
}

carest::ExperimentConfig load(const CommonFlags& f) {
  auto cfg = carest::load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.output_dir = *f.out;
  if (f.reps) cfg.reps = *f.reps;
  cfg.validate();
  return cfg;
}

int run_validate(const std::vector<std::string>& suites, const CommonFlags& f) {
  carest::SuiteOptions opt;
  opt.reps = f.reps;
  opt.seed = f.seed;
  opt.jobs = f.jobs;
  bool all_passed = true;
  carest::Json reports = carest::Json::array();
  for (const auto& name : suites) {
    for (const auto& r : carest::run_suite(name, opt)) {
      all_passed = all_passed && r.passed;
      std::cerr << (r.passed ? "PASS " : "FAIL ") << r.suite << " (" << r.seconds << " s)\n";
      reports.push_back(carest::suite_report_to_json(r));
    }
  }
  const carest::Json doc{{"passed", all_passed}, {"suites", reports}};
  std::cout << doc.dump(2) << '\n';
  if (f.out) {
    std::filesystem::create_directories(*f.out);
    carest::write_json(std::filesystem::path(*f.out) / "validation.json", doc);
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riccati-equation moment estimators for stationary AR(1)-type processes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", carest::kVersion);

  CommonFlags sim_f, est_f, val_f, asy_f;
  auto* sim = app.add_subcommand("simulate", "simulate paths; writes path_<rep>.csv and manifest.json");
  add_common(sim, sim_f, true);

  auto* est = app.add_subcommand("estimate", "estimate per rep; writes run_record.json and reps.csv");
  add_common(est, est_f, true);
  std::vector<std::string> paths;
  est->add_option("--paths", paths, "estimate these path CSVs instead of simulating")->check(CLI::ExistingFile);

  auto* val = app.add_subcommand("validate", "run named validation suites");
  add_common(val, val_f, false);
  std::vector<std::string> suites;
  val->add_option("suite", suites, "suite names, or 'all' (default: the config's checks)");
  bool list = false;
  val->add_flag("--list", list, "list the registered suites");

  auto* asy = app.add_subcommand("asymptotics", "Monte Carlo samples of the normalized error; writes samples.csv");
  add_common(asy, asy_f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      const auto files = carest::cmd_simulate(load(sim_f), sim_f.jobs);
      std::cout << "wrote " << files.size() << " path files\n";
    } else if (est->parsed()) {
      std::vector<std::filesystem::path> inputs(paths.begin(), paths.end());
      const auto rec = carest::cmd_estimate(load(est_f), est_f.jobs, inputs);
      std::cout << "reps " << rec.reps.size() << ", gate failure rate " << rec.gate_failure_rate << ", median error "
                << rec.median_error << '\n';
    } else if (asy->parsed()) {
      const auto mc = carest::cmd_asymptotics(load(asy_f), asy_f.jobs);
      std::cout << "reps " << mc.theta_err.rows() << ", R^2 " << mc.r_squared << ", gate failures " << mc.gate_failures << '\n';
    } else if (val->parsed()) {
      if (list) {
        for (const auto& s : carest::suite_registry()) std::cout << s.name << "  " << s.description << '\n';
        return 0;
      }
      if (suites.empty() && !val_f.config.empty()) suites = load(val_f).checks;
      if (suites.empty()) {
        std::cerr << "validate: no suite given\n";
        return 2;
      }
      return run_validate(suites, val_f);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
