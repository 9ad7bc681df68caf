#include "carest/experiments.hpp"

#include "carest/asymptotics.hpp"
#include "carest/parallel.hpp"
#include "carest/rng.hpp"
#include "carest/validation.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

namespace carest {

namespace {

bool same_matrix(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same_model(const ModelSpec& a, const ModelSpec& b) {
  if (a.kind != b.kind || a.driver != b.driver || a.hurst != b.hurst) return false;
  if (!same_matrix(a.phi_or_h, b.phi_or_h) || !same_matrix(a.sigma, b.sigma)) return false;
  if (a.ma.size() != b.ma.size()) return false;
  for (std::size_t i = 0; i < a.ma.size(); ++i) {
    if (!same_matrix(a.ma[i], b.ma[i])) return false;
  }
  return true;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  const auto mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  const double hi = xs[mid];
  if (xs.size() % 2 == 1) return hi;
  const double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lo + hi) / 2.0;
}

Mat true_parameter(const ModelSpec& spec) {
  if (spec.discrete()) return Mat::Identity(spec.dim(), spec.dim()) - spec.phi_or_h;
  return spec.phi_or_h;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

std::string rep_file_name(std::size_t rep) {
  return "path_" + std::to_string(rep) + ".csv";
}

}  // namespace

void ExperimentConfig::validate() const {
  validate_model(model);
  if (reps < 1) throw InvalidInput("reps must be >= 1");
  if (!std::isfinite(rate_exponent) || rate_exponent <= 0.0) throw InvalidInput("rate_exponent must be positive");
  if (output_dir.empty()) throw InvalidInput("output_dir must not be empty");
  if (model.discrete()) {
    if (!T || *T < 2) throw InvalidInput("discrete models need T >= 2");
    if (horizon_t) {
      if (*horizon_t < 1.0 || *horizon_t != std::floor(*horizon_t)) throw InvalidInput("discrete horizon_t must be an integer >= 1");
      if (*horizon_t >= static_cast<double>(*T)) throw InvalidInput("horizon_t must be < T");
    }
    if (burn_in && *burn_in < 0) throw InvalidInput("burn_in must be >= 0");
  } else {
    if (!t_end || !dt || !(*dt > 0.0) || !(*t_end > *dt)) throw InvalidInput("continuous models need t_end > dt > 0");
    if (!horizon_t || !(*horizon_t > 0.0)) throw InvalidInput("continuous models need horizon_t > 0");
    if (*horizon_t > *t_end / 2.0) throw InvalidInput("horizon_t must be <= t_end / 2");
  }
  for (const auto& c : checks) {
    if (!suite_exists(c)) throw InvalidInput("unknown check '" + c + "'");
  }
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return same_model(model, o.model) && T == o.T && t_end == o.t_end && dt == o.dt && horizon_t == o.horizon_t &&
         burn_in == o.burn_in && reps == o.reps && seed == o.seed && rate_exponent == o.rate_exponent &&
         output_dir == o.output_dir && checks == o.checks;
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["model"] = model_to_json(cfg.model);
  if (cfg.T) j["T"] = *cfg.T;
  if (cfg.t_end) j["t_end"] = *cfg.t_end;
  if (cfg.dt) j["dt"] = *cfg.dt;
  if (cfg.horizon_t) j["horizon_t"] = *cfg.horizon_t;
  if (cfg.burn_in) j["burn_in"] = *cfg.burn_in;
  j["reps"] = cfg.reps;
  j["seed"] = cfg.seed;
  j["rate_exponent"] = cfg.rate_exponent;
  j["output_dir"] = cfg.output_dir;
  j["checks"] = cfg.checks;
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  ExperimentConfig cfg;
  try {
    cfg.model = model_from_json(j.at("model"));
    if (j.contains("T")) cfg.T = j.at("T").get<long>();
    if (j.contains("t_end")) cfg.t_end = j.at("t_end").get<double>();
    if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
    if (j.contains("horizon_t")) cfg.horizon_t = j.at("horizon_t").get<double>();
    if (j.contains("burn_in")) cfg.burn_in = j.at("burn_in").get<long>();
    cfg.reps = j.value("reps", 1L);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.rate_exponent = j.value("rate_exponent", 0.5);
    cfg.output_dir = j.value("output_dir", std::string("out"));
    cfg.checks = j.value("checks", std::vector<std::string>{});
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  return config_from_json(read_json(file));
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

long resolved_burn_in(const ExperimentConfig& cfg) {
  if (cfg.burn_in) return *cfg.burn_in;
  return cfg.model.kind == ModelKind::Varma1q ? default_burn_in(cfg.model) : 0;
}

double resolved_horizon(const ExperimentConfig& cfg) {
  if (cfg.horizon_t) return *cfg.horizon_t;
  if (!cfg.model.discrete()) throw InvalidInput("continuous models need an explicit horizon_t");
  const auto t = select_horizon(cfg.model);
  if (!t) throw InvalidModel("no horizon in 1..10 makes both C and D positive definite");
  return static_cast<double>(*t);
}

Path simulate_rep(const ExperimentConfig& cfg, std::uint64_t rep) {
  const std::uint64_t seed = derive_seed(cfg.seed, rep);
  switch (cfg.model.kind) {
    case ModelKind::Var1: return simulate_var1(cfg.model, *cfg.T - 1, resolved_burn_in(cfg), seed);
    case ModelKind::Varma1q: return simulate_varma1q(cfg.model, *cfg.T - 1, resolved_burn_in(cfg), seed);
    case ModelKind::OuCont: break;
  }
  return simulate_ou(cfg.model, *cfg.t_end, *cfg.dt, seed);
}

Json run_record_to_json(const RunRecord& rec) {
  Json reps = Json::array();
  for (const auto& r : rec.reps) {
    Json e = estimate_to_json(r.result);
    e["rep"] = r.rep;
    e["seed"] = r.seed;
    e["error"] = r.error;
    if (!r.source.empty()) e["source"] = r.source;
    reps.push_back(std::move(e));
  }
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(rec.config_hash));
  return Json{{"config_hash", hash},
              {"config", config_to_json(rec.config)},
              {"reps", std::move(reps)},
              {"aggregate",
               {{"gate_failure_rate", rec.gate_failure_rate},
                {"median_error", rec.median_error},
                {"mean_error", rec.mean_error}}},
              {"wall_clock_seconds", rec.wall_clock_seconds},
              {"versions",
               {{"carest", kVersion},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)}}}};
}

std::vector<std::filesystem::path> cmd_simulate(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  const std::filesystem::path dir(cfg.output_dir);
  ensure_dir(dir);
  const auto reps = static_cast<std::size_t>(cfg.reps);
  std::vector<std::filesystem::path> files(reps);
  parallel_for(reps, jobs, [&](std::size_t r) {
    files[r] = dir / rep_file_name(r);
    write_path_csv(files[r], simulate_rep(cfg, r));
  });
  Json seeds = Json::array();
  Json names = Json::array();
  for (std::size_t r = 0; r < reps; ++r) {
    seeds.push_back(derive_seed(cfg.seed, r));
    names.push_back(files[r].filename().string());
  }
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  write_json(dir / "manifest.json", Json{{"config_hash", hash},
                                         {"config", config_to_json(cfg)},
                                         {"master_seed", cfg.seed},
                                         {"seeds", seeds},
                                         {"files", names}});
  return files;
}

RunRecord cmd_estimate(const ExperimentConfig& cfg, int jobs, const std::vector<std::filesystem::path>& inputs) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  const std::filesystem::path dir(cfg.output_dir);
  ensure_dir(dir);
  const ModelSpec& spec = cfg.model;
  const double t = resolved_horizon(cfg);
  const Mat v_t = noise_variance_v(spec, t);
  const Mat truth = true_parameter(spec);
  const std::size_t count = inputs.empty() ? static_cast<std::size_t>(cfg.reps) : inputs.size();

  RunRecord rec;
  rec.config = cfg;
  rec.config_hash = config_hash(cfg);
  rec.reps.resize(count);
  parallel_for(count, jobs, [&](std::size_t r) {
    RepSummary& s = rec.reps[r];
    s.rep = static_cast<long>(r);
    Path path;
    if (inputs.empty()) {
      s.seed = derive_seed(cfg.seed, r);
      path = simulate_rep(cfg, r);
    } else {
      s.source = inputs[r].string();
      path = read_path_csv(inputs[r], spec.discrete() ? PathKind::Discrete : PathKind::ContinuousSampled);
      if (path.dim() != spec.dim()) throw InvalidInput(s.source + ": path dimension does not match the model");
    }
    s.result = spec.discrete() ? estimate_theta_discrete(path, v_t, std::lround(t)) : estimate_H_continuous(path, v_t, t);
    s.error = spectral_norm(Mat(s.result.theta_hat - truth));
  });

  std::vector<double> errors;
  long failures = 0;
  for (const auto& s : rec.reps) {
    errors.push_back(s.error);
    if (!s.result.gate_passed) ++failures;
  }
  rec.gate_failure_rate = static_cast<double>(failures) / static_cast<double>(count);
  rec.median_error = median(errors);
  double sum = 0.0;
  for (double e : errors) sum += e;
  rec.mean_error = sum / static_cast<double>(count);

  std::ofstream csv(dir / "reps.csv");
  if (!csv) throw IoError("cannot write " + (dir / "reps.csv").string());
  const Eigen::Index n = spec.dim();
  csv << "rep,seed,gate_passed,failure,residual_norm,error";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) csv << ",est" << (i + 1) << (j + 1);
  }
  csv << '\n';
  for (const auto& s : rec.reps) {
    csv << s.rep << ',' << s.seed << ',' << (s.result.gate_passed ? 1 : 0) << ',' << to_string(s.result.failure) << ','
        << format_double(s.result.residual_norm) << ',' << format_double(s.error);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) csv << ',' << format_double(s.result.theta_hat(i, j));
    }
    csv << '\n';
  }
  csv.close();
  if (!csv) throw IoError("write failed: " + (dir / "reps.csv").string());

  rec.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(dir / "run_record.json", run_record_to_json(rec));
  return rec;
}

MonteCarloLimit cmd_asymptotics(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  if (!cfg.model.discrete()) throw InvalidInput("asymptotics needs a discrete model");
  const std::filesystem::path dir(cfg.output_dir);
  ensure_dir(dir);
  const long t = std::lround(resolved_horizon(cfg));
  MonteCarloLimit mc = monte_carlo_limit(cfg.model, *cfg.T, t, static_cast<int>(cfg.reps), cfg.seed, cfg.rate_exponent, jobs);
  write_samples_csv(dir / "samples.csv", mc);
  Json summary = monte_carlo_summary_to_json(mc);
  summary["config"] = config_to_json(cfg);
  write_json(dir / "summary.json", summary);
  return mc;
}

}  // namespace carest
