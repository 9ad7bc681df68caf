#pragma once

// Declarative experiment configs and the seeded simulate / estimate /
// asymptotics drivers behind the command-line tool.

#include "carest/estimation.hpp"
#include "carest/io.hpp"
#include "carest/process_models.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace carest {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
  ModelSpec model;
  std::optional<long> T;          // discrete models: observations per rep
  std::optional<double> t_end;    // continuous models
  std::optional<double> dt;
  std::optional<double> horizon_t;  // absent: PD-gate rule (discrete only)
  std::optional<long> burn_in;      // absent: 0 for VAR1, default_burn_in for VARMA
  long reps{1};
  std::uint64_t seed{0};
  double rate_exponent{0.5};
  std::string output_dir{"out"};
  std::vector<std::string> checks;

  /// Throws InvalidInput when a field is out of range, a required field is
  /// missing for the model kind, or a check names no registered suite.
  void validate() const;

  bool operator==(const ExperimentConfig& other) const;
};

Json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& file);

/// 64-bit FNV-1a of the compact JSON serialization.
std::uint64_t config_hash(const ExperimentConfig& cfg);

long resolved_burn_in(const ExperimentConfig& cfg);
/// Explicit horizon, or the PD-gate rule on the theoretical autocovariances.
double resolved_horizon(const ExperimentConfig& cfg);

/// The path of repetition `rep`, drawn with seed derive_seed(cfg.seed, rep).
Path simulate_rep(const ExperimentConfig& cfg, std::uint64_t rep);

struct RepSummary {
  long rep{0};
  std::uint64_t seed{0};
  std::string source;  // input file, empty when simulated
  EstimateResult result;
  double error{0.0};   // spectral norm of the estimate minus the true parameter
};

struct RunRecord {
  std::uint64_t config_hash{0};
  ExperimentConfig config;
  std::vector<RepSummary> reps;
  double gate_failure_rate{0.0};
  double median_error{0.0};
  double mean_error{0.0};
  double wall_clock_seconds{0.0};
};

Json run_record_to_json(const RunRecord& rec);

/// Writes path_<rep>.csv for every rep plus manifest.json (seeds, files).
std::vector<std::filesystem::path> cmd_simulate(const ExperimentConfig& cfg, int jobs);

/// Simulates (or reads `inputs`) and estimates every rep; writes
/// run_record.json and reps.csv under output_dir.
RunRecord cmd_estimate(const ExperimentConfig& cfg, int jobs, const std::vector<std::filesystem::path>& inputs = {});

/// Monte Carlo sampling of the normalized estimation error; writes
/// samples.csv and summary.json under output_dir.
MonteCarloLimit cmd_asymptotics(const ExperimentConfig& cfg, int jobs);

}  // namespace carest
