#pragma once

// CSV and JSON persistence for paths, autocovariances, coefficients,
// estimates and Monte Carlo sample sets. Numbers are written with 17
// significant digits so that files round-trip exactly.

#include "carest/asymptotics.hpp"
#include "carest/autocovariance.hpp"
#include "carest/estimation.hpp"
#include "carest/path.hpp"
#include "carest/process_models.hpp"
#include "carest/riccati.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace carest {

using Json = nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double x);

/// Matrices as row-major nested arrays.
Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);

Json model_to_json(const ModelSpec& spec);
ModelSpec model_from_json(const Json& j);

/// Header `t,x1,...,xn`, one row per grid point.
void write_path_csv(std::ostream& os, const Path& path);
void write_path_csv(const std::filesystem::path& file, const Path& path);
/// Reads a path written by write_path_csv. dt is taken from the first two
/// time stamps and the grid must be uniform.
Path read_path_csv(std::istream& is, PathKind kind = PathKind::Discrete);
Path read_path_csv(const std::filesystem::path& file, PathKind kind = PathKind::Discrete);

/// Header `lag,g11,g12,...,gnn` (row-major within each lag).
void write_autocov_csv(std::ostream& os, const Autocov& seq);
void write_autocov_csv(const std::filesystem::path& file, const Autocov& seq);
Autocov read_autocov_csv(std::istream& is, AutocovProvenance provenance = AutocovProvenance::Sample,
                         long sample_size = 0);

Json coefficients_to_json(const CareCoefficients<double>& k);
CareCoefficients<double> coefficients_from_json(const Json& j);

Json estimate_to_json(const EstimateResult& res);

/// One row per repetition: `rep,seed,theta_err_components...,z_components...`.
void write_samples_csv(std::ostream& os, const MonteCarloLimit& mc);
void write_samples_csv(const std::filesystem::path& file, const MonteCarloLimit& mc);

Json monte_carlo_summary_to_json(const MonteCarloLimit& mc);

void write_json(const std::filesystem::path& file, const Json& j);
Json read_json(const std::filesystem::path& file);

}  // namespace carest
