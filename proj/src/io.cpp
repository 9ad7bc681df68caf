#include "carest/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace carest {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size() && s.find_first_not_of(" \r\t", used) != std::string::npos) throw IoError("bad number: " + s);
    return x;
  } catch (const std::logic_error&) {
    throw IoError("bad number: '" + s + "'");
  }
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream os(file);
  if (!os) throw IoError("cannot write " + file.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw IoError("cannot read " + file.string());
  return is;
}

void close_out(std::ofstream& os, const std::filesystem::path& file) {
  os.flush();
  if (!os) throw IoError("write failed: " + file.string());
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const Json& j) {
  if (j.is_number()) {
    Mat m(1, 1);
    m(0, 0) = j.get<double>();
    return m;
  }
  if (!j.is_array() || j.empty()) throw InvalidInput("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().is_array() ? j.front().size() : 0);
  if (cols == 0) throw InvalidInput("matrix rows must be non-empty arrays");
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw InvalidInput("matrix rows differ in length");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Json model_to_json(const ModelSpec& spec) {
  Json j;
  j["kind"] = to_string(spec.kind);
  j[spec.discrete() ? "phi" : "h"] = matrix_to_json(spec.phi_or_h);
  j["sigma"] = matrix_to_json(spec.sigma);
  if (!spec.ma.empty()) {
    Json ma = Json::array();
    for (const auto& m : spec.ma) ma.push_back(matrix_to_json(m));
    j["ma"] = std::move(ma);
  }
  j["driver"] = to_string(spec.driver);
  j["hurst"] = spec.hurst;
  return j;
}

ModelSpec model_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("model must be an object");
  ModelSpec spec;
  try {
    spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
    const char* key = spec.kind == ModelKind::OuCont ? "h" : "phi";
    spec.phi_or_h = matrix_from_json(j.at(key));
    spec.sigma = matrix_from_json(j.at("sigma"));
    if (j.contains("ma")) {
      for (const auto& m : j.at("ma")) spec.ma.push_back(matrix_from_json(m));
    }
    const std::string default_driver = spec.kind == ModelKind::OuCont ? "BM" : "IID_GAUSS";
    spec.driver = driver_from_string(j.value("driver", default_driver));
    spec.hurst = j.value("hurst", 0.5);
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("model: ") + e.what());
  }
  return spec;
}

void write_path_csv(std::ostream& os, const Path& path) {
  os << 't';
  for (Eigen::Index i = 0; i < path.dim(); ++i) os << ",x" << (i + 1);
  os << '\n';
  for (Eigen::Index k = 0; k < path.points(); ++k) {
    os << format_double(path.time(k));
    for (Eigen::Index i = 0; i < path.dim(); ++i) os << ',' << format_double(path.values(i, k));
    os << '\n';
  }
}

void write_path_csv(const std::filesystem::path& file, const Path& path) {
  auto os = open_out(file);
  write_path_csv(os, path);
  close_out(os, file);
}

Path read_path_csv(std::istream& is, PathKind kind) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("path CSV is empty");
  const auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "t") throw IoError("path CSV header must be t,x1,...");
  const std::size_t n = header.size() - 1;
  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != n + 1) throw IoError("path CSV row has the wrong number of columns");
    times.push_back(parse_double(cells[0]));
    for (std::size_t i = 1; i <= n; ++i) values.push_back(parse_double(cells[i]));
  }
  if (times.size() < 2) throw IoError("path CSV needs at least two rows");
  Path p;
  p.kind = kind;
  p.t0 = times[0];
  p.dt = times[1] - times[0];
  if (!(p.dt > 0.0)) throw IoError("path CSV times must increase");
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double expect = p.t0 + static_cast<double>(k) * p.dt;
    if (std::abs(times[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) throw IoError("path CSV grid is not uniform");
  }
  p.values = Eigen::Map<const Mat>(values.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(times.size()));
  return p;
}

Path read_path_csv(const std::filesystem::path& file, PathKind kind) {
  auto is = open_in(file);
  return read_path_csv(is, kind);
}

void write_autocov_csv(std::ostream& os, const Autocov& seq) {
  const Eigen::Index n = seq.dim();
  os << "lag";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) os << ",g" << (i + 1) << (j + 1);
  }
  os << '\n';
  for (std::size_t k = 0; k < seq.size(); ++k) {
    os << format_double(seq.lags[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) os << ',' << format_double(seq.gammas[k](i, j));
    }
    os << '\n';
  }
}

void write_autocov_csv(const std::filesystem::path& file, const Autocov& seq) {
  auto os = open_out(file);
  write_autocov_csv(os, seq);
  close_out(os, file);
}

Autocov read_autocov_csv(std::istream& is, AutocovProvenance provenance, long sample_size) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("autocovariance CSV is empty");
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "lag") throw IoError("autocovariance CSV header must start with lag");
  const auto entries = header.size() - 1;
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(entries))));
  if (n < 1 || static_cast<std::size_t>(n * n) != entries) throw IoError("autocovariance CSV needs n^2 entries per row");
  std::vector<Mat> gammas;
  std::vector<double> lags;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != entries + 1) throw IoError("autocovariance CSV row has the wrong number of columns");
    lags.push_back(parse_double(cells[0]));
    Mat g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = parse_double(cells[static_cast<std::size_t>(1 + i * n + j)]);
    }
    gammas.push_back(std::move(g));
  }
  if (gammas.empty()) throw IoError("autocovariance CSV has no rows");
  if (lags[0] != 0.0) throw IoError("autocovariance lags must start at 0");
  const double step = lags.size() > 1 ? lags[1] : 1.0;
  Autocov seq = make_autocov(std::move(gammas), step, provenance, sample_size);
  for (std::size_t k = 0; k < lags.size(); ++k) {
    if (std::abs(lags[k] - seq.lags[k]) > 1e-9 * std::max(1.0, std::abs(lags[k]))) throw IoError("autocovariance lag grid is not uniform");
    seq.lags[k] = lags[k];
  }
  return seq;
}

Json coefficients_to_json(const CareCoefficients<double>& k) {
  return Json{{"b", matrix_to_json(k.b)},
              {"c", matrix_to_json(k.c)},
              {"d", matrix_to_json(k.d)},
              {"t", k.horizon_t},
              {"provenance", to_string(k.provenance)}};
}

CareCoefficients<double> coefficients_from_json(const Json& j) {
  CareCoefficients<double> k;
  try {
    k.b = matrix_from_json(j.at("b"));
    k.c = matrix_from_json(j.at("c"));
    k.d = matrix_from_json(j.at("d"));
    k.horizon_t = j.at("t").get<double>();
    const std::string prov = j.value("provenance", "discrete");
    if (prov == "discrete") {
      k.provenance = CoefficientProvenance::Discrete;
    } else if (prov == "continuous") {
      k.provenance = CoefficientProvenance::Continuous;
    } else {
      throw InvalidInput("unknown coefficient provenance '" + prov + "'");
    }
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("coefficients: ") + e.what());
  }
  const auto n = k.b.rows();
  if (k.b.cols() != n || k.c.rows() != n || k.c.cols() != n || k.d.rows() != n || k.d.cols() != n) {
    throw InvalidInput("coefficients: B, C, D must be square of one size");
  }
  k.pd_report_c = definiteness(k.c);
  k.pd_report_d = definiteness(k.d);
  return k;
}

Json estimate_to_json(const EstimateResult& res) {
  Json j{{"theta_hat", matrix_to_json(res.theta_hat)},
         {"gate_passed", res.gate_passed},
         {"failure", to_string(res.failure)},
         {"residual_norm", res.residual_norm},
         {"horizon_t", res.horizon_t},
         {"sample_size", res.sample_size},
         {"min_eig_c", res.coeffs.pd_report_c.min_eigenvalue},
         {"min_eig_d", res.coeffs.pd_report_d.min_eigenvalue},
         {"coefficients", coefficients_to_json(res.coeffs)}};
  if (res.h_recovered) {
    j["h_recovered"] = matrix_to_json(*res.h_recovered);
    j["h_clamped"] = res.h_clamped;
  }
  if (!res.failure_detail.empty()) j["failure_detail"] = res.failure_detail;
  return j;
}

void write_samples_csv(std::ostream& os, const MonteCarloLimit& mc) {
  os << "rep,seed";
  for (Eigen::Index i = 0; i < mc.theta_err.cols(); ++i) os << ",theta_err_" << i + 1;
  for (Eigen::Index i = 0; i < mc.z.cols(); ++i) os << ",z_" << i + 1;
  os << '\n';
  for (Eigen::Index r = 0; r < mc.theta_err.rows(); ++r) {
    os << r << ',' << mc.seeds[static_cast<std::size_t>(r)];
    for (Eigen::Index i = 0; i < mc.theta_err.cols(); ++i) os << ',' << format_double(mc.theta_err(r, i));
    for (Eigen::Index i = 0; i < mc.z.cols(); ++i) os << ',' << format_double(mc.z(r, i));
    os << '\n';
  }
}

void write_samples_csv(const std::filesystem::path& file, const MonteCarloLimit& mc) {
  auto os = open_out(file);
  write_samples_csv(os, mc);
  close_out(os, file);
}

Json monte_carlo_summary_to_json(const MonteCarloLimit& mc) {
  std::vector<double> mean(mc.mean.data(), mc.mean.data() + mc.mean.size());
  return Json{{"T", mc.T},
              {"t", mc.t},
              {"reps", mc.theta_err.rows()},
              {"rate_exponent", mc.rate_exponent},
              {"gate_failures", mc.gate_failures},
              {"mean", mean},
              {"covariance", matrix_to_json(mc.covariance)},
              {"r_squared", mc.r_squared}};
}

void write_json(const std::filesystem::path& file, const Json& j) {
  auto os = open_out(file);
  os << j.dump(2) << '\n';
  close_out(os, file);
}

Json read_json(const std::filesystem::path& file) {
  auto is = open_in(file);
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw IoError(file.string() + ": " + e.what());
  }
}

}  // namespace carest
