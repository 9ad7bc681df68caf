#include "carest/autocovariance.hpp"

#include "carest/process_models.hpp"

namespace carest {

namespace {

std::vector<Mat> lagged_products(const Mat& x, long max_lag) {
  const Eigen::Index T = x.cols();
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(max_lag) + 1);
  for (long s = 0; s <= max_lag; ++s) {
    const Eigen::Index len = T - s;
    // sum_k X_{k+s} X_k^T over the overlapping window
    Mat g = x.rightCols(len) * x.leftCols(len).transpose();
    out.push_back(g / static_cast<double>(T));
  }
  out[0] = (out[0] + out[0].transpose()).eval() / 2.0;
  return out;
}

Mat centered_values(const Path& path, bool center) {
  if (!center) return path.values;
  const Vec mean = path.values.rowwise().mean();
  return path.values.colwise() - mean;
}

}  // namespace

Autocov sample_autocov(const Path& path, long max_lag, bool center) {
  validate_path(path);
  const long T = static_cast<long>(path.points());
  if (max_lag < 0 || max_lag >= T) throw InvalidInput("max_lag must lie in [0, T)");
  return make_autocov(lagged_products(centered_values(path, center), max_lag), 1.0, AutocovProvenance::Sample, T);
}

Autocov sample_autocov_sampled(const Path& path, double max_lag_time, bool center) {
  validate_path(path);
  if (!(max_lag_time >= 0.0)) throw InvalidInput("max_lag_time must be >= 0");
  if (max_lag_time > path.span() / 2.0 + 1e-9 * path.dt) throw InvalidInput("max_lag_time exceeds half the observation span");
  const long max_lag = static_cast<long>(std::floor(max_lag_time / path.dt + 1e-7));
  const long T = static_cast<long>(path.points());
  return make_autocov(lagged_products(centered_values(path, center), max_lag), path.dt, AutocovProvenance::Sample, T);
}

}  // namespace carest
