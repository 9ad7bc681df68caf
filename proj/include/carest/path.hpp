#pragma once

#include "carest/types.hpp"

namespace carest {

enum class PathKind { Discrete, ContinuousSampled };

/// An n-dimensional sample path on a uniform grid. Column k holds the
/// observation at time t0 + k * dt.
struct Path {
  Mat values;  // n x (N+1)
  double t0{0.0};
  double dt{1.0};
  PathKind kind{PathKind::Discrete};

  Eigen::Index dim() const { return values.rows(); }
  Eigen::Index points() const { return values.cols(); }
  double time(Eigen::Index k) const { return t0 + static_cast<double>(k) * dt; }
  double span() const { return static_cast<double>(points() - 1) * dt; }
};

/// Throws InvalidInput unless the path has finite entries, dt > 0 and at
/// least two points.
void validate_path(const Path& path);

/// Noise of the AR(1)-type representation: increments DeltaG and the
/// cumulative process G with G at the first grid point equal to zero.
struct NoisePath {
  Mat increments;  // n x N
  Mat cumulative;  // n x (N+1)
  double t0{0.0};  // time index of cumulative.col(0)
};

NoisePath make_noise_path(const Mat& increments, double t0 = 0.0);

}  // namespace carest
