#pragma once

// The linear map L1 from stacked autocovariance errors to the coefficient
// errors vec(dC, dB, dD), in discrete and quadrature form, and Monte Carlo
// sampling of the normalized estimation error.

#include "carest/autocovariance.hpp"
#include "carest/matrix_core.hpp"
#include "carest/process_models.hpp"
#include "carest/riccati.hpp"

#include <cstdint>
#include <vector>

namespace carest {

/// The n^2 x n^2 commutation matrix: P vec(A) = vec(A^T) under column-major vec.
template <typename Scalar = double>
MatrixX<Scalar> transpose_permutation(Eigen::Index n) {
  if (n < 1) throw InvalidInput("transpose_permutation needs n >= 1");
  MatrixX<Scalar> p = MatrixX<Scalar>::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) p(i + j * n, j + i * n) = Scalar(1);
  }
  return p;
}

template <typename Scalar = double>
struct L1Operator {
  MatrixX<Scalar> matrix;  // 3n^2 x (blocks * n^2); rows: dC, dB, dD
  Eigen::Index n{0};
  Scalar t{0};

  VectorX<Scalar> apply(const VectorX<Scalar>& z) const {
    if (z.size() != matrix.cols()) throw InvalidInput("L1: input length mismatch");
    return matrix * z;
  }
};

/// Discrete L1 at integer horizon t:
///   dC = sum_{k=0}^{t-1} (t-k) Z_k + sum_{k=1}^{t-1} (t-k) P Z_k
///   dB = sum_{k=1}^{t} Z_{k-1} - P Z_k
///   dD = Z_t + P Z_t - 2 Z_0
/// where Z_k is the k-th n^2 block of the input.
template <typename Scalar = double>
L1Operator<Scalar> build_L1(Eigen::Index n, long t) {
  if (t < 1) throw InvalidInput("build_L1 needs t >= 1");
  const Eigen::Index b = n * n;
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(b, b);
  const MatrixX<Scalar> p = transpose_permutation<Scalar>(n);
  L1Operator<Scalar> op;
  op.n = n;
  op.t = Scalar(t);
  op.matrix = MatrixX<Scalar>::Zero(3 * b, (t + 1) * b);
  auto block = [&](int row, long k) { return op.matrix.block(row * b, k * b, b, b); };
  for (long k = 0; k < t; ++k) block(0, k) += Scalar(t - k) * id;
  for (long k = 1; k < t; ++k) block(0, k) += Scalar(t - k) * p;
  for (long k = 1; k <= t; ++k) {
    block(1, k - 1) += id;
    block(1, k) -= p;
  }
  block(2, t) += id + p;
  block(2, 0) -= Scalar(2) * id;
  return op;
}

/// Quadrature L1 on the grid s_k = k h, k = 0..m (t = m h), trapezoid rule:
///   dC = int_0^t (t-s)(Y_s + P Y_s) ds,  dB = int_0^t (Y_s - P Y_s) ds,
///   dD = Y_t + P Y_t - 2 Y_0.
template <typename Scalar = double>
L1Operator<Scalar> build_L1_continuous(Eigen::Index n, Scalar h, long m) {
  if (m < 1 || !(h > Scalar(0))) throw InvalidInput("build_L1_continuous needs a grid with m >= 1, h > 0");
  const Eigen::Index b = n * n;
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(b, b);
  const MatrixX<Scalar> p = transpose_permutation<Scalar>(n);
  const VectorX<Scalar> w = trapezoid_weights(m, h);
  const Scalar t = Scalar(m) * h;
  L1Operator<Scalar> op;
  op.n = n;
  op.t = t;
  op.matrix = MatrixX<Scalar>::Zero(3 * b, (m + 1) * b);
  auto block = [&](int row, long k) { return op.matrix.block(row * b, k * b, b, b); };
  for (long k = 0; k <= m; ++k) {
    const Scalar s = Scalar(k) * h;
    block(0, k) += w(k) * (t - s) * (id + p);
    block(1, k) += w(k) * (id - p);
  }
  block(2, m) += id + p;
  block(2, 0) -= Scalar(2) * id;
  return op;
}

/// vec(est(0) - truth(0)) || ... || vec(est(t) - truth(t)).
struct StackedCovError {
  Vec z;
  Eigen::Index n{0};
  long t{0};

  /// Blockwise transpose ordering (the permuted companion of z).
  Vec permuted() const;
};

StackedCovError stack_cov_error(const Autocov& est, const Autocov& truth, long t);

/// vec(dC) || vec(dB) || vec(dD) between two coefficient sets.
template <typename Scalar>
VectorX<Scalar> stacked_coefficient_delta(const CareCoefficients<Scalar>& est, const CareCoefficients<Scalar>& truth) {
  const Eigen::Index b = est.dim() * est.dim();
  VectorX<Scalar> out(3 * b);
  out << vec(MatrixX<Scalar>(est.c - truth.c)), vec(MatrixX<Scalar>(est.b - truth.b)), vec(MatrixX<Scalar>(est.d - truth.d));
  return out;
}

/// max |L1 z - vec(dC, dB, dD)| with the right side computed from discrete
/// coefficient differences (v(t) cancels and is taken as zero).
double verify_L1_identity(const Autocov& gammas_true, const Autocov& gammas_est, long t);

struct MonteCarloLimit {
  long T{0};
  long t{0};
  double rate_exponent{0.5};
  std::vector<std::uint64_t> seeds;
  Mat theta_err;  // reps x n^2: l(T) vec(Theta-hat - Theta)
  Mat z;          // reps x (t+1) n^2: l(T) stacked autocovariance error
  Mat l1z;        // reps x 3 n^2: L1 applied to z
  std::vector<bool> gate_passed;
  long gate_failures{0};
  Vec mean;       // componentwise mean of theta_err
  Mat covariance; // of theta_err
  double r_squared{0.0};
};

/// reps independent draws of l(T) vec(Theta-hat - Theta) (l(T) = T^rate) and
/// of the normalized autocovariance errors for a discrete model, with the
/// regression R^2 of the former on L1 of the latter as a linearity
/// diagnostic. Repetition r uses seed derive_seed(seed, r).
MonteCarloLimit monte_carlo_limit(const ModelSpec& spec, long T, long t, int reps, std::uint64_t seed,
                                  double rate_exponent = 0.5, int jobs = 1);

/// Pooled R^2 of the least-squares fit of every column of y on [1, x].
double regression_r_squared(const Mat& y, const Mat& x);

}  // namespace carest
