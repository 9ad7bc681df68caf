#include "carest/asymptotics.hpp"

#include "carest/estimation.hpp"
#include "carest/parallel.hpp"
#include "carest/rng.hpp"

#include <cmath>

namespace carest {

Vec StackedCovError::permuted() const {
  const Mat p = transpose_permutation(n);
  const Eigen::Index b = n * n;
  Vec out(z.size());
  for (long k = 0; k <= t; ++k) out.segment(k * b, b) = p * z.segment(k * b, b);
  return out;
}

StackedCovError stack_cov_error(const Autocov& est, const Autocov& truth, long t) {
  if (t < 0) throw InvalidInput("stack_cov_error needs t >= 0");
  if (est.size() <= static_cast<std::size_t>(t) || truth.size() <= static_cast<std::size_t>(t)) {
    throw InvalidInput("autocovariances do not cover lags 0..t");
  }
  if (est.dim() != truth.dim()) throw InvalidInput("autocovariance dimensions differ");
  StackedCovError out;
  out.n = est.dim();
  out.t = t;
  const Eigen::Index b = out.n * out.n;
  out.z.resize((t + 1) * b);
  for (long k = 0; k <= t; ++k) out.z.segment(k * b, b) = vec(Mat(est.gammas[k] - truth.gammas[k]));
  return out;
}

double verify_L1_identity(const Autocov& gammas_true, const Autocov& gammas_est, long t) {
  const Eigen::Index n = gammas_true.dim();
  const Mat zero_v = Mat::Zero(n, n);
  const auto k_true = build_coeffs_discrete(gammas_true, zero_v, t);
  const auto k_est = build_coeffs_discrete(gammas_est, zero_v, t);
  const Vec direct = stacked_coefficient_delta(k_est, k_true);
  const Vec via_operator = build_L1(n, t).apply(stack_cov_error(gammas_est, gammas_true, t).z);
  return (direct - via_operator).cwiseAbs().maxCoeff();
}

double regression_r_squared(const Mat& y, const Mat& x) {
  if (y.rows() != x.rows() || y.rows() < 2) throw InvalidInput("regression needs matching rows (>= 2)");
  Mat design(x.rows(), x.cols() + 1);
  design << Vec::Ones(x.rows()), x;
  const Eigen::CompleteOrthogonalDecomposition<Mat> cod(design);
  const Mat beta = cod.solve(y);
  const Mat resid = y - design * beta;
  const Mat centred = y.rowwise() - y.colwise().mean();
  const double ss_tot = centred.squaredNorm();
  if (ss_tot == 0.0) return 1.0;
  return 1.0 - resid.squaredNorm() / ss_tot;
}

MonteCarloLimit monte_carlo_limit(const ModelSpec& spec, long T, long t, int reps, std::uint64_t seed,
                                  double rate_exponent, int jobs) {
  validate_model(spec);
  if (!spec.discrete()) throw InvalidModel("monte_carlo_limit needs a discrete model");
  if (reps < 50) throw InvalidInput("monte_carlo_limit needs reps >= 50");
  if (t < 1 || T <= t) throw InvalidInput("need 1 <= t < T");
  const Eigen::Index n = spec.dim();
  const Eigen::Index b = n * n;
  const Autocov truth = theoretical_gamma(spec, t);
  const Mat v_t = noise_variance_v(spec, static_cast<double>(t));
  const Mat theta = Mat::Identity(n, n) - spec.phi_or_h;
  const L1Operator<double> l1 = build_L1(n, t);
  const double rate = std::pow(static_cast<double>(T), rate_exponent);

  MonteCarloLimit out;
  out.T = T;
  out.t = t;
  out.rate_exponent = rate_exponent;
  out.seeds.resize(static_cast<std::size_t>(reps));
  out.theta_err.resize(reps, b);
  out.z.resize(reps, (t + 1) * b);
  out.l1z.resize(reps, 3 * b);
  out.gate_passed.assign(static_cast<std::size_t>(reps), false);
  std::vector<char> passed(static_cast<std::size_t>(reps), 0);

  parallel_for(static_cast<std::size_t>(reps), jobs, [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_seed(seed, r);
    out.seeds[r] = rep_seed;
    // T observations X_1..X_T: simulate T-1 steps after the stationary start.
    const Path path = spec.kind == ModelKind::Var1 ? simulate_var1(spec, T - 1, 0, rep_seed)
                                                   : simulate_varma1q(spec, T - 1, 0, rep_seed);
    const Autocov est = sample_autocov(path, t, true);
    const EstimateResult res = estimate_theta_from_autocov(est, v_t, t);
    const Vec z = rate * stack_cov_error(est, truth, t).z;
    out.theta_err.row(static_cast<Eigen::Index>(r)) = rate * vec(Mat(res.theta_hat - theta)).transpose();
    out.z.row(static_cast<Eigen::Index>(r)) = z.transpose();
    out.l1z.row(static_cast<Eigen::Index>(r)) = l1.apply(z).transpose();
    passed[r] = res.gate_passed ? 1 : 0;
  });

  for (int r = 0; r < reps; ++r) {
    out.gate_passed[r] = passed[r] != 0;
    if (!passed[r]) ++out.gate_failures;
  }
  out.mean = out.theta_err.colwise().mean().transpose();
  const Mat centred = out.theta_err.rowwise() - out.mean.transpose();
  out.covariance = reps > 1 ? Mat(centred.transpose() * centred / static_cast<double>(reps - 1)) : Mat::Zero(b, b);
  out.r_squared = reps > 2 ? regression_r_squared(out.theta_err, out.l1z) : 0.0;
  return out;
}

}  // namespace carest
