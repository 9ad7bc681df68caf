#include "carest/estimation.hpp"

#include <algorithm>
#include <cmath>

namespace carest {

const char* to_string(GateFailure failure) {
  switch (failure) {
    case GateFailure::None: return "none";
    case GateFailure::CNotPd: return "c_not_pd";
    case GateFailure::DNotPd: return "d_not_pd";
    case GateFailure::SolverFailed: return "solver_failed";
  }
  return "?";
}

EstimateResult estimate_from_coefficients(const CareCoefficients<double>& coeffs, long sample_size) {
  EstimateResult res;
  const Eigen::Index n = coeffs.dim();
  res.theta_hat = Mat::Zero(n, n);
  res.horizon_t = coeffs.horizon_t;
  res.sample_size = sample_size;
  res.coeffs = coeffs;
  if (!coeffs.pd_report_c.is_pd) {
    res.failure = GateFailure::CNotPd;
    res.failure_detail = "min eigenvalue of C = " + std::to_string(coeffs.pd_report_c.min_eigenvalue);
    return res;
  }
  if (!coeffs.pd_report_d.is_pd) {
    res.failure = GateFailure::DNotPd;
    res.failure_detail = "min eigenvalue of D = " + std::to_string(coeffs.pd_report_d.min_eigenvalue);
    return res;
  }
  try {
    const auto sol = solve_care(coeffs);
    res.theta_hat = sol.x;
    res.residual_norm = sol.residual_norm;
    res.gate_passed = true;
  } catch (const NoSolution& e) {
    res.failure = GateFailure::SolverFailed;
    res.failure_detail = e.what();
    res.residual_norm = e.best_residual();
  }
  return res;
}

EstimateResult estimate_theta_from_autocov(const Autocov& gammas, const Mat& v_t, long t) {
  EstimateResult res = estimate_from_coefficients(build_coeffs_discrete(gammas, v_t, t), gammas.sample_size);
  if (res.gate_passed) {
    auto rec = recover_H(res.theta_hat);
    res.h_recovered = std::move(rec.h);
    res.h_clamped = rec.clamped;
  }
  return res;
}

EstimateResult estimate_theta_discrete(const Path& path, const Mat& v_t, long t, std::optional<long> max_lag) {
  validate_path(path);
  const long lags = max_lag.value_or(t);
  if (lags < t) throw InvalidInput("max_lag must be >= t");
  if (path.points() <= t) throw InvalidInput("estimation needs T > t");
  return estimate_theta_from_autocov(sample_autocov(path, lags, true), v_t, t);
}

RecoveredH recover_H(const Mat& theta_hat) {
  const Eigen::Index n = theta_hat.rows();
  if (theta_hat.cols() != n) throw InvalidInput("recover_H: Theta is not square");
  if (theta_hat.isZero(0.0)) return {Mat::Zero(n, n), false};
  const auto eig = sym_eig(Mat(Mat::Identity(n, n) - theta_hat));
  constexpr double lo = 1e-6;
  constexpr double hi = 1.0 - 1e-6;
  bool clamped = false;
  Vec logs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = std::clamp(eig.lambda(i), lo, hi);
    clamped = clamped || l != eig.lambda(i);
    logs(i) = -std::log(l);
  }
  Mat h = eig.q * logs.asDiagonal() * eig.q.transpose();
  return {(h + h.transpose()) / 2.0, clamped};
}

EstimateResult estimate_H_from_autocov(const Autocov& gammas, const Mat& v_t, double t) {
  EstimateResult res = estimate_from_coefficients(build_coeffs_continuous(gammas, v_t, t), gammas.sample_size);
  if (res.gate_passed) res.h_recovered = res.theta_hat;
  return res;
}

EstimateResult estimate_H_continuous(const Path& path, const Mat& v_t, double t) {
  validate_path(path);
  if (!(t > 0.0)) throw InvalidInput("horizon t must be positive");
  if (t > path.span() / 2.0 + 1e-9 * path.dt) throw InvalidInput("horizon t exceeds half the observation span");
  return estimate_H_from_autocov(sample_autocov_sampled(path, t, true), v_t, t);
}

std::optional<long> select_horizon(const Autocov& gammas, const std::function<Mat(long)>& v, long max_t) {
  for (long t = 1; t <= max_t && static_cast<std::size_t>(t) < gammas.size(); ++t) {
    const auto k = build_coeffs_discrete(gammas, v(t), t);
    if (k.pd_report_c.is_pd && k.pd_report_d.is_pd) return t;
  }
  return std::nullopt;
}

std::optional<long> select_horizon(const ModelSpec& spec, long max_t) {
  const Autocov gammas = theoretical_gamma(spec, max_t);
  return select_horizon(gammas, [&spec](long t) { return noise_variance_v(spec, static_cast<double>(t)); }, max_t);
}

namespace {

double scalar_gamma(const Autocov& gamma, long k) {
  if (gamma.dim() != 1) throw InvalidInput("univariate operation needs n = 1");
  return gamma.at_signed(k)(0, 0);
}

}  // namespace

QuadraticRoots univariate_quadratic_roots(const Autocov& gamma, double r_t, long t) {
  const double g = scalar_gamma(gamma, t);
  const double gp = scalar_gamma(gamma, t + 1);
  const double gm = scalar_gamma(gamma, t - 1);
  const double scale = std::max({std::abs(g), std::abs(gp), std::abs(gm), std::abs(r_t)});
  if (scale == 0.0 || std::abs(g) <= 1e-14 * scale) throw DegenerateEquation("gamma(t) = 0: moment equation is not quadratic");
  const double a = g;
  const double b = -(gp + gm);
  const double c = g - r_t;
  const double disc = b * b - 4.0 * a * c;
  QuadraticRoots out;
  if (disc < -1e-14 * std::max(b * b, std::abs(4.0 * a * c))) return out;
  out.real = true;
  const double sq = std::sqrt(std::max(disc, 0.0));
  // Stable pair: q = -(b + sign(b) sq)/2, roots q/a and c/q.
  const double qv = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double x1, x2;
  if (qv == 0.0) {
    x1 = x2 = 0.0;
  } else {
    x1 = qv / a;
    x2 = c / qv;
  }
  out.root1 = std::min(x1, x2);
  out.root2 = std::max(x1, x2);
  return out;
}

DegeneracyReport degeneracy_check(const Autocov& gamma, const std::function<double(long)>& r,
                                  const std::vector<long>& t_range, double tol) {
  DegeneracyReport rep;
  if (t_range.empty()) return rep;
  rep.empty = false;
  rep.t_values = t_range;
  bool same = true;
  for (long t : t_range) {
    rep.roots.push_back(univariate_quadratic_roots(gamma, r(t), t));
    const auto& rt = rep.roots.back();
    const auto& r0 = rep.roots.front();
    if (!rt.real || std::abs(rt.root1 - r0.root1) > tol || std::abs(rt.root2 - r0.root2) > tol) same = false;
  }
  const auto& first = rep.roots.front();
  rep.degenerate = same && first.real && first.root1 > 0.0 && first.root2 > 0.0;
  if (!rep.degenerate) return rep;
  rep.phi = first.root1;
  rep.phi_tilde = first.root2;

  rep.quadratic2_holds = true;
  for (long t : t_range) {
    if (t < 1) continue;
    Mat v(1, 1);
    v(0, 0) = 0.0;
    for (long k = 1; k <= t; ++k) {
      for (long j = 1; j <= t; ++j) v(0, 0) += r(k - j);
    }
    const auto k = build_coeffs_discrete(gamma, v, t);
    const double b = k.b(0, 0), c = k.c(0, 0), d = k.d(0, 0);
    auto q2 = [&](double theta) { return std::abs(c * theta * theta - 2.0 * b * theta - d); };
    rep.quadratic2_t.push_back(t);
    rep.quadratic2_residual.push_back(q2(1.0 - rep.phi));
    rep.quadratic2_residual_tilde.push_back(q2(1.0 - rep.phi_tilde));
    if (rep.quadratic2_residual.back() > tol || rep.quadratic2_residual_tilde.back() > tol) rep.quadratic2_holds = false;
  }
  return rep;
}

double weighted_gamma_integral(const std::function<double(double)>& gamma, double t, double delta, double dt) {
  if (!(delta > 0.0) || !(dt > 0.0)) throw InvalidInput("delta and dt must be positive");
  const long m = std::lround(delta / dt);
  if (m < 1 || std::abs(static_cast<double>(m) * dt - delta) > 1e-9 * delta) throw InvalidInput("delta must be a multiple of dt");
  double w = 0.0;
  for (long i = 0; i <= m; ++i) {
    const double wi = (i == 0 || i == m) ? dt / 2.0 : dt;
    const double u = static_cast<double>(i) * dt;  // distance from t - delta (resp. t + delta)
    w += wi * u * (gamma(t - delta + u) + gamma(t + delta - u));
  }
  return w;
}

double univariate_H_continuous(const std::function<double(double)>& gamma, double r_delta_t, double t,
                               double delta, double dt) {
  const double w = weighted_gamma_integral(gamma, t, delta, dt);
  if (!(w > 0.0)) throw DegenerateEquation("weighted autocovariance integral is not positive");
  const double g = gamma(t), gp = gamma(t + delta), gm = gamma(t - delta);
  const double num = r_delta_t - 2.0 * g + gp + gm;
  const double radicand = num / w;
  const double scale = std::max({std::abs(r_delta_t), std::abs(g), std::abs(gp), std::abs(gm)}) / w;
  if (radicand < 0.0) {
    if (radicand >= -1e-12 * std::max(1.0, scale)) return 0.0;
    throw NoRealSolution("univariate continuous equation has a negative radicand", radicand);
  }
  return std::sqrt(radicand);
}

double univariate_H_continuous(const Autocov& gamma_grid, double r_delta_t, double t, double delta) {
  if (gamma_grid.dim() != 1) throw InvalidInput("univariate operation needs n = 1");
  auto g = [&gamma_grid](double s) { return gamma_grid.at_time(s)(0, 0); };
  return univariate_H_continuous(g, r_delta_t, t, delta, gamma_grid.lag_step);
}

Mat check_lemma_noncare(const Autocov& gamma, const Mat& phi, long t) {
  const Eigen::Index n = gamma.dim();
  if (phi.rows() != n || phi.cols() != n) throw InvalidInput("check_lemma_noncare: Phi dimension mismatch");
  const Mat g = gamma.at_signed(t);
  return phi * g * phi.transpose() - gamma.at_signed(t + 1) * phi.transpose() - phi * gamma.at_signed(t - 1) + g;
}

Mat check_lemma_noncare_cont(const Autocov& gamma, const Mat& h, double t, double delta) {
  const Eigen::Index n = gamma.dim();
  if (h.rows() != n || h.cols() != n) throw InvalidInput("check_lemma_noncare_cont: H dimension mismatch");
  if (!(delta > 0.0)) throw InvalidInput("delta must be positive");
  const double dt = gamma.lag_step;
  const long m = gamma.grid_index(delta);
  const long c = gamma.grid_index(t);
  if (m < 1) throw InvalidInput("delta must span at least one grid step");
  Mat upper = Mat::Zero(n, n), lower = Mat::Zero(n, n), weighted = Mat::Zero(n, n);
  for (long i = 0; i <= m; ++i) {
    const double wi = (i == 0 || i == m) ? dt / 2.0 : dt;
    const double u = static_cast<double>(i) * dt;
    const Mat gu = gamma.at_signed(c + i);      // gamma(t + u)
    const Mat gl = gamma.at_signed(c - m + i);  // gamma(t - delta + u)
    upper += wi * gu;
    lower += wi * gl;
    weighted += wi * u * (gl + gamma.at_signed(c + m - i));
  }
  return 2.0 * gamma.at_signed(c) - gamma.at_signed(c + m) - gamma.at_signed(c - m) + (upper - lower) * h +
         h * (lower - upper) + h * weighted * h;
}

}  // namespace carest
