#include "carest/process_models.hpp"

#include "carest/matrix_core.hpp"
#include "carest/rng.hpp"

#include <cmath>
#include <random>
#include <string>

namespace carest {

void validate_path(const Path& path) {
  if (path.values.rows() < 1 || path.values.cols() < 2) throw InvalidInput("path needs n >= 1 and at least two points");
  if (!(path.dt > 0.0) || !std::isfinite(path.dt)) throw InvalidInput("path dt must be positive");
  if (!all_finite(path.values)) throw InvalidInput("path has non-finite entries");
}

NoisePath make_noise_path(const Mat& increments, double t0) {
  NoisePath out;
  out.increments = increments;
  out.t0 = t0;
  out.cumulative = Mat::Zero(increments.rows(), increments.cols() + 1);
  for (Eigen::Index k = 0; k < increments.cols(); ++k) {
    out.cumulative.col(k + 1) = out.cumulative.col(k) + increments.col(k);
  }
  return out;
}

namespace {

void check_square(const Mat& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) throw InvalidModel(std::string(what) + " has the wrong shape");
  if (!all_finite(m)) throw InvalidModel(std::string(what) + " has non-finite entries");
}

std::vector<Mat> ma_with_identity(const ModelSpec& spec) {
  std::vector<Mat> theta;
  theta.push_back(Mat::Identity(spec.dim(), spec.dim()));
  for (const auto& m : spec.ma) theta.push_back(m);
  return theta;
}

std::vector<Mat> matrix_powers(const Mat& a, long count) {
  std::vector<Mat> p;
  p.reserve(static_cast<std::size_t>(count));
  p.push_back(Mat::Identity(a.rows(), a.cols()));
  for (long k = 1; k < count; ++k) p.push_back(a * p.back());
  return p;
}

/// Draws eps = S z with z standardized (Gaussian or unit-variance uniform).
class InnovationSource {
 public:
  InnovationSource(const Mat& sigma, Driver driver, std::uint64_t seed)
      : scale_(sqrt_psd(sigma)), uniform_(driver == Driver::IidUniform), rng_(seed, 0) {}

  Vec standard(Eigen::Index n) {
    Vec z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = gauss_(rng_);
    return z;
  }

  Vec draw() {
    Vec z(scale_.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      z(i) = uniform_ ? std::sqrt(3.0) * (2.0 * unit_(rng_) - 1.0) : gauss_(rng_);
    }
    return scale_ * z;
  }

 private:
  Mat scale_;
  bool uniform_;
  Philox4x32 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

SimulatedPath simulate_discrete(const ModelSpec& spec, long T, long burn_in, std::uint64_t seed) {
  validate_model(spec);
  if (!spec.discrete()) throw InvalidModel("discrete simulation needs a VAR1 or VARMA1Q model");
  if (T < 1) throw InvalidInput("T must be >= 1");
  if (burn_in < 0) throw InvalidInput("burn_in must be >= 0");

  const Eigen::Index n = spec.dim();
  const Mat& phi = spec.phi_or_h;
  const auto theta = ma_with_identity(spec);
  const long q = static_cast<long>(theta.size()) - 1;
  InnovationSource source(spec.sigma, spec.driver, seed);

  // history[i] = eps_{current - i}, i = 0..q-1, most recent first.
  std::vector<Vec> history(static_cast<std::size_t>(q), Vec::Zero(n));
  Vec x = Vec::Zero(n);

  if (burn_in == 0) {
    // X_0 = sum_m A_m eps_{-m} with A_m = sum_{i<=min(m,q)} Phi^{m-i} theta_i.
    // Terms m >= q equal Phi^{m-q} A_q eps_{-m}; their sum is independent of
    // the q pre-sample innovations and has the discrete Lyapunov covariance.
    const auto powers = matrix_powers(phi, q + 1);
    auto a_m = [&](long m) {
      Mat a = Mat::Zero(n, n);
      for (long i = 0; i <= std::min(m, q); ++i) a += powers[m - i] * theta[i];
      return a;
    };
    const Mat aq = a_m(q);
    const Mat tail_cov = solve_discrete_lyapunov(phi, Mat(aq * spec.sigma * aq.transpose()));
    x = sqrt_psd(tail_cov) * source.standard(n);
    for (long m = 0; m < q; ++m) {
      history[m] = source.draw();
      x += a_m(m) * history[m];
    }
  } else {
    for (long m = 0; m < q; ++m) history[m] = source.draw();
  }

  auto step = [&](Vec& state) {
    Vec eps = source.draw();
    Vec dg = eps;
    for (long i = 1; i <= q; ++i) dg += theta[i] * history[i - 1];
    if (q > 0) {
      for (long i = q - 1; i > 0; --i) history[i] = history[i - 1];
      history[0] = eps;
    }
    state = phi * state + dg;
    return dg;
  };

  for (long k = 0; k < burn_in; ++k) step(x);

  SimulatedPath out;
  out.path.values.resize(n, T + 1);
  out.path.t0 = 0.0;
  out.path.dt = 1.0;
  out.path.kind = PathKind::Discrete;
  out.increments.resize(n, T);
  out.path.values.col(0) = x;
  for (long k = 1; k <= T; ++k) {
    out.increments.col(k - 1) = step(x);
    out.path.values.col(k) = x;
  }
  return out;
}

}  // namespace

void validate_model(const ModelSpec& spec) {
  const Eigen::Index n = spec.phi_or_h.rows();
  if (n < 1) throw InvalidModel("model dimension must be >= 1");
  check_square(spec.phi_or_h, n, spec.discrete() ? "Phi" : "H");
  check_square(spec.sigma, n, "Sigma");
  try {
    (void)symmetrized(spec.phi_or_h);
    const auto rep = definiteness(spec.sigma);
    if (!rep.is_psd) throw InvalidModel("Sigma is not positive semidefinite");
  } catch (const InvalidModel&) {
    throw;
  } catch (const InvalidInput& e) {
    throw InvalidModel(e.what());
  }
  const auto eig = sym_eig(spec.phi_or_h);
  switch (spec.kind) {
    case ModelKind::Var1:
    case ModelKind::Varma1q:
      if (eig.lambda.maxCoeff() >= 1.0) throw InvalidModel("eigenvalue of Phi >= 1: not stationary");
      if (eig.lambda.minCoeff() <= 0.0) throw InvalidModel("Phi must be positive definite");
      if (spec.kind == ModelKind::Var1 && !spec.ma.empty()) throw InvalidModel("VAR1 model carries MA coefficients");
      for (const auto& m : spec.ma) check_square(m, n, "MA coefficient");
      if (spec.driver != Driver::IidGauss && spec.driver != Driver::IidUniform) {
        throw InvalidModel("discrete models use an iid driver");
      }
      break;
    case ModelKind::OuCont:
      if (eig.lambda.minCoeff() <= 0.0) throw InvalidModel("H must be positive definite");
      if (!spec.ma.empty()) throw InvalidModel("OU model carries MA coefficients");
      if (spec.driver != Driver::Bm && spec.driver != Driver::Fbm) throw InvalidModel("OU model needs a BM or FBM driver");
      if (spec.driver == Driver::Fbm && !(spec.hurst > 0.0 && spec.hurst < 1.0)) {
        throw InvalidModel("hurst index must lie in (0, 1)");
      }
      break;
  }
}

long default_burn_in(const ModelSpec& spec) {
  const double norm = spectral_norm(spec.phi_or_h);
  if (!(norm < 1.0)) throw InvalidModel("||Phi|| >= 1");
  return 10 * static_cast<long>(std::ceil(1.0 / (1.0 - norm)));
}

Path simulate_var1(const ModelSpec& spec, long T, long burn_in, std::uint64_t seed) {
  return simulate_var1_with_noise(spec, T, burn_in, seed).path;
}

SimulatedPath simulate_var1_with_noise(const ModelSpec& spec, long T, long burn_in, std::uint64_t seed) {
  if (spec.kind != ModelKind::Var1) throw InvalidModel("simulate_var1 needs a VAR1 model");
  return simulate_discrete(spec, T, burn_in, seed);
}

Path simulate_varma1q(const ModelSpec& spec, long T, long burn_in, std::uint64_t seed) {
  return simulate_varma1q_with_noise(spec, T, burn_in, seed).path;
}

SimulatedPath simulate_varma1q_with_noise(const ModelSpec& spec, long T, long burn_in, std::uint64_t seed) {
  if (spec.kind != ModelKind::Varma1q) throw InvalidModel("simulate_varma1q needs a VARMA1Q model");
  return simulate_discrete(spec, T, burn_in, seed);
}

namespace {

/// Stationary covariance Gamma (H Gamma + Gamma H = Sigma) and the exact
/// one-step covariance int_0^dt e^{-Hs} Sigma e^{-Hs} ds, both computed
/// entrywise in the eigenbasis of H.
struct OuMoments {
  Mat gamma0;
  Mat step_cov;
  Mat transition;
};

OuMoments ou_moments(const ModelSpec& spec, double dt) {
  const auto eig = sym_eig(spec.phi_or_h);
  const Mat st = eig.q.transpose() * spec.sigma * eig.q;
  const Eigen::Index n = spec.dim();
  Mat g(n, n), s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double l = eig.lambda(i) + eig.lambda(j);
      g(i, j) = st(i, j) / l;
      s(i, j) = st(i, j) * (-std::expm1(-l * dt)) / l;
    }
  }
  OuMoments m;
  m.gamma0 = eig.q * g * eig.q.transpose();
  m.gamma0 = (m.gamma0 + m.gamma0.transpose()).eval() / 2.0;
  m.step_cov = eig.q * s * eig.q.transpose();
  m.step_cov = (m.step_cov + m.step_cov.transpose()).eval() / 2.0;
  m.transition = spectral_apply(eig, [dt](double x) { return std::exp(-x * dt); });
  return m;
}

}  // namespace

Path simulate_ou(const ModelSpec& spec, double t_end, double dt, std::uint64_t seed) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be positive");
  if (!(t_end >= dt)) throw InvalidInput("t_end must be >= dt");
  if (spec.kind != ModelKind::OuCont) throw InvalidModel("simulate_ou needs an OU model");
  validate_model(spec);
  const Eigen::Index n = spec.dim();
  const long steps = std::max(1L, std::lround(t_end / dt));

  Path path;
  path.values.resize(n, steps + 1);
  path.t0 = 0.0;
  path.dt = dt;
  path.kind = PathKind::ContinuousSampled;

  if (spec.driver == Driver::Bm) {
    const OuMoments mom = ou_moments(spec, dt);
    const Mat start_scale = sqrt_psd(mom.gamma0);
    const Mat step_scale = sqrt_psd(mom.step_cov);
    Philox4x32 rng(seed, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto z = [&] {
      Vec v(n);
      for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
      return v;
    };
    Vec x = start_scale * z();
    path.values.col(0) = x;
    for (long k = 1; k <= steps; ++k) {
      x = mom.transition * x + step_scale * z();
      path.values.col(k) = x;
    }
    return path;
  }

  // Fractional driver: Euler scheme from zero, relaxation prefix discarded.
  const double lambda_min = sym_eig(spec.phi_or_h).lambda.minCoeff();
  const long prefix = static_cast<long>(std::ceil(10.0 / (lambda_min * dt)));
  const long total = prefix + steps;
  Mat w(n, total);
  const double scale = std::pow(dt, spec.hurst);
  for (Eigen::Index i = 0; i < n; ++i) {
    w.row(i) = scale * fractional_gaussian_noise(total, spec.hurst, seed, static_cast<std::uint64_t>(i)).transpose();
  }
  const Mat dg = sqrt_psd(spec.sigma) * w;
  const Mat drift = Mat::Identity(n, n) - dt * spec.phi_or_h;
  Vec x = Vec::Zero(n);
  for (long k = 0; k < prefix; ++k) x = drift * x + dg.col(k);
  path.values.col(0) = x;
  for (long k = 1; k <= steps; ++k) {
    x = drift * x + dg.col(prefix + k - 1);
    path.values.col(k) = x;
  }
  return path;
}

Mat noise_increment_autocov(const ModelSpec& spec, long k) {
  validate_model(spec);
  if (!spec.discrete()) throw InvalidModel("noise_increment_autocov needs a discrete model");
  if (k < 0) return noise_increment_autocov(spec, -k).transpose();
  const auto theta = ma_with_identity(spec);
  const long q = static_cast<long>(theta.size()) - 1;
  Mat r = Mat::Zero(spec.dim(), spec.dim());
  for (long i = 0; i + k <= q; ++i) r += theta[i + k] * spec.sigma * theta[i].transpose();
  return r;
}

Mat noise_increment_autocov_continuous(const ModelSpec& spec, double t, double delta) {
  validate_model(spec);
  if (spec.kind != ModelKind::OuCont) throw InvalidModel("continuous increment autocovariance needs an OU model");
  if (!(delta > 0.0)) throw InvalidInput("delta must be positive");
  const double h2 = 2.0 * (spec.driver == Driver::Fbm ? spec.hurst : 0.5);
  auto p = [h2](double s) { return std::pow(std::abs(s), h2); };
  return 0.5 * (p(t + delta) + p(t - delta) - 2.0 * p(t)) * spec.sigma;
}

Autocov theoretical_gamma(const ModelSpec& spec, long t_max) {
  validate_model(spec);
  if (!spec.discrete()) throw InvalidModel("theoretical_gamma needs a discrete model");
  if (t_max < 0) throw InvalidInput("t_max must be >= 0");
  const Eigen::Index n = spec.dim();
  const Mat& phi = spec.phi_or_h;
  const auto theta = ma_with_identity(spec);
  const long q = static_cast<long>(theta.size()) - 1;

  // MA(infinity) weights psi_j = sum_{i<=min(j,q)} Phi^{j-i} theta_i; for
  // j >= q they are Phi^{j-q} psi_q, whose contribution sums to Phi^k P.
  const auto powers = matrix_powers(phi, q + t_max + 1);
  std::vector<Mat> psi;
  for (long j = 0; j <= q + t_max; ++j) {
    Mat p = Mat::Zero(n, n);
    for (long i = 0; i <= std::min(j, q); ++i) p += powers[j - i] * theta[i];
    psi.push_back(std::move(p));
  }
  const Mat tail = solve_discrete_lyapunov(phi, Mat(psi[q] * spec.sigma * psi[q].transpose()));

  std::vector<Mat> gammas;
  for (long k = 0; k <= t_max; ++k) {
    Mat g = powers[k] * tail;
    for (long j = 0; j < q; ++j) g += psi[j + k] * spec.sigma * psi[j].transpose();
    gammas.push_back(std::move(g));
  }
  gammas[0] = (gammas[0] + gammas[0].transpose()).eval() / 2.0;
  return make_autocov(std::move(gammas), 1.0, AutocovProvenance::Theoretical);
}

Autocov theoretical_gamma_var1(const ModelSpec& spec, long t_max) {
  if (spec.kind != ModelKind::Var1) throw InvalidModel("theoretical_gamma_var1 needs a VAR1 model");
  return theoretical_gamma(spec, t_max);
}

Autocov theoretical_gamma_ou(const ModelSpec& spec, double dt, long count) {
  validate_model(spec);
  if (spec.kind != ModelKind::OuCont) throw InvalidModel("theoretical_gamma_ou needs an OU model");
  if (spec.driver == Driver::Fbm && spec.hurst != 0.5) throw InvalidModel("closed-form OU autocovariance needs a Brownian driver");
  if (!(dt > 0.0) || count < 1) throw InvalidInput("theoretical_gamma_ou: bad grid");
  const auto eig = sym_eig(spec.phi_or_h);
  const Mat g0 = ou_moments(spec, dt).gamma0;
  std::vector<Mat> gammas;
  gammas.reserve(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) {
    const double s = static_cast<double>(k) * dt;
    gammas.push_back(spectral_apply(eig, [s](double x) { return std::exp(-x * s); }) * g0);
  }
  return make_autocov(std::move(gammas), dt, AutocovProvenance::Theoretical);
}

Mat gamma_series_oracle(const Mat& h, const std::function<Mat(long)>& r, long t, long m) {
  if (m < 1) throw InvalidInput("truncation M must be >= 1");
  const auto eig = sym_eig(h);
  auto e = [&](long k) { return spectral_apply(eig, [k](double x) { return std::exp(static_cast<double>(k) * x); }); };
  const Eigen::Index n = h.rows();
  Mat sum = Mat::Zero(n, n);
  for (long k = t - m; k <= t; ++k) {
    const Mat left = e(k - t);
    Mat inner = Mat::Zero(n, n);
    for (long j = -m; j <= 0; ++j) inner += r(k - j) * e(j);
    sum += left * inner;
  }
  return sum;
}

Mat noise_variance_v(const ModelSpec& spec, double t) {
  validate_model(spec);
  if (!(t >= 0.0)) throw InvalidInput("v(t) needs t >= 0");
  const Eigen::Index n = spec.dim();
  switch (spec.kind) {
    case ModelKind::Var1:
    case ModelKind::Varma1q: {
      if (t != std::floor(t)) throw InvalidInput("discrete v(t) needs integer t");
      const auto theta = ma_with_identity(spec);
      const long q = static_cast<long>(theta.size()) - 1;
      Mat v = Mat::Zero(n, n);
      for (long i = 0; i <= q; ++i) {
        for (long j = 0; j <= q; ++j) {
          const double w = std::max(0.0, t - static_cast<double>(std::abs(i - j)));
          if (w > 0.0) v += w * theta[i] * spec.sigma * theta[j].transpose();
        }
      }
      return v;
    }
    case ModelKind::OuCont: {
      const double h = spec.driver == Driver::Fbm ? spec.hurst : 0.5;
      return std::pow(t, 2.0 * h) * spec.sigma;
    }
  }
  return Mat::Zero(n, n);
}

NoisePath recover_noise(const Path& path, const Mat& phi) {
  validate_path(path);
  const Eigen::Index n = path.dim();
  if (phi.rows() != n || phi.cols() != n) throw InvalidInput("recover_noise: Phi dimension mismatch");
  const Eigen::Index N = path.points() - 1;
  Mat inc(n, N);
  for (Eigen::Index k = 1; k <= N; ++k) inc.col(k - 1) = path.values.col(k) - phi * path.values.col(k - 1);
  return make_noise_path(inc, path.t0);
}

Path reconstruct_from_noise(const NoisePath& noise, const Mat& h, long m) {
  const Eigen::Index n = noise.increments.rows();
  const long N = static_cast<long>(noise.increments.cols());
  if (h.rows() != n || h.cols() != n) throw InvalidInput("reconstruct_from_noise: H dimension mismatch");
  if (m < 0) throw InvalidInput("truncation M must be >= 0");
  if (m > N - 2) throw InvalidInput("truncation M exceeds the available noise history");
  const auto eig = sym_eig(h);
  std::vector<Mat> decay;
  for (long j = 0; j <= m; ++j) {
    decay.push_back(spectral_apply(eig, [j](double x) { return std::exp(-static_cast<double>(j) * x); }));
  }
  Path out;
  out.values.resize(n, N - m);
  out.t0 = noise.t0 + static_cast<double>(m + 1);
  out.dt = 1.0;
  out.kind = PathKind::Discrete;
  // Increment k (1-based) sits in column k-1; output column c is t = m+1+c.
  for (long c = 0; c < N - m; ++c) {
    const long t = m + 1 + c;
    Vec x = Vec::Zero(n);
    for (long j = 0; j <= m; ++j) x += decay[j] * noise.increments.col(t - j - 1);
    out.values.col(c) = x;
  }
  return out;
}

namespace {

Path lamperti_apply(const Path& path, const Mat& h, double sign) {
  validate_path(path);
  if (h.rows() != path.dim() || h.cols() != path.dim()) throw InvalidInput("Lamperti: H dimension mismatch");
  const auto eig = sym_eig(h);
  Path out = path;
  for (Eigen::Index k = 0; k < path.points(); ++k) {
    const double t = sign * path.time(k);
    const Vec y = eig.q.transpose() * path.values.col(k);
    out.values.col(k) = eig.q * (eig.lambda.array() * t).exp().matrix().asDiagonal() * y;
  }
  return out;
}

}  // namespace

Path lamperti_forward(const Path& path, const Mat& h) { return lamperti_apply(path, h, 1.0); }
Path lamperti_inverse(const Path& path, const Mat& h) { return lamperti_apply(path, h, -1.0); }

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Var1: return "VAR1";
    case ModelKind::Varma1q: return "VARMA1Q";
    case ModelKind::OuCont: return "OU_CONT";
  }
  return "?";
}

const char* to_string(Driver driver) {
  switch (driver) {
    case Driver::IidGauss: return "IID_GAUSS";
    case Driver::IidUniform: return "IID_UNIFORM";
    case Driver::Bm: return "BM";
    case Driver::Fbm: return "FBM";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "VAR1") return ModelKind::Var1;
  if (s == "VARMA1Q") return ModelKind::Varma1q;
  if (s == "OU_CONT") return ModelKind::OuCont;
  throw InvalidInput("unknown model kind '" + s + "'");
}

Driver driver_from_string(const std::string& s) {
  if (s == "IID_GAUSS") return Driver::IidGauss;
  if (s == "IID_UNIFORM") return Driver::IidUniform;
  if (s == "BM") return Driver::Bm;
  if (s == "FBM") return Driver::Fbm;
  throw InvalidInput("unknown driver '" + s + "'");
}

}  // namespace carest
