#pragma once

// Riccati-based moment estimators of the AR(1)/Langevin parameter, the
// univariate quadratic-equation estimators, and validation helpers built on
// the noise-increment moment equations.

#include "carest/autocovariance.hpp"
#include "carest/process_models.hpp"
#include "carest/riccati.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace carest {

enum class GateFailure { None, CNotPd, DNotPd, SolverFailed };

const char* to_string(GateFailure failure);

struct EstimateResult {
  /// Theta-hat for discrete data, H-hat for continuous data. Zero whenever
  /// gate_passed is false.
  Mat theta_hat;
  std::optional<Mat> h_recovered;
  bool h_clamped{false};
  bool gate_passed{false};
  GateFailure failure{GateFailure::None};
  std::string failure_detail;
  double residual_norm{0.0};
  double horizon_t{0.0};
  long sample_size{0};
  CareCoefficients<double> coeffs;
};

/// Gate + solve on prebuilt coefficients: the PSD CARE root when C and D are
/// positive definite, otherwise the zero fallback.
EstimateResult estimate_from_coefficients(const CareCoefficients<double>& coeffs, long sample_size);

/// Theta-hat from autocovariances already in hand (sampled or theoretical).
EstimateResult estimate_theta_from_autocov(const Autocov& gammas, const Mat& v_t, long t);

/// Theta-hat_T from an observed discrete path: divisor-T centred sample
/// autocovariances at lags 0..max_lag (default t), discrete coefficients,
/// positive-definiteness gates, CARE. H is recovered when the gates pass.
EstimateResult estimate_theta_discrete(const Path& path, const Mat& v_t, long t,
                                       std::optional<long> max_lag = std::nullopt);

struct RecoveredH {
  Mat h;
  bool clamped{false};
};

/// H = -log(I - Theta) with the spectrum of I - Theta clamped to
/// [1e-6, 1 - 1e-6]. The all-zero fallback estimate maps to H = 0.
RecoveredH recover_H(const Mat& theta_hat);

EstimateResult estimate_H_from_autocov(const Autocov& gammas, const Mat& v_t, double t);

/// H-hat_T from a sampled continuous path; the CARE root is H-hat itself.
EstimateResult estimate_H_continuous(const Path& path, const Mat& v_t, double t);

/// Smallest t in 1..max_t whose coefficients (built from `gammas` and v(t))
/// have C and D positive definite.
std::optional<long> select_horizon(const Autocov& gammas, const std::function<Mat(long)>& v, long max_t = 10);

/// select_horizon on the model's theoretical autocovariances.
std::optional<long> select_horizon(const ModelSpec& spec, long max_t = 10);

struct QuadraticRoots {
  bool real{false};
  double root1{0.0};  // root1 <= root2 when real
  double root2{0.0};
};

/// Roots in Phi of gamma(t) Phi^2 - (gamma(t+1) + gamma(t-1)) Phi + gamma(t) - r(t) = 0
/// for a univariate process (the scalar form of the noise-increment moment
/// equation).
QuadraticRoots univariate_quadratic_roots(const Autocov& gamma, double r_t, long t);

struct DegeneracyReport {
  bool empty{true};
  bool degenerate{false};
  std::vector<long> t_values;
  std::vector<QuadraticRoots> roots;
  double phi{0.0};        // common roots when degenerate
  double phi_tilde{0.0};
  /// |C_t Theta^2 - 2 B_t Theta - D_t| for Theta = 1 - phi and 1 - phi_tilde,
  /// for each t >= 1 in range (only filled when degenerate).
  std::vector<long> quadratic2_t;
  std::vector<double> quadratic2_residual;
  std::vector<double> quadratic2_residual_tilde;
  bool quadratic2_holds{false};
};

/// Flags the cyclic degenerate class: the same two positive roots at every t
/// in range. When flagged, checks that both 1 - Phi and 1 - Phi~ solve the
/// scalar Riccati quadratic with v(t) = sum_{k,j=1}^t r(k-j).
DegeneracyReport degeneracy_check(const Autocov& gamma, const std::function<double(long)>& r,
                                  const std::vector<long>& t_range, double tol);

/// W = int_{t-d}^t (s-t+d) gamma(s) ds + int_t^{t+d} (t-s+d) gamma(s) ds by
/// the trapezoid rule with step dt.
double weighted_gamma_integral(const std::function<double(double)>& gamma, double t, double delta, double dt);

/// Univariate continuous-time H from
/// r_d(t) = 2 gamma(t) - gamma(t+d) - gamma(t-d) + H^2 W.
double univariate_H_continuous(const std::function<double(double)>& gamma, double r_delta_t, double t,
                               double delta, double dt);
double univariate_H_continuous(const Autocov& gamma_grid, double r_delta_t, double t, double delta);

/// Right side of r(t) = Phi gamma(t) Phi^T - gamma(t+1) Phi^T - Phi gamma(t-1) + gamma(t).
Mat check_lemma_noncare(const Autocov& gamma, const Mat& phi, long t);

/// Right side of the continuous-time noise-increment equation for r_d(t),
/// with all integrals by trapezoid on the autocovariance grid.
Mat check_lemma_noncare_cont(const Autocov& gamma, const Mat& h, double t, double delta);

}  // namespace carest
