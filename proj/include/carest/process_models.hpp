#pragma once

// Generative stationary models, their second-order structure, and the
// pathwise maps between a stationary process, its noise and its Lamperti
// image.

#include "carest/autocovariance.hpp"
#include "carest/path.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace carest {

enum class ModelKind { Var1, Varma1q, OuCont };
enum class Driver { IidGauss, IidUniform, Bm, Fbm };

/// Discrete kinds: X_t - Phi X_{t-1} = eps_t + theta_1 eps_{t-1} + ... with
/// eps iid(0, Sigma). OuCont: dX_t = -H X_t dt + dG_t with G = Sigma^{1/2} W,
/// W a standard (fractional) Brownian motion with independent components.
struct ModelSpec {
  ModelKind kind{ModelKind::Var1};
  Mat phi_or_h;          // Phi (discrete) or H (continuous), symmetric
  Mat sigma;             // innovation covariance, symmetric PSD
  std::vector<Mat> ma;   // theta_1..theta_q (Varma1q only)
  Driver driver{Driver::IidGauss};
  double hurst{0.5};     // Fbm only

  Eigen::Index dim() const { return phi_or_h.rows(); }
  bool discrete() const { return kind != ModelKind::OuCont; }
};

/// Throws InvalidModel when the spec breaks its invariants.
void validate_model(const ModelSpec& spec);

/// 10 * ceil(1 / (1 - ||Phi||)).
long default_burn_in(const ModelSpec& spec);

struct SimulatedPath {
  Path path;
  Mat increments;  // DeltaG_1..DeltaG_N, column k-1 drives X_k
};

/// VAR(1) path X_0..X_T. With burn_in = 0 the start is drawn from the exact
/// stationary law (Gaussian driver); otherwise the chain starts at zero and
/// burn_in steps are discarded.
Path simulate_var1(const ModelSpec& spec, long T, long burn_in, std::uint64_t seed);
SimulatedPath simulate_var1_with_noise(const ModelSpec& spec, long T, long burn_in, std::uint64_t seed);

/// VARMA(1,q) path X_0..X_T; the MA recursion is seeded with q pre-sample
/// innovations. q = 0 reproduces simulate_var1 draw for draw.
Path simulate_varma1q(const ModelSpec& spec, long T, long burn_in, std::uint64_t seed);
SimulatedPath simulate_varma1q_with_noise(const ModelSpec& spec, long T, long burn_in, std::uint64_t seed);

/// OU path on the grid 0, dt, ..., t_end. Brownian driver: exact transition
/// with stationary start. Fractional driver: Euler scheme after a discarded
/// relaxation prefix of length >= 10 / lambda_min(H).
Path simulate_ou(const ModelSpec& spec, double t_end, double dt, std::uint64_t seed);

/// Exact fractional Gaussian noise (unit step, unit variance) of length
/// `count` by circulant embedding.
Vec fractional_gaussian_noise(long count, double hurst, std::uint64_t seed, std::uint64_t stream = 0);

/// Lag-k autocovariance of the increment process DeltaG of a discrete model.
Mat noise_increment_autocov(const ModelSpec& spec, long k);

/// r_delta(t) = E (G_t - G_{t-delta})(G_0 - G_{-delta})^T for the continuous
/// drivers.
Mat noise_increment_autocov_continuous(const ModelSpec& spec, double t, double delta);

/// Exact theoretical gamma(0..t_max) of a discrete model.
Autocov theoretical_gamma(const ModelSpec& spec, long t_max);
/// Same, restricted to VAR1 specs.
Autocov theoretical_gamma_var1(const ModelSpec& spec, long t_max);

/// Exact gamma(k dt), k = 0..count-1, of the Brownian-driven OU model.
Autocov theoretical_gamma_ou(const ModelSpec& spec, double dt, long count);

/// gamma(t) = e^{-tH} sum_{k=t-M}^{t} sum_{j=-M}^{0} e^{kH} r(k-j) e^{jH},
/// the truncated double series; an oracle independent of the Lyapunov route.
Mat gamma_series_oracle(const Mat& h, const std::function<Mat(long)>& r, long t, long m);

/// v(t) = cov(G_t) for the model.
Mat noise_variance_v(const ModelSpec& spec, double t);

/// DeltaG_k = X_k - Phi X_{k-1} for every consecutive pair of the path.
NoisePath recover_noise(const Path& path, const Mat& phi);

/// X_t ~= sum_{k=t-M}^{t} e^{(k-t)H} DeltaG_k for every t with a full
/// window; the returned path starts at the first such t.
Path reconstruct_from_noise(const NoisePath& noise, const Mat& h, long m);

/// (L_H X)_{e^t} = e^{tH} X_t, indexed by t.
Path lamperti_forward(const Path& path, const Mat& h);
/// (L_H^{-1} Y)_t = e^{-tH} Y_{e^t}.
Path lamperti_inverse(const Path& path, const Mat& h);

const char* to_string(ModelKind kind);
const char* to_string(Driver driver);
ModelKind model_kind_from_string(const std::string& s);
Driver driver_from_string(const std::string& s);

}  // namespace carest
