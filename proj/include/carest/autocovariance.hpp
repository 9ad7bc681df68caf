#pragma once

#include "carest/matrix_core.hpp"
#include "carest/path.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace carest {

enum class AutocovProvenance { Sample, Theoretical };

/// Matrix autocovariances gamma(s) = E X_s X_0^T on a uniform non-negative
/// lag grid 0, h, 2h, ... Negative lags are never stored; gamma(-s) is
/// gamma(s)^T and is produced on demand by `at_signed` / `at_time`.
template <typename Scalar>
struct AutocovSeq {
  std::vector<Scalar> lags;
  std::vector<MatrixX<Scalar>> gammas;
  AutocovProvenance provenance{AutocovProvenance::Theoretical};
  long sample_size{0};
  Scalar lag_step{1};

  std::size_t size() const { return gammas.size(); }
  Eigen::Index dim() const { return gammas.empty() ? 0 : gammas.front().rows(); }

  /// gamma at grid index k, for any integer k.
  MatrixX<Scalar> at_signed(long k) const {
    const auto idx = static_cast<std::size_t>(k < 0 ? -k : k);
    if (idx >= gammas.size()) throw InvalidInput("autocovariance lag index out of range");
    return k < 0 ? MatrixX<Scalar>(gammas[idx].transpose()) : gammas[idx];
  }

  /// gamma(s) at a real lag that must sit on the grid.
  MatrixX<Scalar> at_time(Scalar s) const { return at_signed(grid_index(s)); }

  long grid_index(Scalar s) const {
    const Scalar x = s / lag_step;
    const Scalar r = std::round(x);
    if (std::abs(x - r) > Scalar(1e-7) * std::max(Scalar(1), std::abs(x))) {
      throw InvalidInput("lag is not a multiple of the grid step");
    }
    return static_cast<long>(r);
  }
};

using Autocov = AutocovSeq<double>;

/// Builds a sequence on the grid 0, h, 2h, ... from matrices.
template <typename Scalar>
AutocovSeq<Scalar> make_autocov(std::vector<MatrixX<Scalar>> gammas, Scalar lag_step,
                                AutocovProvenance provenance, long sample_size = 0) {
  if (gammas.empty()) throw InvalidInput("autocovariance sequence is empty");
  if (!(lag_step > Scalar(0))) throw InvalidInput("lag step must be positive");
  const auto n = gammas.front().rows();
  for (const auto& g : gammas) {
    if (g.rows() != n || g.cols() != n) throw InvalidInput("autocovariance matrices differ in shape");
  }
  AutocovSeq<Scalar> seq;
  seq.lags.reserve(gammas.size());
  for (std::size_t k = 0; k < gammas.size(); ++k) seq.lags.push_back(Scalar(k) * lag_step);
  seq.gammas = std::move(gammas);
  seq.provenance = provenance;
  seq.sample_size = sample_size;
  seq.lag_step = lag_step;
  return seq;
}

/// Divisor-T sample autocovariances of a discretely indexed path at lags
/// 0..max_lag, with the sample mean removed when `center` is set.
Autocov sample_autocov(const Path& path, long max_lag, bool center = true);

/// The same estimator evaluated at every grid lag k*dt <= max_lag_time of a
/// sampled continuous-time path.
Autocov sample_autocov_sampled(const Path& path, double max_lag_time, bool center = true);

/// max over the shared lag grid of ||est(s) - truth(s)||_2.
template <typename Scalar>
Scalar max_deviation(const AutocovSeq<Scalar>& est, const AutocovSeq<Scalar>& truth) {
  if (est.size() != truth.size() || est.dim() != truth.dim()) {
    throw InvalidInput("max_deviation: lag grids differ");
  }
  Scalar worst(0);
  for (std::size_t k = 0; k < est.size(); ++k) {
    if (std::abs(est.lags[k] - truth.lags[k]) > Scalar(1e-9) * std::max(Scalar(1), std::abs(truth.lags[k]))) {
      throw InvalidInput("max_deviation: lag grids differ");
    }
    worst = std::max(worst, spectral_norm(est.gammas[k] - truth.gammas[k]));
  }
  return worst;
}

/// Restriction to the first `count` lags.
template <typename Scalar>
AutocovSeq<Scalar> truncated(const AutocovSeq<Scalar>& seq, std::size_t count) {
  if (count == 0 || count > seq.size()) throw InvalidInput("truncated: bad lag count");
  AutocovSeq<Scalar> out = seq;
  out.lags.resize(count);
  out.gammas.resize(count);
  return out;
}

}  // namespace carest
