#include "carest/process_models.hpp"
#include "carest/rng.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace carest {

// Davies-Harte circulant embedding. The fGn autocovariance
// c(k) = (|k+1|^{2h} + |k-1|^{2h} - 2|k|^{2h}) / 2 is embedded in a circulant
// of size 2m; its eigenvalues are non-negative for every h in (0, 1).
Vec fractional_gaussian_noise(long count, double hurst, std::uint64_t seed, std::uint64_t stream) {
  if (count < 1) throw InvalidInput("fGn length must be >= 1");
  if (!(hurst > 0.0 && hurst < 1.0)) throw InvalidInput("hurst index must lie in (0, 1)");
  if (count > (1L << 22)) throw InvalidInput("fGn length exceeds the supported grid size");

  long m = 1;
  while (m < count) m <<= 1;
  const long size = 2 * m;
  const double h2 = 2.0 * hurst;
  auto cov = [h2](double k) {
    return 0.5 * (std::pow(std::abs(k + 1.0), h2) + std::pow(std::abs(k - 1.0), h2) - 2.0 * std::pow(std::abs(k), h2));
  };

  std::vector<std::complex<double>> row(static_cast<std::size_t>(size));
  for (long k = 0; k <= m; ++k) row[k] = cov(static_cast<double>(k));
  for (long k = m + 1; k < size; ++k) row[k] = row[size - k];

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> eigenvalues;
  fft.fwd(eigenvalues, row);

  double largest = 0.0;
  for (const auto& ev : eigenvalues) largest = std::max(largest, std::abs(ev.real()));
  std::vector<double> lambda(static_cast<std::size_t>(size));
  for (long k = 0; k < size; ++k) {
    const double ev = eigenvalues[k].real();
    if (ev < -1e-8 * largest) throw InvalidInput("circulant embedding is not positive semidefinite");
    lambda[k] = std::max(ev, 0.0);
  }

  Philox4x32 rng(seed, stream);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sz = static_cast<double>(size);
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(size));
  spectrum[0] = std::sqrt(lambda[0] / sz) * gauss(rng);
  spectrum[m] = std::sqrt(lambda[m] / sz) * gauss(rng);
  for (long k = 1; k < m; ++k) {
    const double a = gauss(rng);
    const double b = gauss(rng);
    const double s = std::sqrt(lambda[k] / (2.0 * sz));
    spectrum[k] = {s * a, s * b};
    spectrum[size - k] = std::conj(spectrum[k]);
  }

  std::vector<std::complex<double>> out;
  fft.fwd(out, spectrum);
  Vec noise(count);
  for (long k = 0; k < count; ++k) noise(k) = out[k].real();
  return noise;
}

}  // namespace carest
