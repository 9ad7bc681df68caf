#pragma once

// Symmetric continuous-time algebraic Riccati equations
//
//     B^T X + X B - X C X + D = 0,   C, D symmetric,
//
// built from autocovariances, and solved for the PSD (stabilizing) root.

#include "carest/autocovariance.hpp"
#include "carest/matrix_core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace carest {

enum class CoefficientProvenance { Discrete, Continuous };
enum class CareMethod { Schur, Newton, ScalarQuadratic };

template <typename Scalar>
struct CareCoefficients {
  MatrixX<Scalar> b, c, d;
  Scalar horizon_t{0};
  CoefficientProvenance provenance{CoefficientProvenance::Discrete};
  DefinitenessReport<Scalar> pd_report_c;
  DefinitenessReport<Scalar> pd_report_d;

  Eigen::Index dim() const { return b.rows(); }
};

template <typename Scalar>
struct CareSolution {
  MatrixX<Scalar> x;
  Scalar residual_norm{0};
  int iterations{0};
  CareMethod method{CareMethod::Schur};
};

namespace detail {

template <typename Scalar>
void finish_coefficients(CareCoefficients<Scalar>& k) {
  k.c = (k.c + k.c.transpose()).eval() / Scalar(2);
  k.d = (k.d + k.d.transpose()).eval() / Scalar(2);
  k.pd_report_c = definiteness(k.c);
  k.pd_report_d = definiteness(k.d);
}

template <typename Scalar>
void check_v(const MatrixX<Scalar>& v_t, Eigen::Index n) {
  if (v_t.rows() != n || v_t.cols() != n) throw InvalidInput("v(t) has the wrong shape");
  if (!all_finite(v_t)) throw InvalidInput("v(t) has non-finite entries");
}

}  // namespace detail

/// Discrete-time coefficients at integer horizon t >= 1:
///   B = sum_{k=1}^t gamma(k-1) - gamma(k)^T
///   C = sum_{l=0}^{t-1} (t-l) gamma(l) + sum_{l=1}^{t-1} (t-l) gamma(l)^T
///   D = v(t) - 2 gamma(0) + gamma(t) + gamma(t)^T
/// C is the lag-rearranged form of sum_{k,j=1}^t gamma(k-j).
template <typename Scalar>
CareCoefficients<Scalar> build_coeffs_discrete(const AutocovSeq<Scalar>& gammas,
                                               const MatrixX<Scalar>& v_t, long t) {
  if (t < 1) throw InvalidInput("horizon t must be >= 1");
  if (gammas.size() < static_cast<std::size_t>(t) + 1) throw InvalidInput("autocovariances do not cover lags 0..t");
  for (long k = 0; k <= t; ++k) {
    if (std::abs(gammas.lags[k] - Scalar(k)) > Scalar(1e-9)) throw InvalidInput("discrete coefficients need integer lags");
  }
  const Eigen::Index n = gammas.dim();
  detail::check_v(v_t, n);

  CareCoefficients<Scalar> k;
  k.horizon_t = Scalar(t);
  k.provenance = CoefficientProvenance::Discrete;
  k.b = MatrixX<Scalar>::Zero(n, n);
  k.c = MatrixX<Scalar>::Zero(n, n);
  for (long j = 1; j <= t; ++j) k.b += gammas.gammas[j - 1] - gammas.gammas[j].transpose();
  for (long l = 0; l < t; ++l) k.c += Scalar(t - l) * gammas.gammas[l];
  for (long l = 1; l < t; ++l) k.c += Scalar(t - l) * gammas.gammas[l].transpose();
  k.d = v_t - Scalar(2) * gammas.gammas[0] + gammas.gammas[t] + gammas.gammas[t].transpose();
  detail::finish_coefficients(k);
  return k;
}

/// Composite trapezoid weights on the grid 0, h, ..., m h.
template <typename Scalar>
VectorX<Scalar> trapezoid_weights(long m, Scalar h) {
  VectorX<Scalar> w = VectorX<Scalar>::Constant(m + 1, h);
  w(0) = w(m) = h / Scalar(2);
  if (m == 0) w(0) = Scalar(0);
  return w;
}

/// Continuous-time coefficients at horizon t on the autocovariance grid:
///   B = int_0^t gamma(s) - gamma(s)^T ds
///   C = int_0^t int_0^t gamma(s-u) du ds = int_0^t (t-s)(gamma(s) + gamma(s)^T) ds
///   D = v(t) - 2 gamma(0) + gamma(t) + gamma(t)^T
/// Both integrals use the composite trapezoid rule at the grid step.
template <typename Scalar>
CareCoefficients<Scalar> build_coeffs_continuous(const AutocovSeq<Scalar>& gammas,
                                                 const MatrixX<Scalar>& v_t, Scalar t) {
  if (!(t > Scalar(0))) throw InvalidInput("horizon t must be positive");
  const long m = gammas.grid_index(t);
  if (m < 1 || static_cast<std::size_t>(m) >= gammas.size()) throw InvalidInput("autocovariance grid does not cover [0, t]");
  const Eigen::Index n = gammas.dim();
  detail::check_v(v_t, n);
  const Scalar h = gammas.lag_step;
  const VectorX<Scalar> w = trapezoid_weights(m, h);

  CareCoefficients<Scalar> k;
  k.horizon_t = t;
  k.provenance = CoefficientProvenance::Continuous;
  k.b = MatrixX<Scalar>::Zero(n, n);
  k.c = MatrixX<Scalar>::Zero(n, n);
  for (long j = 0; j <= m; ++j) {
    const MatrixX<Scalar>& g = gammas.gammas[j];
    k.b += w(j) * (g - g.transpose());
    k.c += w(j) * (t - Scalar(j) * h) * (g + g.transpose());
  }
  k.d = v_t - Scalar(2) * gammas.gammas[0] + gammas.gammas[m] + gammas.gammas[m].transpose();
  detail::finish_coefficients(k);
  return k;
}

template <typename Scalar>
MatrixX<Scalar> care_residual_matrix(const CareCoefficients<Scalar>& k, const MatrixX<Scalar>& x) {
  return k.b.transpose() * x + x * k.b - x * k.c * x + k.d;
}

/// Spectral norm of B^T X + X B - X C X + D.
template <typename Scalar>
Scalar care_residual(const CareCoefficients<Scalar>& k, const MatrixX<Scalar>& x) {
  if (x.rows() != k.dim() || x.cols() != k.dim()) throw InvalidInput("care_residual: shape mismatch");
  return spectral_norm(care_residual_matrix(k, x));
}

template <typename Scalar>
Scalar care_tolerance(const CareCoefficients<Scalar>& k) {
  return Scalar(1e-8) * std::max(Scalar(1), spectral_norm(k.d));
}

/// Newton-Kleinman iteration from x0: each step solves the Lyapunov equation
/// (B - C X)^T E + E (B - C X) = -R(X). Stops at residual <= tol or when the
/// residual stops decreasing; returns the best iterate.
template <typename Scalar>
CareSolution<Scalar> newton_care(const CareCoefficients<Scalar>& k, MatrixX<Scalar> x0, Scalar tol,
                                 int max_iter = 100) {
  if (x0.rows() != k.dim() || x0.cols() != k.dim()) throw InvalidInput("newton_care: shape mismatch");
  CareSolution<Scalar> best{x0, care_residual(k, x0), 0, CareMethod::Newton};
  MatrixX<Scalar> x = std::move(x0);
  Scalar prev = best.residual_norm;
  int stalls = 0;
  for (int it = 1; it <= max_iter && best.residual_norm > tol; ++it) {
    const MatrixX<Scalar> r = care_residual_matrix(k, x);
    const MatrixX<Scalar> a = k.b - k.c * x;
    const MatrixX<Scalar> e = solve_continuous_lyapunov(a, MatrixX<Scalar>(-r));
    if (!all_finite(e)) break;
    x += e;
    x = (x + x.transpose()).eval() / Scalar(2);
    const Scalar res = care_residual(k, x);
    if (res < best.residual_norm) best = {x, res, it, CareMethod::Newton};
    // Newton converges quadratically near the root; several non-improving
    // steps in a row mean rounding has taken over.
    stalls = res < prev ? 0 : stalls + 1;
    if (stalls >= 3) break;
    prev = res;
  }
  return best;
}

/// X0 = scale * alpha * I with alpha chosen so that B - C X0 is stable
/// (requires C positive definite).
template <typename Scalar>
MatrixX<Scalar> stabilizing_guess_identity(const CareCoefficients<Scalar>& k, Scalar scale = Scalar(1)) {
  const auto n = k.dim();
  const auto eb = sym_eig(MatrixX<Scalar>((k.b + k.b.transpose()) / Scalar(2)));
  const auto ec = sym_eig(k.c);
  const Scalar cmin = ec.lambda.minCoeff();
  if (!(cmin > Scalar(0))) throw InvalidInput("stabilizing guess needs C positive definite");
  const Scalar alpha = (std::max(eb.lambda.maxCoeff(), Scalar(0)) + Scalar(1)) / cmin;
  return scale * alpha * MatrixX<Scalar>::Identity(n, n);
}

/// X0 = beta * C^{-1} with beta > lambda_max(sym B), so B - C X0 = B - beta I
/// is stable.
template <typename Scalar>
MatrixX<Scalar> stabilizing_guess_inverse_c(const CareCoefficients<Scalar>& k, Scalar scale = Scalar(1)) {
  const auto eb = sym_eig(MatrixX<Scalar>((k.b + k.b.transpose()) / Scalar(2)));
  const Scalar beta = scale * (std::max(eb.lambda.maxCoeff(), Scalar(0)) + Scalar(1));
  MatrixX<Scalar> cinv = k.c.ldlt().solve(MatrixX<Scalar>::Identity(k.dim(), k.dim()));
  cinv = (cinv + cinv.transpose()).eval() / Scalar(2);
  return beta * cinv;
}

namespace detail {

/// Swaps diagonal entries k and k+1 of the upper triangular T by a unitary
/// 2x2 rotation, updating the Schur vectors U.
template <typename CScalar>
void swap_schur_pair(MatrixX<CScalar>& t, MatrixX<CScalar>& u, Eigen::Index k) {
  const CScalar a = t(k, k);
  const CScalar b = t(k + 1, k + 1);
  const CScalar v1 = t(k, k + 1);
  const CScalar v2 = b - a;
  const auto nv = std::sqrt(std::norm(v1) + std::norm(v2));
  if (nv == decltype(nv)(0)) return;
  Eigen::Matrix<CScalar, 2, 2> g;
  g << v1 / nv, -std::conj(v2) / nv, v2 / nv, std::conj(v1) / nv;
  t.middleRows(k, 2) = (g.adjoint() * t.middleRows(k, 2)).eval();
  t.middleCols(k, 2) = (t.middleCols(k, 2) * g).eval();
  u.middleCols(k, 2) = (u.middleCols(k, 2) * g).eval();
  t(k + 1, k) = CScalar(0);
  t(k, k) = b;
  t(k + 1, k + 1) = a;
}

}  // namespace detail

/// Stabilizing solution from the ordered complex Schur form of the
/// Hamiltonian [[B, -C], [-D, -B^T]]: X = U21 U11^{-1} where the leading n
/// Schur vectors span the stable invariant subspace.
template <typename Scalar>
MatrixX<Scalar> hamiltonian_schur_solution(const CareCoefficients<Scalar>& k) {
  using C = std::complex<Scalar>;
  const Eigen::Index n = k.dim();
  MatrixX<Scalar> ham(2 * n, 2 * n);
  ham << k.b, -k.c, -k.d, -k.b.transpose();
  Eigen::ComplexSchur<MatrixX<C>> schur(ham.template cast<C>());
  if (schur.info() != Eigen::Success) throw NoSolution("Hamiltonian Schur decomposition failed", std::numeric_limits<double>::infinity());
  MatrixX<C> t = schur.matrixT();
  MatrixX<C> u = schur.matrixU();

  const Scalar axis_tol = Scalar(1e-10) * std::max(Scalar(1), ham.norm());
  Eigen::Index placed = 0;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const Scalar re = t(i, i).real();
    if (std::abs(re) < axis_tol) {
      throw NoSolution("Hamiltonian has eigenvalues on the imaginary axis", std::numeric_limits<double>::infinity());
    }
    if (re < Scalar(0)) {
      for (Eigen::Index j = i; j > placed; --j) detail::swap_schur_pair(t, u, j - 1);
      ++placed;
    }
  }
  if (placed != n) throw NoSolution("stable invariant subspace has the wrong dimension", std::numeric_limits<double>::infinity());

  const MatrixX<C> u11 = u.topLeftCorner(n, n);
  const MatrixX<C> u21 = u.bottomLeftCorner(n, n);
  Eigen::FullPivLU<MatrixX<C>> lu(u11.transpose());
  if (!lu.isInvertible()) throw NoSolution("stable subspace is not a graph over the first block", std::numeric_limits<double>::infinity());
  const MatrixX<Scalar> x = lu.solve(u21.transpose()).transpose().real();
  if (!all_finite(x)) throw NoSolution("Schur solution is not finite", std::numeric_limits<double>::infinity());
  return (x + x.transpose()).eval() / Scalar(2);
}

/// The unique PSD solution of the CARE. n = 1 uses the positive root of
/// C x^2 - 2 B x - D = 0; otherwise ordered Schur followed by Newton
/// refinement. Throws NoSolution if no PSD solution meeting the residual
/// tolerance is found.
template <typename Scalar>
CareSolution<Scalar> solve_care(const CareCoefficients<Scalar>& coeffs) {
  const Eigen::Index n = coeffs.dim();
  if (n == 0 || coeffs.c.rows() != n || coeffs.d.rows() != n || coeffs.b.cols() != n) {
    throw InvalidInput("solve_care: coefficient shapes differ");
  }
  CareCoefficients<Scalar> k = coeffs;
  k.c = symmetrized(coeffs.c);
  k.d = symmetrized(coeffs.d);
  if (!all_finite(k.b)) throw InvalidInput("solve_care: B has non-finite entries");
  const Scalar accept = care_tolerance(k);
  const Scalar target = Scalar(1e-10) * std::max(Scalar(1), spectral_norm(k.d));
  const Scalar psd_tol = Scalar(1e-9);

  if (n == 1) {
    const Scalar b = k.b(0, 0), c = k.c(0, 0), d = k.d(0, 0);
    Scalar x;
    if (c > Scalar(0)) {
      const Scalar disc = b * b + c * d;
      if (std::abs(disc) < Scalar(1e-12)) {
        x = b / c;
      } else if (disc < Scalar(0)) {
        throw NoSolution("scalar CARE has no real root", double(std::abs(d)));
      } else {
        // Larger root; written to avoid cancellation when b < 0.
        const Scalar sq = std::sqrt(disc);
        x = b >= Scalar(0) ? (b + sq) / c : -d / (b - sq);
      }
    } else if (c == Scalar(0) && b < Scalar(0)) {
      x = -d / (Scalar(2) * b);
    } else {
      throw NoSolution("scalar CARE has no stabilizing root", double(std::abs(d)));
    }
    if (x < -psd_tol * std::max(Scalar(1), std::abs(x))) throw NoSolution("scalar CARE root is negative", double(std::abs(d)));
    MatrixX<Scalar> xm(1, 1);
    xm(0, 0) = std::max(x, Scalar(0));
    const Scalar res = care_residual(k, xm);
    if (!(res <= accept)) throw NoSolution("scalar CARE residual too large", double(res));
    return {xm, res, 0, CareMethod::ScalarQuadratic};
  }

  const MatrixX<Scalar> x0 = hamiltonian_schur_solution(k);
  CareSolution<Scalar> sol = newton_care(k, x0, target);
  sol.method = CareMethod::Schur;
  if (!(sol.residual_norm <= accept)) throw NoSolution("CARE refinement did not reach tolerance", double(sol.residual_norm));
  const auto rep = definiteness(sol.x, psd_tol * std::max(Scalar(1), spectral_norm(sol.x)));
  if (!rep.is_psd) throw NoSolution("stabilizing CARE solution is not PSD", double(sol.residual_norm));
  return sol;
}

inline const char* to_string(CoefficientProvenance p) {
  return p == CoefficientProvenance::Discrete ? "discrete" : "continuous";
}

inline const char* to_string(CareMethod m) {
  switch (m) {
    case CareMethod::Schur: return "schur";
    case CareMethod::Newton: return "newton";
    case CareMethod::ScalarQuadratic: return "scalar_quadratic";
  }
  return "unknown";
}

}  // namespace carest
