#pragma once

// Dense symmetric linear algebra shared by every other module. All matrix
// functions route through the symmetric eigendecomposition so that exp and
// log stay mutual inverses to rounding.

#include "carest/types.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <string>

namespace carest {

template <typename Scalar>
struct SymEig {
  MatrixX<Scalar> q;       // orthogonal
  VectorX<Scalar> lambda;  // ascending
};

template <typename Scalar>
struct DefinitenessReport {
  Scalar min_eigenvalue{0};
  bool is_psd{false};
  bool is_pd{false};
  Scalar tolerance_used{0};
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.derived().array().isFinite().all();
}

/// Largest singular value.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.size() == 0) return Scalar(0);
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(a.derived());
  return svd.singularValues()(0);
}

/// (A + A^T)/2 after checking that A is square, finite and symmetric up to
/// 1e-8 relative asymmetry (Frobenius).
template <typename Derived>
MatrixX<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw InvalidInput("matrix is not square");
  if (!all_finite(a)) throw InvalidInput("matrix has non-finite entries");
  const Scalar scale = a.norm();
  const Scalar asym = (a - a.transpose()).norm();
  if (asym > Scalar(1e-8) * scale) {
    throw InvalidInput("matrix is not symmetric (asymmetry " + std::to_string(double(asym)) + ")");
  }
  return (a + a.transpose()) / Scalar(2);
}

template <typename Derived>
SymEig<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> s = symmetrized(a);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(s);
  if (solver.info() != Eigen::Success) throw InvalidInput("symmetric eigensolver failed");
  return {solver.eigenvectors(), solver.eigenvalues()};
}

/// Q f(Lambda) Q^T for a scalar function f applied to the spectrum.
template <typename Scalar, typename F>
MatrixX<Scalar> spectral_apply(const SymEig<Scalar>& eig, F&& f) {
  VectorX<Scalar> fl = eig.lambda.unaryExpr(std::forward<F>(f));
  MatrixX<Scalar> out = eig.q * fl.asDiagonal() * eig.q.transpose();
  return (out + out.transpose()) / Scalar(2);
}

template <typename Derived>
MatrixX<typename Derived::Scalar> expm_sym(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  return spectral_apply(sym_eig(a), [](Scalar x) { return std::exp(x); });
}

template <typename Derived>
MatrixX<typename Derived::Scalar> logm_spd(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const auto eig = sym_eig(a);
  const Scalar min_ev = eig.lambda.size() ? eig.lambda.minCoeff() : Scalar(1);
  if (!(min_ev > Scalar(0))) {
    throw DomainError("logm_spd: matrix is not positive definite", double(min_ev));
  }
  return spectral_apply(eig, [](Scalar x) { return std::log(x); });
}

/// Symmetric square root of a PSD matrix; eigenvalues below zero (rounding)
/// are treated as zero.
template <typename Derived>
MatrixX<typename Derived::Scalar> sqrt_psd(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  return spectral_apply(sym_eig(a), [](Scalar x) { return std::sqrt(std::max(x, Scalar(0))); });
}

/// Scale-aware tolerance 1e-9 * max(1, ||A||).
template <typename Derived>
typename Derived::Scalar default_definiteness_tol(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  return Scalar(1e-9) * std::max(Scalar(1), spectral_norm(a));
}

template <typename Derived>
DefinitenessReport<typename Derived::Scalar> definiteness(const Eigen::MatrixBase<Derived>& a,
                                                          typename Derived::Scalar tol) {
  using Scalar = typename Derived::Scalar;
  DefinitenessReport<Scalar> rep;
  const auto eig = sym_eig(a);
  rep.min_eigenvalue = eig.lambda.size() ? eig.lambda.minCoeff() : Scalar(0);
  rep.tolerance_used = tol;
  rep.is_pd = rep.min_eigenvalue > tol;
  rep.is_psd = rep.min_eigenvalue > -tol;
  return rep;
}

template <typename Derived>
DefinitenessReport<typename Derived::Scalar> definiteness(const Eigen::MatrixBase<Derived>& a) {
  return definiteness(a, default_definiteness_tol(a));
}

/// Column-major stacking.
template <typename Derived>
VectorX<typename Derived::Scalar> vec(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> m = a;
  return Eigen::Map<const VectorX<Scalar>>(m.data(), m.size());
}

template <typename Derived>
MatrixX<typename Derived::Scalar> unvec(const Eigen::MatrixBase<Derived>& v, Eigen::Index rows) {
  using Scalar = typename Derived::Scalar;
  if (rows <= 0 || v.size() % rows != 0) throw InvalidInput("unvec: length is not a multiple of rows");
  VectorX<Scalar> copy = v;
  return Eigen::Map<const MatrixX<Scalar>>(copy.data(), rows, v.size() / rows);
}

/// Solves P = A P A^T + Q through the vectorized system.
template <typename DA, typename DQ>
MatrixX<typename DA::Scalar> solve_discrete_lyapunov(const Eigen::MatrixBase<DA>& a,
                                                     const Eigen::MatrixBase<DQ>& q) {
  using Scalar = typename DA::Scalar;
  const Eigen::Index n = a.rows();
  const MatrixX<Scalar> ad = a;
  MatrixX<Scalar> sys = MatrixX<Scalar>::Identity(n * n, n * n) - Eigen::kroneckerProduct(ad, ad).eval();
  const VectorX<Scalar> p = sys.partialPivLu().solve(vec(q));
  const MatrixX<Scalar> out = unvec(p, n);
  return (out + out.transpose()) / Scalar(2);
}

/// Solves A^T X + X A = R through the vectorized system.
template <typename DA, typename DR>
MatrixX<typename DA::Scalar> solve_continuous_lyapunov(const Eigen::MatrixBase<DA>& a,
                                                       const Eigen::MatrixBase<DR>& r) {
  using Scalar = typename DA::Scalar;
  const Eigen::Index n = a.rows();
  const MatrixX<Scalar> at = a.transpose();
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  MatrixX<Scalar> sys = Eigen::kroneckerProduct(id, at).eval() + Eigen::kroneckerProduct(at, id).eval();
  const VectorX<Scalar> x = sys.partialPivLu().solve(vec(r));
  return unvec(x, n);
}

}  // namespace carest
