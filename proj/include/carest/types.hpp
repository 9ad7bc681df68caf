#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace carest {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = MatrixX<double>;
using Vec = VectorX<double>;

/// Malformed arguments: shapes, non-finite entries, out-of-range options.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model specification that violates its own invariants (e.g. unstable Phi).
class InvalidModel : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// A matrix function was applied outside its domain.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, double min_eigenvalue)
      : std::domain_error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// The Riccati solver could not produce a PSD solution.
class NoSolution : public std::runtime_error {
 public:
  NoSolution(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// A univariate moment equation lost its leading coefficient.
class DegenerateEquation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A closed-form square root met a negative radicand.
class NoRealSolution : public std::domain_error {
 public:
  NoRealSolution(const std::string& what, double radicand)
      : std::domain_error(what), radicand_(radicand) {}
  double radicand() const noexcept { return radicand_; }

 private:
  double radicand_;
};

}  // namespace carest
