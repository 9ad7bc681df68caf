#include "carest/process_models.hpp"
#include "carest/riccati.hpp"
#include "carest/rng.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace carest;

namespace {

CareCoefficients<double> coeffs(Mat b, Mat c, Mat d) {
  CareCoefficients<double> k;
  k.b = std::move(b);
  k.c = std::move(c);
  k.d = std::move(d);
  k.pd_report_c = definiteness(k.c);
  k.pd_report_d = definiteness(k.d);
  return k;
}

ModelSpec scalar_ar(double phi) {
  ModelSpec s;
  s.phi_or_h = Mat::Constant(1, 1, phi);
  s.sigma = Mat::Identity(1, 1);
  return s;
}

ModelSpec scalar_ou(double h) {
  ModelSpec s;
  s.kind = ModelKind::OuCont;
  s.phi_or_h = Mat::Constant(1, 1, h);
  s.sigma = Mat::Identity(1, 1);
  s.driver = Driver::Bm;
  return s;
}

}  // namespace

TEST(BuildCoeffsDiscrete, ScalarAr1HorizonThree) {
  const auto spec = scalar_ar(0.5);
  const auto k = build_coeffs_discrete(theoretical_gamma(spec, 3), noise_variance_v(spec, 3), 3);
  EXPECT_NEAR(k.b(0, 0), 7.0 / 6.0, 1e-12);
  EXPECT_NEAR(k.c(0, 0), 22.0 / 3.0, 1e-12);
  EXPECT_NEAR(k.d(0, 0), 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(k.pd_report_c.is_pd);
  EXPECT_TRUE(k.pd_report_d.is_pd);
  EXPECT_EQ(k.provenance, CoefficientProvenance::Discrete);
}

TEST(BuildCoeffsDiscrete, ScalarAr1HorizonOneFailsGate) {
  const auto spec = scalar_ar(0.5);
  const auto k = build_coeffs_discrete(theoretical_gamma(spec, 1), noise_variance_v(spec, 1), 1);
  EXPECT_NEAR(k.d(0, 0), -1.0 / 3.0, 1e-14);
  EXPECT_FALSE(k.pd_report_d.is_pd);
}

TEST(BuildCoeffsDiscrete, ZeroInput) {
  const Autocov zero = make_autocov<double>(std::vector<Mat>(4, Mat::Zero(2, 2)), 1.0, AutocovProvenance::Theoretical);
  const auto k = build_coeffs_discrete(zero, Mat(Mat::Zero(2, 2)), 3);
  EXPECT_EQ(k.b.norm() + k.c.norm() + k.d.norm(), 0.0);
  EXPECT_THROW(build_coeffs_discrete(zero, Mat(Mat::Zero(2, 2)), 4), InvalidInput);
  EXPECT_THROW(build_coeffs_discrete(zero, Mat(Mat::Zero(2, 2)), 0), InvalidInput);
}

TEST(BuildCoeffsDiscrete, CEqualsDoubleSum) {
  Philox4x32 rng(3);
  std::normal_distribution<double> normal;
  std::vector<Mat> gs;
  for (int k = 0; k <= 4; ++k) {
    Mat g(3, 3);
    for (Eigen::Index i = 0; i < 9; ++i) g.data()[i] = normal(rng);
    if (k == 0) g = g * g.transpose();
    gs.push_back(g);
  }
  const Autocov seq = make_autocov(gs, 1.0, AutocovProvenance::Sample);
  const auto k = build_coeffs_discrete(seq, Mat(Mat::Zero(3, 3)), 4);
  Mat c = Mat::Zero(3, 3);
  for (long a = 1; a <= 4; ++a) {
    for (long b = 1; b <= 4; ++b) c += seq.at_signed(a - b);
  }
  EXPECT_LE((k.c - c).norm(), 1e-12);
}

TEST(BuildCoeffsContinuous, ScalarOu) {
  const auto spec = scalar_ou(1.0);
  const Autocov g = theoretical_gamma_ou(spec, 1e-3, 1001);
  const auto k = build_coeffs_continuous(g, noise_variance_v(spec, 1.0), 1.0);
  EXPECT_NEAR(k.c(0, 0), std::exp(-1.0), 1e-4);
  EXPECT_NEAR(k.d(0, 0), std::exp(-1.0), 1e-4);
  EXPECT_EQ(k.b(0, 0), 0.0);
  EXPECT_EQ(k.provenance, CoefficientProvenance::Continuous);
  EXPECT_THROW(build_coeffs_continuous(g, noise_variance_v(spec, 1.0), 0.9995), InvalidInput);
  EXPECT_THROW(build_coeffs_continuous(g, noise_variance_v(spec, 2.0), 2.0), InvalidInput);
}

TEST(BuildCoeffsContinuous, ZeroInput) {
  const Autocov zero = make_autocov<double>(std::vector<Mat>(11, Mat::Zero(1, 1)), 0.1, AutocovProvenance::Theoretical);
  const auto k = build_coeffs_continuous(zero, Mat(Mat::Zero(1, 1)), 1.0);
  EXPECT_EQ(k.b.norm() + k.c.norm() + k.d.norm(), 0.0);
}

TEST(BuildCoeffsContinuous, ResidualAtTrueH) {
  ModelSpec spec;
  spec.kind = ModelKind::OuCont;
  spec.phi_or_h = (Mat(2, 2) << 1.0, 0.2, 0.2, 0.6).finished();
  spec.sigma = (Mat(2, 2) << 1.0, 0.3, 0.3, 0.5).finished();
  spec.driver = Driver::Bm;
  const double dt = 1e-3;
  const Autocov g = theoretical_gamma_ou(spec, dt, 2001);
  for (double t : {0.5, 1.0, 2.0}) {
    const auto k = build_coeffs_continuous(g, noise_variance_v(spec, t), t);
    EXPECT_LE(care_residual(k, spec.phi_or_h), 1e-6) << "t=" << t;
  }
}

TEST(SolveCare, ScalarExample) {
  const auto sol = solve_care(coeffs(Mat::Constant(1, 1, 7.0 / 6.0), Mat::Constant(1, 1, 22.0 / 3.0), Mat::Constant(1, 1, 2.0 / 3.0)));
  EXPECT_NEAR(sol.x(0, 0), 0.5, 1e-14);
  EXPECT_EQ(sol.method, CareMethod::ScalarQuadratic);
}

TEST(SolveCare, IdentityAndDiagonal) {
  const Mat i2 = Mat::Identity(2, 2);
  auto sol = solve_care(coeffs(Mat::Zero(2, 2), i2, i2));
  EXPECT_LE((sol.x - i2).norm(), 1e-10);
  const Mat d = (Mat(2, 2) << 4.0, 0.0, 0.0, 9.0).finished();
  sol = solve_care(coeffs(Mat::Zero(2, 2), i2, d));
  EXPECT_LE((sol.x - Mat((Mat(2, 2) << 2.0, 0.0, 0.0, 3.0).finished())).norm(), 1e-10);
  EXPECT_LE(sol.residual_norm, 1e-10 * 9.0);
}

TEST(SolveCare, RandomInstancesAgreeWithNewton) {
  Philox4x32 rng(17);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 40; ++i) {
    const Eigen::Index n = 1 + i % 5;
    Mat b(n, n), gc(n, n), gd(n, n);
    for (Eigen::Index j = 0; j < n * n; ++j) {
      b.data()[j] = normal(rng);
      gc.data()[j] = normal(rng);
      gd.data()[j] = normal(rng);
    }
    const auto k = coeffs(b, gc * gc.transpose() + 0.1 * Mat::Identity(n, n), gd * gd.transpose() + 0.1 * Mat::Identity(n, n));
    const auto sol = solve_care(k);
    EXPECT_LE(sol.residual_norm, care_tolerance(k));
    EXPECT_GE(sym_eig(sol.x).lambda.minCoeff(), -1e-9 * std::max(1.0, spectral_norm(sol.x)));
    const Mat closed = k.b - k.c * sol.x;
    const Eigen::EigenSolver<Mat> es(closed);
    EXPECT_LT(es.eigenvalues().real().maxCoeff(), 0.0) << "closed loop must be stable";
    const auto a = newton_care(k, stabilizing_guess_identity(k), 1e-11);
    const auto c = newton_care(k, stabilizing_guess_inverse_c(k), 1e-11);
    EXPECT_LE(spectral_norm(Mat(a.x - c.x)), 1e-6);
    EXPECT_LE(spectral_norm(Mat(a.x - sol.x)), 1e-6);
  }
}

TEST(SolveCare, NoSolutionWhenHamiltonianHasAxisEigenvalues) {
  // C = D = 0, B = 0: every eigenvalue of the Hamiltonian is 0.
  const Mat z = Mat::Zero(2, 2);
  EXPECT_THROW(solve_care(coeffs(z, z, z)), NoSolution);
}

TEST(CareResidual, Properties) {
  const auto k = coeffs(Mat::Constant(1, 1, 7.0 / 6.0), Mat::Constant(1, 1, 22.0 / 3.0), Mat::Constant(1, 1, 2.0 / 3.0));
  EXPECT_LE(care_residual(k, Mat(Mat::Constant(1, 1, 0.5))), 1e-14);
  EXPECT_NEAR(care_residual(k, Mat(Mat::Zero(1, 1))), 2.0 / 3.0, 1e-15);
  // First-order growth: d/de R(x + e) = 2B - 2Cx at x = 1/2.
  const double eps = 1e-6;
  const double slope = std::abs(2.0 * 7.0 / 6.0 - 2.0 * 22.0 / 3.0 * 0.5);
  EXPECT_NEAR(care_residual(k, Mat(Mat::Constant(1, 1, 0.5 + eps))) / eps, slope, 1e-4);
}
