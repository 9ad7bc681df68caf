#include "carest/asymptotics.hpp"
#include "carest/rng.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace carest;

namespace {

Mat random_matrix(Philox4x32& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> normal;
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

Autocov random_autocov(Philox4x32& rng, Eigen::Index n, long lags, double step = 1.0) {
  std::vector<Mat> gs;
  for (long k = 0; k <= lags; ++k) {
    Mat g = random_matrix(rng, n, n);
    if (k == 0) g = g * g.transpose();
    gs.push_back(g);
  }
  return make_autocov(gs, step, AutocovProvenance::Sample);
}

}  // namespace

TEST(TransposePermutation, SmallCases) {
  EXPECT_EQ(transpose_permutation(1), Mat::Identity(1, 1));
  const Mat p = transpose_permutation(2);
  Mat expected = Mat::Zero(4, 4);
  expected(0, 0) = expected(1, 2) = expected(2, 1) = expected(3, 3) = 1.0;
  EXPECT_EQ(p, expected);
  EXPECT_THROW(transpose_permutation(0), InvalidInput);
}

TEST(TransposePermutation, IsInvolutionAndTransposesVec) {
  Philox4x32 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Index n = 1 + i % 6;
    const Mat p = transpose_permutation(n);
    if (i < 6) EXPECT_EQ(Mat(p * p), Mat(Mat::Identity(n * n, n * n)));
    const Mat a = random_matrix(rng, n, n);
    EXPECT_EQ(Vec(p * vec(a)), vec(Mat(a.transpose())));
  }
}

TEST(L1, ScalarExamples) {
  const auto op1 = build_L1(1, 1);
  const Vec y = op1.apply((Vec(2) << 2.0, 5.0).finished());
  EXPECT_EQ(y, (Vec(3) << 2.0, -3.0, 6.0).finished());

  const double eps = 0.25;
  Vec z = Vec::Zero(4);
  z(0) = eps;
  EXPECT_EQ(build_L1(1, 3).apply(z), (Vec(3) << 3.0 * eps, eps, -2.0 * eps).finished());
  EXPECT_THROW(op1.apply(Vec::Zero(3)), InvalidInput);
  EXPECT_THROW(build_L1(2, 0), InvalidInput);
}

TEST(L1, MatchesCoefficientDifferences) {
  Philox4x32 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Index n = 1 + i % 3;
    const long t = 1 + (i / 3) % 5;
    const Autocov truth = random_autocov(rng, n, t);
    Autocov est = truth;
    for (auto& g : est.gammas) g += 0.01 * random_matrix(rng, n, n);
    // Lag 0 estimates are symmetric in practice.
    est.gammas[0] = (est.gammas[0] + est.gammas[0].transpose()).eval() / 2.0;
    EXPECT_LE(verify_L1_identity(truth, est, t), 1e-12) << "n=" << n << " t=" << t;
  }
}

TEST(L1, StackedErrorLayout) {
  Philox4x32 rng(8);
  const Autocov truth = random_autocov(rng, 2, 3);
  Autocov est = truth;
  est.gammas[2] += Mat::Ones(2, 2);
  const auto s = stack_cov_error(est, truth, 3);
  ASSERT_EQ(s.z.size(), 16);
  EXPECT_EQ(s.z.segment(8, 4), Vec::Ones(4));
  EXPECT_EQ(s.z.head(8).norm() + s.z.tail(4).norm(), 0.0);
}

TEST(L1Continuous, ConstantInput) {
  const auto op = build_L1_continuous<double>(1, 0.01, 100);
  const Vec y = op.apply(Vec::Ones(101));
  EXPECT_NEAR(y(0), 1.0, 1e-12);
  EXPECT_NEAR(y(1), 0.0, 1e-15);
  EXPECT_NEAR(y(2), 0.0, 1e-15);
}

TEST(L1Continuous, MatchesContinuousCoefficients) {
  Philox4x32 rng(21);
  for (Eigen::Index n : {1, 2, 3}) {
    const Autocov truth = random_autocov(rng, n, 40, 0.05);
    Autocov est = truth;
    for (auto& g : est.gammas) g += 0.01 * random_matrix(rng, n, n);
    est.gammas[0] = (est.gammas[0] + est.gammas[0].transpose()).eval() / 2.0;
    const Mat v = Mat::Zero(n, n);
    const auto kt = build_coeffs_continuous(truth, v, 2.0);
    const auto ke = build_coeffs_continuous(est, v, 2.0);
    const auto op = build_L1_continuous<double>(n, 0.05, 40);
    Vec z(41 * n * n);
    for (long k = 0; k <= 40; ++k) z.segment(k * n * n, n * n) = vec(Mat(est.gammas[k] - truth.gammas[k]));
    EXPECT_LE((op.apply(z) - stacked_coefficient_delta(ke, kt)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(MonteCarloLimit, ZeroNoise) {
  ModelSpec spec;
  spec.phi_or_h = (Mat(2, 2) << 0.5, 0.1, 0.1, 0.4).finished();
  spec.sigma = Mat::Zero(2, 2);
  const auto mc = monte_carlo_limit(spec, 100, 3, 50, 1);
  EXPECT_EQ(mc.gate_failures, 50);
  EXPECT_EQ(mc.z.norm(), 0.0);
  const Vec expected = -std::sqrt(100.0) * vec(Mat(Mat::Identity(2, 2) - spec.phi_or_h));
  for (Eigen::Index r = 0; r < mc.theta_err.rows(); ++r) {
    EXPECT_LE((mc.theta_err.row(r).transpose() - expected).norm(), 1e-12);
  }
}

TEST(MonteCarloLimit, ReproducibleAcrossJobs) {
  ModelSpec spec;
  spec.phi_or_h = Mat::Constant(1, 1, 0.5);
  spec.sigma = Mat::Identity(1, 1);
  const auto a = monte_carlo_limit(spec, 500, 3, 60, 9, 0.5, 1);
  const auto b = monte_carlo_limit(spec, 500, 3, 60, 9, 0.5, 3);
  EXPECT_EQ(a.theta_err, b.theta_err);
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.seeds, b.seeds);
  EXPECT_EQ(a.seeds.front(), derive_seed(9, 0));
}

TEST(MonteCarloLimit, Preconditions) {
  ModelSpec spec;
  spec.phi_or_h = Mat::Constant(1, 1, 0.5);
  spec.sigma = Mat::Identity(1, 1);
  EXPECT_THROW(monte_carlo_limit(spec, 500, 3, 49, 1), InvalidInput);
  EXPECT_THROW(monte_carlo_limit(spec, 3, 3, 50, 1), InvalidInput);
  spec.kind = ModelKind::OuCont;
  spec.driver = Driver::Bm;
  EXPECT_THROW(monte_carlo_limit(spec, 500, 3, 50, 1), InvalidInput);
}

TEST(RegressionRSquared, PerfectAndNoFit) {
  Philox4x32 rng(2);
  const Mat x = random_matrix(rng, 200, 3);
  const Mat y = x * random_matrix(rng, 3, 2);
  EXPECT_NEAR(regression_r_squared(y, x), 1.0, 1e-12);
  EXPECT_LT(regression_r_squared(random_matrix(rng, 200, 2), x), 0.2);
}
