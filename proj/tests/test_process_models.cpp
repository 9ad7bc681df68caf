#include "carest/process_models.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace carest;

namespace {

ModelSpec scalar(ModelKind kind, double a, double sigma2 = 1.0) {
  ModelSpec s;
  s.kind = kind;
  s.phi_or_h = Mat::Constant(1, 1, a);
  s.sigma = Mat::Constant(1, 1, sigma2);
  s.driver = kind == ModelKind::OuCont ? Driver::Bm : Driver::IidGauss;
  return s;
}

ModelSpec reference() {
  ModelSpec s;
  s.phi_or_h = (Mat(2, 2) << 0.5, 0.1, 0.1, 0.4).finished();
  s.sigma = Mat::Identity(2, 2);
  return s;
}

double sample_variance(const Path& p, Eigen::Index row = 0) {
  const auto x = p.values.row(row).array();
  return (x - x.mean()).square().mean();
}

/// Bartlett approximation of the standard error of the lag-0 sample
/// autocovariance: var ~ (2/N) sum_k gamma(k)^2.
double variance_std_error(const Autocov& gamma, long points) {
  double s = gamma.gammas[0](0, 0) * gamma.gammas[0](0, 0);
  for (std::size_t k = 1; k < gamma.size(); ++k) s += 2.0 * gamma.gammas[k](0, 0) * gamma.gammas[k](0, 0);
  return std::sqrt(2.0 * s / static_cast<double>(points));
}

}  // namespace

TEST(ModelSpec, ValidationRejectsBadModels) {
  EXPECT_NO_THROW(validate_model(reference()));
  EXPECT_THROW(validate_model(scalar(ModelKind::Var1, 1.0)), InvalidModel);
  EXPECT_THROW(validate_model(scalar(ModelKind::Var1, -0.2)), InvalidModel);
  EXPECT_THROW(validate_model(scalar(ModelKind::Var1, 0.5, -1.0)), InvalidModel);
  auto ou = scalar(ModelKind::OuCont, -1.0);
  EXPECT_THROW(validate_model(ou), InvalidModel);
  auto fbm = scalar(ModelKind::OuCont, 1.0);
  fbm.driver = Driver::Fbm;
  fbm.hurst = 1.0;
  EXPECT_THROW(validate_model(fbm), InvalidModel);
  auto wrong_driver = scalar(ModelKind::Var1, 0.5);
  wrong_driver.driver = Driver::Bm;
  EXPECT_THROW(validate_model(wrong_driver), InvalidModel);
}

TEST(Simulate, Var1StationaryVariance) {
  const auto spec = scalar(ModelKind::Var1, 0.5);
  const Path p = simulate_var1(spec, 100000, 0, 11);
  EXPECT_EQ(p.points(), 100001);
  const double se = variance_std_error(theoretical_gamma(spec, 200), p.points());
  EXPECT_NEAR(sample_variance(p), 4.0 / 3.0, 3.0 * se);
}

TEST(Simulate, Var1UniformDriverVariance) {
  auto spec = scalar(ModelKind::Var1, 0.5);
  spec.driver = Driver::IidUniform;
  const Path p = simulate_var1(spec, 100000, 0, 12);
  const double se = variance_std_error(theoretical_gamma(spec, 200), p.points());
  EXPECT_NEAR(sample_variance(p), 4.0 / 3.0, 4.0 * se);
}

TEST(Simulate, ZeroNoiseGivesZeroPath) {
  auto spec = reference();
  spec.sigma = Mat::Zero(2, 2);
  EXPECT_EQ(simulate_var1(spec, 50, 0, 1).values.cwiseAbs().maxCoeff(), 0.0);
  spec.kind = ModelKind::Varma1q;
  spec.ma = {Mat::Identity(2, 2) * 0.3};
  EXPECT_EQ(simulate_varma1q(spec, 50, 0, 1).values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Simulate, Deterministic) {
  const auto spec = reference();
  EXPECT_EQ(simulate_var1(spec, 500, 0, 99).values, simulate_var1(spec, 500, 0, 99).values);
  EXPECT_NE(simulate_var1(spec, 500, 0, 99).values, simulate_var1(spec, 500, 0, 100).values);
  EXPECT_EQ(simulate_var1(spec, 500, 30, 99).values, simulate_var1(spec, 500, 30, 99).values);
}

TEST(Simulate, VarmaWithoutMaEqualsVar1) {
  auto spec = reference();
  const Path a = simulate_var1(spec, 300, 0, 5);
  spec.kind = ModelKind::Varma1q;
  const Path b = simulate_varma1q(spec, 300, 0, 5);
  EXPECT_EQ(a.values, b.values);
  spec.kind = ModelKind::Var1;
  const Path c = simulate_var1(spec, 300, 20, 5);
  spec.kind = ModelKind::Varma1q;
  EXPECT_EQ(c.values, simulate_varma1q(spec, 300, 20, 5).values);
}

TEST(Simulate, Varma11Variance) {
  auto spec = scalar(ModelKind::Varma1q, 0.5);
  spec.ma = {Mat::Constant(1, 1, 0.3)};
  const Path p = simulate_varma1q(spec, 100000, 0, 21);
  const double closed = (1.0 + 2.0 * 0.5 * 0.3 + 0.09) / (1.0 - 0.25);
  const Autocov g = theoretical_gamma(spec, 200);
  EXPECT_NEAR(g.gammas[0](0, 0), closed, 1e-12);
  EXPECT_NEAR(sample_variance(p), closed, 3.0 * variance_std_error(g, p.points()));
}

TEST(Simulate, OuBrownianVariance) {
  const auto spec = scalar(ModelKind::OuCont, 1.0);
  const double dt = 0.01;
  const Path p = simulate_ou(spec, 5000.0, dt, 31);
  EXPECT_EQ(p.kind, PathKind::ContinuousSampled);
  EXPECT_NEAR(p.span(), 5000.0, 1e-9);
  const Autocov g = theoretical_gamma_ou(spec, dt, 2000);
  EXPECT_NEAR(sample_variance(p), 0.5, 3.0 * variance_std_error(g, p.points()));
  EXPECT_EQ(p.values, simulate_ou(spec, 5000.0, dt, 31).values);
}

TEST(Simulate, OuFractionalHalfMatchesBrownian) {
  auto spec = scalar(ModelKind::OuCont, 1.0);
  spec.driver = Driver::Fbm;
  spec.hurst = 0.5;
  const Path p = simulate_ou(spec, 10000.0, 0.01, 41);
  EXPECT_NEAR(sample_variance(p), 0.5, 0.05 * 0.5);
}

TEST(Simulate, OuRejectsBadGrid) {
  const auto spec = scalar(ModelKind::OuCont, 1.0);
  EXPECT_THROW(simulate_ou(spec, 10.0, 0.0, 1), InvalidInput);
  EXPECT_THROW(simulate_ou(spec, 10.0, -0.1, 1), InvalidInput);
}

TEST(FractionalNoise, UnitVarianceAndLagOneCorrelation) {
  const double h = 0.7;
  const Vec x = fractional_gaussian_noise(1 << 18, h, 3);
  const double var = x.squaredNorm() / static_cast<double>(x.size());
  const double lag1 = x.head(x.size() - 1).dot(x.tail(x.size() - 1)) / static_cast<double>(x.size() - 1);
  EXPECT_NEAR(var, 1.0, 0.03);
  EXPECT_NEAR(lag1, 0.5 * (std::pow(2.0, 2 * h) - 2.0), 0.03);
}

TEST(TheoreticalGamma, ScalarClosedForm) {
  const Autocov g = theoretical_gamma_var1(scalar(ModelKind::Var1, 0.5), 3);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_NEAR(g.gammas[0](0, 0), 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(g.gammas[1](0, 0), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(g.gammas[2](0, 0), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(g.gammas[3](0, 0), 1.0 / 6.0, 1e-14);
}

TEST(TheoreticalGamma, ZeroNoiseAndDiagonal) {
  auto spec = reference();
  spec.sigma = Mat::Zero(2, 2);
  for (const auto& g : theoretical_gamma_var1(spec, 4).gammas) EXPECT_EQ(g.norm(), 0.0);
  spec.phi_or_h = (Mat(2, 2) << 0.3, 0.0, 0.0, 0.6).finished();
  spec.sigma = Mat::Identity(2, 2);
  const Mat g0 = theoretical_gamma_var1(spec, 0).gammas[0];
  EXPECT_NEAR(g0(0, 0), 1.0 / (1.0 - 0.09), 1e-14);
  EXPECT_NEAR(g0(1, 1), 1.0 / (1.0 - 0.36), 1e-14);
  EXPECT_NEAR(g0(0, 1), 0.0, 1e-15);
}

TEST(TheoreticalGamma, SeriesOracleAgrees) {
  const auto spec = reference();
  const Mat h = -logm_spd(spec.phi_or_h);
  auto r = [&](long k) { return noise_increment_autocov(spec, k); };
  const Autocov g = theoretical_gamma(spec, 4);
  for (long t = 0; t <= 4; ++t) {
    const Mat oracle = gamma_series_oracle(h, r, t, 200);
    EXPECT_LE((oracle - g.gammas[t]).norm(), 1e-8 * g.gammas[t].norm()) << "t=" << t;
  }
}

TEST(TheoreticalGamma, ScalarSeriesOracleExamples) {
  const Mat h = Mat::Constant(1, 1, std::log(2.0));
  auto iid = [](long k) { return Mat::Constant(1, 1, k == 0 ? 1.0 : 0.0); };
  EXPECT_NEAR(gamma_series_oracle(h, iid, 0, 200)(0, 0), 4.0 / 3.0, 1e-8);
  EXPECT_NEAR(gamma_series_oracle(h, iid, 1, 200)(0, 0), 2.0 / 3.0, 1e-8);
  auto zero = [](long) { return Mat::Zero(1, 1); };
  EXPECT_EQ(gamma_series_oracle(h, zero, 2, 50)(0, 0), 0.0);
}

TEST(TheoreticalGamma, VarmaMatchesSeriesOracle) {
  auto spec = reference();
  spec.kind = ModelKind::Varma1q;
  spec.ma = {(Mat(2, 2) << 0.3, 0.1, -0.2, 0.2).finished(), (Mat(2, 2) << 0.1, 0.0, 0.05, -0.1).finished()};
  const Mat h = -logm_spd(spec.phi_or_h);
  auto r = [&](long k) { return noise_increment_autocov(spec, k); };
  const Autocov g = theoretical_gamma(spec, 5);
  for (long t = 0; t <= 5; ++t) {
    EXPECT_LE((gamma_series_oracle(h, r, t, 200) - g.gammas[t]).norm(), 1e-8 * g.gammas[0].norm()) << "t=" << t;
  }
}

TEST(TheoreticalGamma, OuClosedForm) {
  const auto spec = scalar(ModelKind::OuCont, 2.0, 3.0);
  const Autocov g = theoretical_gamma_ou(spec, 0.1, 11);
  for (long k = 0; k <= 10; ++k) EXPECT_NEAR(g.gammas[k](0, 0), 3.0 / 4.0 * std::exp(-0.2 * k), 1e-14);
}

TEST(NoiseVariance, Examples) {
  EXPECT_LE((noise_variance_v(reference(), 3.0) - 3.0 * Mat::Identity(2, 2)).norm(), 1e-15);
  EXPECT_EQ(noise_variance_v(reference(), 0.0).norm(), 0.0);
  auto varma = scalar(ModelKind::Varma1q, 0.5);
  varma.ma = {Mat::Constant(1, 1, 0.3)};
  // G_2 = eps_2 + 1.3 eps_1 + 0.3 eps_0.
  EXPECT_NEAR(noise_variance_v(varma, 2.0)(0, 0), 1.0 + 1.69 + 0.09, 1e-14);
  EXPECT_NEAR(noise_variance_v(varma, 1.0)(0, 0), 1.09, 1e-14);
  auto fbm = scalar(ModelKind::OuCont, 1.0, 2.0);
  fbm.driver = Driver::Fbm;
  fbm.hurst = 0.3;
  EXPECT_NEAR(noise_variance_v(fbm, 2.0)(0, 0), 2.0 * std::pow(2.0, 0.6), 1e-14);
  EXPECT_NEAR(noise_variance_v(scalar(ModelKind::OuCont, 1.0), 1.5)(0, 0), 1.5, 1e-15);
}

TEST(NoiseVariance, EqualsSumOfIncrementAutocovariances) {
  auto spec = reference();
  spec.kind = ModelKind::Varma1q;
  spec.ma = {(Mat(2, 2) << 0.3, 0.1, -0.2, 0.2).finished()};
  for (long t = 1; t <= 5; ++t) {
    Mat v = Mat::Zero(2, 2);
    for (long k = 1; k <= t; ++k) {
      for (long j = 1; j <= t; ++j) v += noise_increment_autocov(spec, k - j);
    }
    EXPECT_LE((v - noise_variance_v(spec, static_cast<double>(t))).norm(), 1e-13);
  }
}

TEST(Noise, RecoverMatchesInnovations) {
  const auto spec = reference();
  const SimulatedPath sp = simulate_var1_with_noise(spec, 400, 0, 8);
  const NoisePath noise = recover_noise(sp.path, spec.phi_or_h);
  EXPECT_LE((noise.increments - sp.increments).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(noise.cumulative.col(0).norm(), 0.0);
  EXPECT_LE((noise.cumulative.col(400) - noise.increments.rowwise().sum()).norm(), 1e-12);
}

TEST(Noise, RecoverEdgeCases) {
  const Path p = simulate_var1(reference(), 20, 0, 9);
  EXPECT_EQ(recover_noise(p, Mat::Zero(2, 2)).increments, p.values.rightCols(20));
  Path flat = p;
  flat.values.setConstant(2.5);
  EXPECT_EQ(recover_noise(flat, Mat::Identity(2, 2)).increments.norm(), 0.0);
  EXPECT_THROW(recover_noise(p, Mat::Identity(3, 3)), InvalidInput);
}

TEST(Noise, ReconstructionErrorDecays) {
  const auto spec = reference();
  const Mat h = -logm_spd(spec.phi_or_h);
  const Path p = simulate_var1(spec, 500, 0, 10);
  const NoisePath noise = recover_noise(p, spec.phi_or_h);
  double max_x = 0.0;
  for (Eigen::Index k = 0; k < p.points(); ++k) max_x = std::max(max_x, p.values.col(k).norm());
  double prev = std::numeric_limits<double>::infinity();
  for (long m : {2, 4, 8, 16, 32}) {
    const Path rec = reconstruct_from_noise(noise, h, m);
    EXPECT_DOUBLE_EQ(rec.t0, p.t0 + m + 1);
    double err = 0.0;
    for (long c = 33; c < p.points(); ++c) err = std::max(err, (rec.values.col(c - m - 1) - p.values.col(c)).norm());
    EXPECT_LE(err, spectral_norm(expm_sym(Mat(-(m + 1.0) * h))) * max_x) << "M=" << m;
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_THROW(reconstruct_from_noise(noise, h, 499), InvalidInput);
  const NoisePath zero = make_noise_path(Mat::Zero(2, 50));
  EXPECT_EQ(reconstruct_from_noise(zero, h, 5).values.norm(), 0.0);
}

TEST(Lamperti, RoundTripAndFormula) {
  const auto spec = reference();
  const Mat h = -logm_spd(spec.phi_or_h);
  const Path p = simulate_var1(spec, 10, 0, 12);
  EXPECT_LE((lamperti_inverse(lamperti_forward(p, h), h).values - p.values).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(lamperti_forward(p, Mat::Zero(2, 2)).values, p.values);
  Path c;
  c.values = Mat::Constant(1, 6, 2.0);
  const Path y = lamperti_forward(c, Mat::Constant(1, 1, 0.3));
  for (Eigen::Index k = 0; k < 6; ++k) EXPECT_NEAR(y.values(0, k), std::exp(0.3 * k) * 2.0, 1e-14 * std::exp(0.3 * k));
}

TEST(Names, RoundTrip) {
  for (auto k : {ModelKind::Var1, ModelKind::Varma1q, ModelKind::OuCont}) EXPECT_EQ(model_kind_from_string(to_string(k)), k);
  for (auto d : {Driver::IidGauss, Driver::IidUniform, Driver::Bm, Driver::Fbm}) EXPECT_EQ(driver_from_string(to_string(d)), d);
  EXPECT_THROW(model_kind_from_string("AR2"), InvalidInput);
}
