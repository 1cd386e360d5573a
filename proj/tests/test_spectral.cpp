#include <gtest/gtest.h>

#include <random>

#include "corrnet/generate.hpp"
#include "corrnet/spectral.hpp"

using namespace corrnet;

namespace {

TimeSeries white_series(Index n, Index samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  TimeSeries x;
  x.values.resize(n, samples);
  for (Index j = 0; j < samples; ++j)
    for (Index i = 0; i < n; ++i) x.values(i, j) = g(rng);
  return x;
}

}  // namespace

TEST(Seeds, DerivedStreamsDiffer) {
  EXPECT_EQ(derive_seed(5, 1), derive_seed(5, 1));
  EXPECT_NE(derive_seed(5, 1), derive_seed(5, 2));
  EXPECT_NE(derive_seed(5, 1), derive_seed(6, 1));
}

TEST(Simulation, RecursionMatchesDirectLoop) {
  TransferMatrix h(2, 2);
  h.set(1, 0, TransferFunction({0.0, 0.5, 0.25}));
  h.set(0, 1, TransferFunction::delay(-0.3, 3));
  TimeSeries e = white_series(2, 50, 3);
  TimeSeries x = simulate_ldim(h, e, 10);
  ASSERT_EQ(x.samples(), 40);
  Matrix ref = e.values;
  for (Index t = 0; t < 50; ++t) {
    if (t >= 3) ref(0, t) += -0.3 * ref(1, t - 3);
    if (t >= 1) ref(1, t) += 0.5 * ref(0, t - 1);
    if (t >= 2) ref(1, t) += 0.25 * ref(0, t - 2);
  }
  EXPECT_LT((x.values - ref.rightCols(40)).cwiseAbs().maxCoeff(), 1e-14);

  TransferMatrix inst(2, 2);
  inst.set(1, 0, TransferFunction({0.5}));
  EXPECT_THROW(simulate_ldim(inst, e, 10), ValidationError);
  EXPECT_THROW(simulate_ldim(h, e, 50), ValidationError);
}

TEST(Simulation, SeededRunsRepeat) {
  GeneratorConfig cfg;
  cfg.validate_omegas.clear();
  GeneratedModel gm = draw_model(cfg, 2);
  TimeSeries a = simulate_model(gm.model, 500, 9), b = simulate_model(gm.model, 500, 9);
  TimeSeries c = simulate_model(gm.model, 500, 10);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
}

TEST(Welch, WhiteNoiseIsFlat) {
  TimeSeries x = white_series(2, 1 << 16, 1);
  WelchConfig cfg;
  cfg.segment_length = 128;
  SpectralEstimate est = welch_cross_psd(x, cfg);
  ASSERT_EQ(est.values.size(), 65u);
  EXPECT_EQ(est.segments, (65536 - 128) / 64 + 1);
  for (size_t k = 1; k + 1 < est.values.size(); ++k)
    EXPECT_LT((est.values[k] - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.12) << "bin " << k;
  cfg.segment_length = 100;
  EXPECT_THROW(welch_cross_psd(x, cfg), ValidationError);
  cfg.segment_length = 1 << 15;
  EXPECT_THROW(welch_cross_psd(x, cfg), ValidationError);
}

TEST(Welch, ArOneMatchesRationalSpectrum) {
  const double a = 0.6;
  TransferMatrix h(2, 2);
  h.set(1, 0, TransferFunction::delay(a, 1));
  TimeSeries e = white_series(2, (1 << 18) + 1000, 4);
  TimeSeries x = simulate_ldim(h, e, 1000);
  WelchConfig cfg;
  cfg.segment_length = 256;
  std::vector<double> omegas = {0.4, 3 * kPi / 8, 2.0};
  SpectralEstimate est = welch_at(x, omegas, cfg);
  for (size_t f = 0; f < omegas.size(); ++f) {
    cdouble z = std::exp(cdouble(0, -omegas[f]));
    // x2 = a z^-1 x1 + e2 with unit white inputs
    EXPECT_NEAR(est.values[f](1, 1).real(), a * a + 1.0, 0.08);
    EXPECT_LT(std::abs(est.values[f](1, 0) - a * z), 0.06);
    EXPECT_NEAR(est.values[f](0, 0).real(), 1.0, 0.06);
  }
}

TEST(Welch, DirectEvaluationMatchesFftBins) {
  TimeSeries x = white_series(3, 4096, 6);
  WelchConfig cfg;
  cfg.segment_length = 64;
  SpectralEstimate fft = welch_cross_psd(x, cfg);
  std::vector<double> omegas = {fft.omegas[5], fft.omegas[12], fft.omegas[32]};
  SpectralEstimate direct = welch_at(x, omegas, cfg);
  EXPECT_LT((direct.values[0] - fft.values[5]).norm(), 1e-10);
  EXPECT_LT((direct.values[1] - fft.values[12]).norm(), 1e-10);
  EXPECT_LT((direct.values[2] - fft.values[32]).norm(), 1e-10);
}

TEST(Welch, EstimatedInverseApproachesAnalytic) {
  GeneratorConfig cfg;
  cfg.validate_omegas.clear();
  cfg.n = 8;
  cfg.edges = 6;
  cfg.q = 1;
  cfg.clique_size = 3;
  GeneratedModel gm = draw_model(cfg, 1);
  TimeSeries x = simulate_model(gm.model, 400000, 2);
  WelchConfig wc;
  wc.segment_length = 64;
  const double w = 3 * kPi / 8;
  SpectralEstimate est = welch_at(x, {w}, wc);
  CMatrix got = estimate_ipsdm(est, w);
  CMatrix expect = analytic_ipsdm(gm.model, w);
  EXPECT_LT((got - expect).norm() / expect.norm(), 0.08);
  EXPECT_THROW(estimate_ipsdm(est, 1.0), ValidationError);
  EXPECT_THROW(estimate_ipsdm(CMatrix::Zero(2, 2), w), NumericalError);
}

TEST(Simulation, PolynomialNoiseCovariance) {
  PolyCorrelationSpec s;
  s.m = 2;
  s.p = 3;
  s.gains = TransferMatrix(2, 10);
  s.gains.set(0, 1, TransferFunction::delay(1.0, 1));  // v1
  s.gains.set(1, 6, TransferFunction::delay(1.0, 1));  // v1^3
  s.gains.set(1, 4, TransferFunction::delay(1.0, 2));  // v1 v2, uncorrelated with both
  NoiseSeries ns = simulate_noise_poly(s, Vector::Ones(2), 400000, 5);
  const Matrix& e = ns.e.values;
  const double N = static_cast<double>(e.cols());
  Matrix cov = e * e.transpose() / N;
  // E[v1 v1^3] = 3, Var(v1^3) = 15, Var(v1 v2) = 1
  EXPECT_NEAR(cov(0, 1), 3.0, 0.1);
  EXPECT_NEAR(cov(0, 0), 2.0, 0.05);
  EXPECT_NEAR(cov(1, 1), 17.0, 0.6);
  EXPECT_NEAR(e.row(1).mean(), 0.0, 0.03);
}
