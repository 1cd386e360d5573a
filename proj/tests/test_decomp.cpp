#include <gtest/gtest.h>

#include <random>

#include "corrnet/decomp.hpp"
#include "corrnet/generate.hpp"

using namespace corrnet;

namespace {

Matrix random_skew(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  return a - a.transpose();
}

// U max(sigma - tau, 0) V^T from a full two-sided Jacobi SVD.
Matrix svt_oracle(const Matrix& a, double tau) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vector s = (svd.singularValues().array() - tau).cwiseMax(0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

SweepResult synthetic_sweep(const std::vector<double>& diffs) {
  SweepResult sr;
  sr.c_norm = 1.0;
  sr.eps = 1.0 / static_cast<double>(diffs.size());
  for (size_t i = 0; i < diffs.size(); ++i) {
    SweepRecord r;
    r.t = static_cast<double>(i + 1) * sr.eps;
    r.diff = diffs[i];
    sr.records.push_back(r);
  }
  return sr;
}

}  // namespace

TEST(Prox, SoftThreshold) {
  Matrix a(1, 4);
  a << 2.0, -0.5, 0.3, -3.0;
  Matrix r = soft_threshold(a, 0.5);
  EXPECT_DOUBLE_EQ(r(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(r(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(r(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(r(0, 3), -2.5);
}

TEST(Prox, DenseSvtMatchesJacobi) {
  Matrix a = random_skew(30, 1);
  for (double tau : {0.0, 1.0, 5.0, 1e3}) {
    SvtResult<double> r = singular_value_threshold(a, tau);
    Matrix expect = svt_oracle(a, tau);
    EXPECT_LT((r.x - expect).norm(), 1e-9 * (1 + a.norm())) << "tau " << tau;
    Eigen::JacobiSVD<Matrix> svd(a);
    EXPECT_EQ(r.rank, (svd.singularValues().array() > tau).count());
  }
}

TEST(Prox, PartialSvtMatchesJacobiOnLowRankInput) {
  const Index n = 120;
  PlantedSplit ps = planted_split(n, 3, 50.0);
  Matrix a = ps.l + 1e-3 * random_skew(n, 2);
  SvtWorkspace<double> ws;
  ws.dense_below = 16;
  for (int rep = 0; rep < 3; ++rep) {
    SvtResult<double> r = singular_value_threshold(a, 0.2, &ws);
    EXPECT_LT((r.x - svt_oracle(a, 0.2)).norm(), 1e-8 * a.norm());
    EXPECT_EQ(r.rank, 2);
  }
  EXPECT_GT(ws.partial_calls, 0);
  // full-rank input: whichever path runs, the result stays exact
  Matrix b = random_skew(n, 5);
  SvtResult<double> r = singular_value_threshold(b, 1.0, &ws);
  EXPECT_LT((r.x - svt_oracle(b, 1.0)).norm(), 1e-8 * b.norm());
}

TEST(Skew, RejectsNonSkewInput) {
  Matrix a = random_skew(5, 3);
  EXPECT_NO_THROW(SkewSymmetricMatrix{a});
  a(0, 1) += 0.1;
  EXPECT_THROW(SkewSymmetricMatrix{a}, ValidationError);
  EXPECT_THROW(SkewSymmetricMatrix{Matrix(2, 3)}, ValidationError);
  SkewSymmetricMatrix p = SkewSymmetricMatrix::project(a);
  EXPECT_EQ((p.matrix() + p.matrix().transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Coherence, DegreeAndIncoherence) {
  PlantedSplit ps = planted_split(40, 7, 3.0);
  EXPECT_EQ(deg_max(ps.s), 1);
  EXPECT_NEAR(incoherence(ps.l), std::sqrt(2.0 / 40.0), 1e-12);
  EXPECT_EQ(deg_max(Matrix::Zero(4, 4)), 0);
  Matrix star = Matrix::Zero(5, 5);
  for (Index j = 1; j < 5; ++j) star(0, j) = 1.0, star(j, 0) = -1.0;
  EXPECT_EQ(deg_max(star), 4);
  // any rank-r matrix has inc >= sqrt(r / n); nonzero skew matrices have r >= 2
  for (std::uint64_t s = 0; s < 5; ++s) EXPECT_GE(incoherence(random_skew(29, s)), std::sqrt(2.0 / 29.0) - 1e-12);
  auto cond = check_sufficient_condition(ps.s, ps.l);
  EXPECT_EQ(cond.deg, 1);
  EXPECT_FALSE(cond.holds);  // sqrt(2/40) > 1/12
}

TEST(Split, CornerSolutions) {
  SkewSymmetricMatrix c(random_skew(10, 4));
  auto lo = solve_split(c, 0.0);
  EXPECT_EQ(lo.s, c.matrix());
  EXPECT_TRUE(lo.l.isZero(0.0));
  auto hi = solve_split(c, 1.0);
  EXPECT_EQ(hi.l, c.matrix());
  EXPECT_TRUE(hi.s.isZero(0.0));
  EXPECT_THROW(solve_split(c, 1.5), ValidationError);
}

TEST(Split, RecoversPlantedPair) {
  PlantedSplit ps = planted_split(120, 0, 10.0);
  SkewSymmetricMatrix c(ps.s + ps.l);
  double best = 1e9;
  std::optional<SplitResult<double>> prev;
  for (int k = 1; k <= 20 && best >= 1e-4; ++k) {
    SplitResult<double> r = solve_split(c, 0.01 * k, {}, prev ? &*prev : nullptr);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(std::abs(r.duality_gap), 1e-6);
    best = std::min(best, recovery_error(r.s, r.l, ps.s, ps.l));
    prev = std::move(r);
  }
  EXPECT_LT(best, 1e-4);
}

TEST(Split, InteriorSolutionIsOptimal) {
  SkewSymmetricMatrix c(random_skew(24, 8));
  SplitResult<double> r = solve_split(c, 0.3);
  ASSERT_TRUE(r.converged);
  EXPECT_LT(r.primal_residual, 1e-7 * c.matrix().norm());
  EXPECT_LT(std::abs(r.duality_gap), 1e-6);
  // objective cannot beat either corner
  auto obj = [&](const Matrix& s, const Matrix& l) {
    return 0.3 * s.cwiseAbs().sum() + 0.7 * Eigen::JacobiSVD<Matrix>(l).singularValues().sum();
  };
  EXPECT_LE(r.objective, obj(c.matrix(), Matrix::Zero(24, 24)) + 1e-8);
  EXPECT_LE(r.objective, obj(Matrix::Zero(24, 24), c.matrix()) + 1e-8);
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  SkewSymmetricMatrix c(random_skew(16, 9));
  SweepOptions one, three;
  three.threads = 3;
  SweepResult a = sweep(c, 0.05, one), b = sweep(c, 0.05, three);
  ASSERT_EQ(a.records.size(), 20u);
  for (size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].diff, b.records[i].diff);
    EXPECT_EQ(a.records[i].s, b.records[i].s);
  }
  EXPECT_NEAR(a.records.back().t, 1.0, 1e-15);
  EXPECT_THROW(sweep(c, 0.03), ValidationError);
  EXPECT_THROW(sweep(c, 0.0), ValidationError);
}

TEST(Regions, ZeroRunConvention) {
  SweepResult sr = synthetic_sweep({0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0});
  auto reg = zero_regions(sr, 0.5);
  ASSERT_EQ(reg.size(), 4u);
  EXPECT_DOUBLE_EQ(reg[0].lo, 0.0);
  EXPECT_DOUBLE_EQ(reg[0].hi, 0.1);
  // a run starting at record i begins at the previous grid point
  EXPECT_DOUBLE_EQ(reg[1].lo, 0.2);
  EXPECT_DOUBLE_EQ(reg[1].hi, 0.4);
  EXPECT_EQ(reg[2].first, 5);
  EXPECT_EQ(reg[2].last, 7);
  EXPECT_DOUBLE_EQ(reg[3].hi, 1.0);
}

TEST(Regions, MiddleSelection) {
  SweepResult two = synthetic_sweep({0.0, 0.0, 1.0, 1.0, 0.0});
  try {
    select_middle_region(two, 0.5);
    FAIL() << "expected RegionError";
  } catch (const RegionError& e) {
    EXPECT_EQ(e.regions().size(), 2u);
  }
  SweepResult three = synthetic_sweep({0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0});
  RegionSelection sel = select_middle_region(three, 0.5);
  EXPECT_FALSE(sel.ambiguous);
  EXPECT_DOUBLE_EQ(sel.middle.lo, 0.2);
  EXPECT_DOUBLE_EQ(sel.middle.hi, 0.6);
  EXPECT_NEAR(sel.t0, 0.4, 1e-12);
  SweepResult four = synthetic_sweep({0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0});
  RegionSelection amb = select_middle_region(four, 0.5);
  EXPECT_TRUE(amb.ambiguous);
  EXPECT_FALSE(amb.note.empty());
  EXPECT_EQ(amb.regions.size(), 4u);
}
