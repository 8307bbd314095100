#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace ndsearch;

namespace {

// Composite Simpson on the normalized density, [0, x] of (0, c).
double numeric_cdf(double c, double a, double x) {
  auto integrate = [&](double hi) {
    const int m = 20000;
    const double lo = 1e-12 * c, h = (hi - lo) / m;
    double s = 0.0;
    for (int k = 0; k <= m; ++k) {
      const double t = std::min(std::max(lo + k * h, 1e-12 * c), c * (1 - 1e-12));
      const double w = (k == 0 || k == m) ? 1 : (k % 2 ? 4 : 2);
      s += w * pdf_shape(t, c, a);
    }
    return s * h / 3.0;
  };
  return integrate(x) / integrate(c * (1 - 1e-12));
}

// E[S^2] for S = c1 / c under shape a, by Simpson on the unit interval.
double second_moment(double a) {
  const int m = 20000;
  double num = 0.0, den = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double t = std::min(std::max(static_cast<double>(k) / m, 1e-12), 1 - 1e-12);
    const double w = (k == 0 || k == m) ? 1 : (k % 2 ? 4 : 2);
    const double p = pdf_shape(t, 1.0, a);
    num += w * p * t * t;
    den += w * p;
  }
  return num / den;
}

// Population correlation of (cS, c(1-S)) with S independent of c and E[S]=1/2.
double rho_oracle(const SymMatrix& c, double a) {
  double m1 = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j, ++k) {
      m1 += c(i, j);
      m2 += c(i, j) * c(i, j);
    }
  m1 /= static_cast<double>(k);
  m2 /= static_cast<double>(k);
  const double s2 = second_moment(a);
  return (m2 * (0.5 - s2) - m1 * m1 / 4) / (m2 * s2 - m1 * m1 / 4);
}

}  // namespace

TEST(Pdf, FlatBellAndValleyShapes) {
  EXPECT_DOUBLE_EQ(pdf_shape(0.1, 1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(pdf_shape(0.9, 1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(pdf_shape(0.2, 1.0, 3.0), pdf_shape(0.8, 1.0, 3.0));
  EXPECT_GT(pdf_shape(0.5, 1.0, 3.0), pdf_shape(0.3, 1.0, 3.0));
  EXPECT_LT(pdf_shape(0.5, 1.0, -3.0), pdf_shape(0.3, 1.0, -3.0));
  EXPECT_DOUBLE_EQ(pdf_shape(0.2, 1.0, -2.0), pdf_shape(0.8, 1.0, -2.0));
  EXPECT_THROW(pdf_shape(0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(pdf_shape(0.5, 0.0, 1.0), DomainError);
}

TEST(InverseCdf, FlatIsLinear) {
  for (double u : {0.01, 0.25, 0.5, 0.7, 0.99}) EXPECT_NEAR(inverse_cdf_sample(40.0, 0.0, u), 40.0 * u, 1e-12);
}

TEST(InverseCdf, MatchesNumericCdfAcrossShapes) {
  for (double a : {-12.0, -3.0, -1.0, -0.5, 0.0, 0.5, 2.0, 10.0})
    for (double u : {0.03, 0.2, 0.45, 0.5, 0.61, 0.9, 0.995}) {
      const double x = inverse_cdf_sample(10.0, a, u);
      EXPECT_NEAR(numeric_cdf(10.0, a, x), u, 2e-4) << "a=" << a << " u=" << u;
    }
}

TEST(InverseCdf, StaysInsideAndIsSymmetric) {
  Rng rng(1);
  for (double a : {-15.0, -2.0, 0.0, 4.0, 15.0})
    for (int k = 0; k < 1000; ++k) {
      const double u = rng.uniform01();
      if (u == 0.0) continue;
      const double x = inverse_cdf_sample(7.0, a, u);
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 7.0);
      EXPECT_NEAR(x + inverse_cdf_sample(7.0, a, 1 - u), 7.0, 1e-9);
    }
  EXPECT_THROW(inverse_cdf_sample(1.0, 0.0, 0.0), DomainError);
  EXPECT_THROW(inverse_cdf_sample(1.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(inverse_cdf_sample(-1.0, 0.0, 0.5), DomainError);
}

TEST(InverseCdf, SampleVarianceMatchesDensity) {
  Rng rng(2);
  for (double a : {-6.0, 0.0, 3.0}) {
    double s = 0.0, s2 = 0.0;
    const int m = 200000;
    for (int k = 0; k < m; ++k) {
      const double x = inverse_cdf_sample(1.0, a, std::max(rng.uniform01(), 1e-300));
      s += x;
      s2 += x * x;
    }
    EXPECT_NEAR(s / m, 0.5, 3e-3);
    EXPECT_NEAR(s2 / m, second_moment(a), 3e-3) << a;
  }
}

TEST(Split, TspUnitsSumToCost) {
  const auto& inst = testutil::eil51();
  for (double a : {-12.0, -3.0, 0.0, 2.0, 10.0}) {
    const auto s = sample_split(inst, {a, 100.0, 5});
    for (std::size_t i = 0; i < 51; ++i)
      for (std::size_t j = 0; j < 51; ++j) {
        EXPECT_NEAR(s.c1(i, j) + s.c2(i, j), inst.costs(i, j), 1e-12 * std::max(1.0, inst.costs(i, j)));
        EXPECT_GE(s.c1(i, j), 0.0);
        EXPECT_GE(s.c2(i, j), 0.0);
        EXPECT_EQ(s.c1(i, j), s.c1(j, i));
      }
  }
}

TEST(Split, RhoMatchesMomentOracle) {
  const auto& inst = testutil::eil51();
  for (double a : {-12.0, -3.0, 0.0, 2.0, 10.0}) {
    double mean = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) mean += sample_split(inst, {a, 100.0, seed}).rho;
    mean /= 10;
    EXPECT_NEAR(mean, rho_oracle(inst.costs, a), 0.02) << "a=" << a;
  }
}

TEST(Split, SameSeedSameSplitOtherSeedDiffers) {
  const auto& inst = testutil::eil51();
  const auto s1 = sample_split(inst, {2.0, 100.0, 8});
  const auto s2 = sample_split(inst, {2.0, 100.0, 8});
  const auto s3 = sample_split(inst, {2.0, 100.0, 9});
  EXPECT_EQ(s1.c1, s2.c1);
  EXPECT_NE(s1.c1, s3.c1);
}

TEST(Split, HalvingHasRhoOne) {
  const auto& inst = testutil::eil51();
  const auto s = halving_split(inst);
  EXPECT_EQ(s.rho, 1.0);
  EXPECT_NEAR(measure_rho(s), 1.0, 1e-12);
}

TEST(Split, QuboSplitRangeAndZeroUnits) {
  const auto q = random_qubo(40, 3, 0.3);
  const auto s = sample_split(q, {1.0, 100.0, 2});
  EXPECT_TRUE(s.diagonal_units);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 40; ++j) {
      const double qij = q.q(i, j);
      if (qij == 0.0) {
        EXPECT_EQ(s.c1(i, j), 0.0);
        EXPECT_EQ(s.c2(i, j), 0.0);
        continue;
      }
      EXPECT_NEAR(s.c1(i, j) + s.c2(i, j), qij, 1e-12 * 100);
      EXPECT_GE(s.c1(i, j), qij / 2 - 100.0);
      EXPECT_LE(s.c1(i, j), qij / 2 + 100.0);
    }
}

TEST(Split, ZeroUnitStillConsumesItsDraw) {
  auto q = random_qubo(10, 4, 1.0);
  const auto full = sample_split(q, {0.0, 100.0, 3});
  q.q.set_sym(2, 5, 0.0);
  const auto holed = sample_split(q, {0.0, 100.0, 3});
  EXPECT_EQ(holed.c1(2, 5), 0.0);
  EXPECT_EQ(holed.c1(7, 9), full.c1(7, 9));
  EXPECT_EQ(holed.c1(0, 0), full.c1(0, 0));
}

TEST(Split, RhoRequiresTwoUnitsAndVariance) {
  QuboInstance q;
  q.n = 2;
  q.q = SymMatrix(2);
  q.q.at(0, 0) = 3.0;
  EXPECT_THROW(sample_split(q, {0.0, 100.0, 1}), DomainError);
  EXPECT_THROW(sample_split(q, {0.0, -1.0, 1}), DomainError);
}

TEST(Sweep, RhoIncreasesWithA) {
  const auto& inst = testutil::eil51();
  const auto pts = sweep_a(inst, {-12.0, -3.0, 0.0, 2.0, 10.0}, 4);
  ASSERT_EQ(pts.size(), 5u);
  for (std::size_t k = 1; k < pts.size(); ++k) EXPECT_GT(pts[k].rho, pts[k - 1].rho);
  EXPECT_THROW(sweep_a(inst, {}, 1), std::invalid_argument);
}

TEST(Sweep, SplitNearRhoPicksClosestGridPoint) {
  const auto& inst = testutil::eil51();
  const std::vector<double> grid{-12.0, -3.0, 0.0, 2.0, 3.0, 10.0};
  const auto pts = sweep_a(inst, grid, 6);
  const auto s = split_near_rho(inst, grid, 0.9, 6);
  EXPECT_EQ(s.source_params.a, 10.0);
  EXPECT_DOUBLE_EQ(s.rho, pts.back().rho);
}

TEST(Sidecar, JsonRoundTripTsp) {
  const auto& inst = testutil::eil51();
  const auto s = sample_split(inst, {-3.0, 100.0, 11});
  const auto back = split_from_json(nlohmann::json::parse(split_to_json(s).dump()), inst.costs);
  EXPECT_EQ(back.c1, s.c1);
  for (std::size_t i = 0; i < 51; ++i)
    for (std::size_t j = 0; j < 51; ++j) EXPECT_DOUBLE_EQ(back.c2(i, j), s.c2(i, j));
  EXPECT_EQ(back.rho, s.rho);
  EXPECT_EQ(back.source_params.seed, 11u);
}

TEST(Sidecar, JsonRejectsWrongShape) {
  const auto& inst = testutil::eil51();
  const auto j = split_to_json(sample_split(inst, {0.0, 100.0, 1}));
  EXPECT_THROW(split_from_json(j, SymMatrix(5)), ParseError);
  EXPECT_THROW(split_from_json(nlohmann::json{{"format", "other"}}, inst.costs), ParseError);
}
