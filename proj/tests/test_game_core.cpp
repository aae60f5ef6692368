#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pbg/game_core.hpp"

namespace pbg {
namespace {

double choose(int m, int i) { return std::tgamma(m + 1.0) / (std::tgamma(i + 1.0) * std::tgamma(m - i + 1.0)); }

TEST(Biases, AcceptsNonIncreasing) {
  PositionBiases b = validate_biases({0.9, 0.5, 0.5, 0.1}, 0.3);
  EXPECT_EQ(b.p.size(), 4u);
  EXPECT_DOUBLE_EQ(b.p0, 0.3);
}

TEST(Biases, RejectsIncreaseWithIndex) {
  try {
    validate_biases({0.9, 0.5, 0.6});
    FAIL() << "expected NonMonotone";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonMonotone);
    EXPECT_EQ(e.index(), 2);
  }
}

TEST(Biases, RejectsNonPositive) {
  try {
    validate_biases({0.9, 0.0});
    FAIL() << "expected NonPositive";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonPositive);
    EXPECT_EQ(e.index(), 1);
  }
}

TEST(Cost, ValueAtKnownPoint) {
  CostModel cm{2.0, {1.0, 2.0, 4.0}};
  EXPECT_NEAR(cost_value(0.05, 2, cm), 0.01, 1e-15);
}

TEST(Cost, GradientMatchesFiniteDifference) {
  const double h = 1e-5;
  for (double beta : {1.5, 2.0, 3.0, 6.0}) {
    CostModel cm{beta, {0.7, 2.3}};
    for (double x : {0.1, 0.35, 0.8}) {
      for (std::size_t i = 0; i < 2; ++i) {
        const double fd = (cost_value(x + h, i, cm) - cost_value(x - h, i, cm)) / (2 * h);
        EXPECT_NEAR(cost_grad(x, i, cm) / fd, 1.0, 1e-6) << beta << " " << x;
      }
    }
  }
}

TEST(Argmax, LinearRewardKnownOptimum) {
  Argmax a = argmax_linear_reward(0.4, 4.0, 2.0);
  EXPECT_NEAR(a.x, 0.05, 1e-14);
  EXPECT_NEAR(a.value, 0.4 * 0.05 - 4.0 * 0.0025, 1e-14);
}

TEST(Argmax, ClampsAtOne) {
  Argmax a = argmax_linear_reward(5.0, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(a.x, 1.0);
  Argmax f = argmax_linear_reward_free(5.0, 1.0, 2.0);
  EXPECT_NEAR(f.x, 2.5, 1e-12);
}

TEST(Argmax, LargestRootSolvesLevelEquation) {
  const double q = 0.8, g = 1.0, b = 2.0, u = 0.09;
  const double x = largest_root_linear(q, g, b, u);
  EXPECT_NEAR(x * q - g * x * x, u, 1e-12);
  EXPECT_GT(x, q / (2 * g));
}

TEST(Mixture, MatchesDirectSum) {
  const std::vector<double> q{0.9, 0.6, 0.45, 0.2, 0.05};
  const int m = static_cast<int>(q.size()) - 1;
  for (double y : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    double direct = 0.0;
    for (int i = 0; i <= m; ++i) direct += choose(m, i) * std::pow(y, m - i) * std::pow(1 - y, i) * q[i];
    EXPECT_NEAR(binomial_mixture(y, q), direct, 1e-13);
  }
}

TEST(Mixture, EndpointsAndMonotone) {
  const std::vector<double> q{0.9, 0.6, 0.45, 0.2};
  EXPECT_DOUBLE_EQ(binomial_mixture(1.0, q), 0.9);
  EXPECT_DOUBLE_EQ(binomial_mixture(0.0, q), 0.2);
  double prev = -1.0;
  for (int k = 0; k <= 100; ++k) {
    const double v = binomial_mixture(k / 100.0, q);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Mixture, EmptyThrows) {
  std::vector<double> q;
  EXPECT_THROW(binomial_mixture(0.5, q), Error);
}

// Enumerate which opponents sit below and weight the resulting rank.
TEST(RankBias, MatchesEnumeration) {
  const std::vector<double> y{0.3, 0.8, 0.55};
  const std::vector<double> p{1.0, 0.7, 0.4, 0.1};
  double direct = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    double w = 1.0;
    int below = 0;
    for (int j = 0; j < 3; ++j) {
      const bool b = mask >> j & 1;
      w *= b ? y[j] : 1 - y[j];
      below += b;
    }
    direct += w * p[3 - below];
  }
  EXPECT_NEAR(expected_rank_bias(y, p), direct, 1e-14);
}

TEST(RankBias, IdenticalOpponentsReduceToMixture) {
  const std::vector<double> p{0.9, 0.6, 0.3, 0.2};
  const std::vector<double> y(3, 0.42);
  EXPECT_NEAR(expected_rank_bias(y, p), binomial_mixture(0.42, p), 1e-14);
}

TEST(Strategy, PointMass) {
  MixedStrategy s = MixedStrategy::point_mass(0.25);
  EXPECT_DOUBLE_EQ(s.cdf(0.25), 1.0);
  EXPECT_DOUBLE_EQ(s.cdf_left(0.25), 0.0);
  EXPECT_DOUBLE_EQ(s.atom_at(0.25), 1.0);
  EXPECT_DOUBLE_EQ(s.mean(), 0.25);
}

TEST(Strategy, UniformMean) {
  MixedStrategy s({0.2, 0.6}, {0.0, 1.0});
  EXPECT_NEAR(s.mean(), 0.4, 1e-14);
  EXPECT_NEAR(s.cdf(0.3), 0.25, 1e-14);
  EXPECT_DOUBLE_EQ(s.cdf(0.1), 0.0);
  EXPECT_DOUBLE_EQ(s.cdf(0.9), 1.0);
}

TEST(Strategy, AtomAtBottom) {
  MixedStrategy s({0.2, 0.6}, {0.3, 1.0}, {{0.2, 0.3}});
  EXPECT_DOUBLE_EQ(s.atom_at(0.2), 0.3);
  EXPECT_NEAR(s.mean(), 0.3 * 0.2 + 0.7 * 0.4, 1e-14);
}

TEST(Config, EffectiveAddsCompensation) {
  GameConfig cfg = make_symmetric({0.8, 0.6, 0.3}, 1.0, 2.0, {0.1, 0.05, 0.0});
  const auto e = cfg.effective();
  EXPECT_NEAR(e[0], 0.9, 1e-15);
  EXPECT_NEAR(e[1], 0.65, 1e-15);
  EXPECT_NEAR(e[2], 0.3, 1e-15);
}

TEST(Config, RejectsBadBeta) {
  EXPECT_THROW(validate_config(make_symmetric({0.8, 0.6}, 1.0, 1.0)), Error);
}

TEST(Config, BinaryGammas) {
  GameConfig cfg = make_binary({0.9, 0.7, 0.5, 0.3}, 1, 1.0, 3.0, 2.0);
  ASSERT_TRUE(cfg.split.has_value());
  EXPECT_EQ(cfg.cost.gammas, (std::vector<double>{1.0, 3.0, 3.0, 3.0}));
}

TEST(Property, MixtureBoundedByExtremes) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> q(6);
    for (double& v : q) v = U(rng);
    std::sort(q.rbegin(), q.rend());
    const double y = U(rng);
    const double v = binomial_mixture(y, q);
    EXPECT_LE(v, q.front() + 1e-15);
    EXPECT_GE(v, q.back() - 1e-15);
  }
}

}  // namespace
}  // namespace pbg
