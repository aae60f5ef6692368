#include <gtest/gtest.h>

#include <cmath>

#include "pbg/binary_type.hpp"
#include "pbg/symmetric_eq.hpp"

namespace pbg {
namespace {

// Two creators with biases a > b: the low end maximizes x b - g x^beta, and
// indifference gives b + (a - b) F(x) = (u + g x^beta) / x.
struct TwoPlayer {
  double a, b, g, beta, u, lo, hi;

  TwoPlayer(double a_, double b_, double g_, double beta_) : a(a_), b(b_), g(g_), beta(beta_) {
    lo = std::pow(b / (g * beta), 1.0 / (beta - 1.0));
    u = lo * b - g * std::pow(lo, beta);
    double l = lo, r = 1.0;
    while (a * r - g * std::pow(r, beta) > u) r *= 2.0;
    for (int k = 0; k < 200; ++k) {
      const double m = 0.5 * (l + r);
      (a * m - g * std::pow(m, beta) > u ? l : r) = m;
    }
    hi = 0.5 * (l + r);
  }

  double F(double x) const {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    return ((u + g * std::pow(x, beta)) / x - b) / (a - b);
  }
};

double sup_gap(const MixedStrategy& s, const TwoPlayer& o) {
  double gap = 0.0;
  for (double x : s.grid()) gap = std::max(gap, std::fabs(s.cdf(x) - o.F(x)));
  return gap;
}

TEST(Symmetric, TwoPlayerClosedForm) {
  SymmetricEquilibrium eq = solve_symmetric(make_symmetric({0.8, 0.6}, 1.0, 2.0));
  TwoPlayer o(0.8, 0.6, 1.0, 2.0);
  EXPECT_NEAR(eq.u, 0.09, 1e-12);
  EXPECT_NEAR(eq.x_lo, 0.3, 1e-12);
  EXPECT_NEAR(eq.x_hi, o.hi, 1e-10);
  EXPECT_LE(sup_gap(eq.strategy, o), 1e-8);
}

TEST(Symmetric, TwoPlayerOtherExponents) {
  for (double beta : {1.5, 3.0, 5.0}) {
    SymmetricEquilibrium eq = solve_symmetric(make_symmetric({0.9, 0.35}, 1.7, beta));
    TwoPlayer o(0.9, 0.35, 1.7, beta);
    EXPECT_NEAR(eq.u, o.u, 1e-12) << beta;
    EXPECT_LE(sup_gap(eq.strategy, o), 1e-8) << beta;
  }
}

TEST(Symmetric, ClosedFormHelperAgrees) {
  GameConfig cfg = make_symmetric({0.8, 0.6}, 1.0, 2.0);
  SymmetricEquilibrium a = solve_symmetric(cfg);
  SymmetricEquilibrium b = closed_form_two_player(cfg);
  for (double x : a.strategy.grid()) {
    EXPECT_NEAR(a.strategy.cdf(x), b.strategy.cdf(x), 1e-8);
  }
}

TEST(Symmetric, LowerEndUsesLastBias) {
  const std::vector<double> q{0.9, 0.6, 0.3};
  Argmax a = symmetric_lower_end(q, 2.0, 2.0);
  EXPECT_NEAR(a.x, 0.3 / 4.0, 1e-14);
  EXPECT_NEAR(a.value, 0.3 * 0.075 - 2.0 * 0.075 * 0.075, 1e-14);
}

TEST(Symmetric, TiedBiasesRejected) {
  try {
    solve_symmetric(make_symmetric({0.8, 0.6, 0.6}, 1.0, 2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::StrictDecreaseRequired);
  }
}

TEST(Symmetric, MaxEffortCheckIsOptIn) {
  GameConfig cfg = make_symmetric({3.0, 2.0}, 1.0, 2.0);
  EXPECT_NO_THROW(solve_symmetric(cfg));
  SymmetricOptions opts;
  opts.check_max_effort = true;
  try {
    solve_symmetric(cfg, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MaxEffortViolation);
  }
}

TEST(Grid, ClusteredNearLowEnd) {
  auto g = clustered_grid(0.2, 0.7, 2001, 1e-5);
  ASSERT_EQ(g.size(), 2001u);
  EXPECT_DOUBLE_EQ(g.front(), 0.2);
  EXPECT_DOUBLE_EQ(g.back(), 0.7);
  EXPECT_LE(g[1] - g[0], 1e-5 * 0.5 * (1 + 1e-9));
  for (std::size_t k = 2; k < g.size(); ++k) EXPECT_GE(g[k] - g[k - 1], g[k - 1] - g[k - 2] - 1e-15);
}

class SymmetricProperty : public ::testing::TestWithParam<std::vector<double>> {};

TEST_P(SymmetricProperty, CdfMonotoneWithEndpoints) {
  SymmetricEquilibrium eq = solve_symmetric(make_symmetric(GetParam(), 1.0, 3.0));
  const auto& F = eq.strategy.cdf_values();
  EXPECT_DOUBLE_EQ(F.front(), 0.0);
  EXPECT_DOUBLE_EQ(F.back(), 1.0);
  for (std::size_t k = 1; k < F.size(); ++k) EXPECT_GE(F[k], F[k - 1]);
}

TEST_P(SymmetricProperty, IndifferentOnSupport) {
  const double beta = 3.0;
  GameConfig cfg = make_symmetric(GetParam(), 1.0, beta);
  SymmetricEquilibrium eq = solve_symmetric(cfg);
  std::vector<StrategyGroup> groups{{eq.strategy, cfg.n, 1.0}};
  for (int k = 0; k <= 20; ++k) {
    const double x = eq.x_lo + (eq.x_hi - eq.x_lo) * k / 20.0;
    EXPECT_NEAR(deviation_utility(groups, 0, x, eq.effective_p, beta), eq.u, 1e-6) << x;
  }
}

TEST_P(SymmetricProperty, NoProfitableDeviation) {
  GameConfig cfg = make_symmetric(GetParam(), 1.0, 3.0);
  SymmetricEquilibrium eq = solve_symmetric(cfg);
  VerifyReport r = verify_equilibrium({{eq.strategy, cfg.n, 1.0}}, eq.effective_p, 3.0, 1000);
  EXPECT_LE(r.max_gain, 1e-6);
}

TEST_P(SymmetricProperty, ScaleInvariance) {
  const double s = 1.7;
  std::vector<double> p = GetParam();
  SymmetricEquilibrium a = solve_symmetric(make_symmetric(p, 1.0, 3.0));
  for (double& v : p) v *= s;
  SymmetricEquilibrium b = solve_symmetric(make_symmetric(p, s, 3.0));
  EXPECT_NEAR(b.u, s * a.u, 1e-12);
  for (double x : a.strategy.grid()) EXPECT_NEAR(a.strategy.cdf(x), b.strategy.cdf(x), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Biases, SymmetricProperty,
                         ::testing::Values(std::vector<double>{0.8, 0.6},
                                           std::vector<double>{0.9, 0.6, 0.3},
                                           std::vector<double>{0.9, 0.75, 0.63, 0.52, 0.42},
                                           std::vector<double>{0.95, 0.5, 0.45, 0.1}));

}  // namespace
}  // namespace pbg
