#include <gtest/gtest.h>

#include <cmath>

#include "pbg/mechanisms.hpp"
#include "pbg/profit_lab.hpp"
#include "pbg/symmetric_eq.hpp"

namespace pbg {
namespace {

TEST(Welfare, OverviewArithmetic) {
  WelfareBreakdown w = welfare(std::vector<double>{0.3, 0.2}, {0.8, 0.6}, {}, 0.9888, {1.0, 1.0});
  EXPECT_NEAR(w.mu, 0.25, 1e-15);
  EXPECT_NEAR(w.overview_term, 0.2472, 1e-12);
  EXPECT_NEAR(w.page_term, 0.36, 1e-15);
}

TEST(Welfare, NoOverviewNoPayments) {
  WelfareBreakdown w = welfare(std::vector<double>{0.3, 0.2}, {0.8, 0.6}, {0.0, 0.0}, 0.0, {2.5, 1.0});
  EXPECT_NEAR(w.profit, 2.5 * w.page_term, 1e-15);
}

TEST(Welfare, PaymentsCharged) {
  WelfareBreakdown w = welfare(std::vector<double>{0.3, 0.2}, {0.8, 0.6}, {0.1, 0.0}, 0.0, {1.0, 1.0});
  EXPECT_NEAR(w.compensation_cost, 0.03, 1e-15);
  EXPECT_NEAR(w.profit, 0.33, 1e-15);
}

TEST(OrderStats, PointMassesSort) {
  std::vector<StrategyGroup> g{{MixedStrategy::point_mass(0.2), 1, 1.0},
                               {MixedStrategy::point_mass(0.5), 1, 1.0},
                               {MixedStrategy::point_mass(0.1), 1, 1.0}};
  const auto e = order_stat_expectations(g);
  EXPECT_NEAR(e[0], 0.5, 1e-12);
  EXPECT_NEAR(e[1], 0.2, 1e-12);
  EXPECT_NEAR(e[2], 0.1, 1e-12);
}

TEST(OrderStats, UniformPair) {
  std::vector<StrategyGroup> g{{MixedStrategy({0.0, 1.0}, {0.0, 1.0}), 2, 1.0}};
  const auto e = order_stat_expectations(g);
  EXPECT_NEAR(e[0], 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(e[1], 1.0 / 3.0, 1e-9);
}

// E[max] and E[min] of two draws from the closed-form CDF by midpoint sums.
TEST(OrderStats, TwoPlayerEquilibrium) {
  const double u = 0.09, lo = 0.3, hi = (0.8 + std::sqrt(0.64 - 0.36)) / 2.0;
  auto F = [&](double x) { return ((u + x * x) / x - 0.6) / 0.2; };
  const int N = 200000;
  double emax = lo, emin = lo;
  for (int k = 0; k < N; ++k) {
    const double x = lo + (hi - lo) * (k + 0.5) / N;
    const double f = F(x);
    emax += (1.0 - f * f) * (hi - lo) / N;
    emin += (1.0 - f) * (1.0 - f) * (hi - lo) / N;
  }
  SymmetricEquilibrium eq = solve_symmetric(make_symmetric({0.8, 0.6}, 1.0, 2.0));
  const auto e = order_stat_expectations({{eq.strategy, 2, 1.0}});
  EXPECT_NEAR(e[0], emax, 1e-6);
  EXPECT_NEAR(e[1], emin, 1e-6);
  const ProfitParams pp{1.0, 1.0};
  const double oracle = 0.8 * emax + 0.6 * emin;
  EXPECT_NEAR(profit_reformulated({0.8, 0.6}, {0.0, 0.0}, pp, 1.0, 2.0, 0.0), oracle, 1e-4);
  EXPECT_NEAR(profit({0.8, 0.6}, {0.0, 0.0}, pp, make_symmetric({0.8, 0.6}, 1.0, 2.0)), oracle, 1e-4);
}

class SumIdentity : public ::testing::TestWithParam<std::vector<double>> {};

TEST_P(SumIdentity, OrderStatsSumToMeans) {
  SymmetricEquilibrium eq = solve_symmetric(make_symmetric(GetParam(), 1.0, 3.0));
  const int n = static_cast<int>(GetParam().size());
  const auto e = order_stat_expectations({{eq.strategy, n, 1.0}});
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    s += e[i];
    if (i > 0) EXPECT_GE(e[i - 1], e[i]);
  }
  EXPECT_NEAR(s, n * eq.strategy.mean(), 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Biases, SumIdentity,
                         ::testing::Values(std::vector<double>{0.8, 0.6}, std::vector<double>{0.9, 0.6, 0.3},
                                           std::vector<double>{0.9, 0.75, 0.63, 0.52, 0.42, 0.34}));

TEST(Scaling, ProfitRatioFollowsCostMultiplier) {
  const std::vector<double> p{0.9, 0.75, 0.63, 0.52, 0.42};
  const std::vector<double> zero(p.size(), 0.0);
  const ProfitParams pp{1.0, 1.0};
  for (double beta : {2.0, 3.0, 4.0}) {
    const double g1 = 1.0, g2 = 2.5;
    const double W1 = profit(p, zero, pp, make_symmetric(p, g1, beta));
    const double W2 = profit(p, zero, pp, make_symmetric(p, g2, beta));
    EXPECT_NEAR(W1 / W2, std::pow(g2 / g1, 1.0 / (beta - 1.0)), 1e-4) << beta;
  }
}

TEST(Sweep, OrderIndependentOfWorkers) {
  SweepSpec s;
  s.betas = {3.0, 4.0};
  s.alphas = {1.0};
  s.h_powers = {1.0, 0.5};
  s.gamma_Ls = {2.0};
  s.n_Hs = {7};
  s.mechanisms = false;
  s.jobs = 1;
  const std::string one = sweep_csv(scenario_sweep(s));
  s.jobs = 3;
  EXPECT_EQ(one, sweep_csv(scenario_sweep(s)));
  EXPECT_EQ(one.substr(0, one.find('\n')), "beta,alpha,h_power,gamma_L,n_H,W1,W2,W3,W4,r21,r31,r41");
}

TEST(Sweep, LongTermProfitBelowBaseline) {
  SweepSpec s;
  s.betas = {2.0, 4.0, 6.0};
  s.alphas = {1.0};
  s.h_powers = {1.0, 0.5};
  s.gamma_Ls = {2.0};
  s.n_Hs = {7};
  s.mechanisms = false;
  s.jobs = 2;
  for (const SweepRow& r : scenario_sweep(s)) EXPECT_LT(r.r31, 1.0) << r.beta << " " << r.h_power;
}

}  // namespace
}  // namespace pbg
