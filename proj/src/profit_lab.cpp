#include "pbg/profit_lab.hpp"

#include <algorithm>
#include <cmath>

namespace pbg {

namespace {

// P(N <= i - 1) for every i, where N counts creators whose effort exceeds t.
void below_counts(const std::vector<StrategyGroup>& groups,
                  const std::vector<double>& exceed, std::vector<double>& dist,
                  std::vector<double>& cum) {
  std::size_t n = 0;
  dist.assign(1, 1.0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double e = exceed[g];
    for (int r = 0; r < groups[g].count; ++r) {
      dist.push_back(0.0);
      for (std::size_t k = n + 1; k > 0; --k) dist[k] = dist[k] * (1.0 - e) + dist[k - 1] * e;
      dist[0] *= 1.0 - e;
      ++n;
    }
  }
  cum.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += dist[i];
    cum[i] = acc;
  }
}

}  // namespace

std::vector<double> order_stat_expectations(const std::vector<StrategyGroup>& groups) {
  int n = 0;
  std::vector<double> nodes;
  for (const auto& g : groups) {
    n += g.count;
    nodes.insert(nodes.end(), g.strategy.grid().begin(), g.strategy.grid().end());
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::vector<double> out(n, nodes.front());
  std::vector<double> ex(groups.size()), dist, c0, cm, c1;
  auto eval = [&](double t, bool left, std::vector<double>& cum) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& s = groups[g].strategy;
      ex[g] = 1.0 - (left ? s.cdf_left(t) : s.cdf(t));
    }
    below_counts(groups, ex, dist, cum);
  };
  // Simpson on each merged cell using the right limit at the left end and
  // the left limit at the right end.
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k], b = nodes[k + 1];
    eval(a, false, c0);
    eval(0.5 * (a + b), false, cm);
    eval(b, true, c1);
    const double w = (b - a) / 6.0;
    for (int i = 0; i < n; ++i) {
      out[i] += w * ((1.0 - c0[i]) + 4.0 * (1.0 - cm[i]) + (1.0 - c1[i]));
    }
  }
  return out;
}

WelfareBreakdown welfare(const std::vector<double>& order_stats,
                         const std::vector<double>& p, const std::vector<double>& c,
                         double p0, const ProfitParams& params) {
  WelfareBreakdown w;
  double total = 0.0;
  for (std::size_t i = 0; i < order_stats.size(); ++i) {
    w.page_term += order_stats[i] * p[i];
    if (i < c.size()) w.compensation_cost += order_stats[i] * c[i];
    total += order_stats[i];
  }
  w.mu = total / static_cast<double>(order_stats.size());
  w.overview_term = h_of(w.mu, params.h_power) * p0;
  w.profit = params.alpha * (w.page_term + w.overview_term) - w.compensation_cost;
  return w;
}

WelfareBreakdown welfare(const std::vector<StrategyGroup>& groups,
                         const std::vector<double>& p, const std::vector<double>& c,
                         double p0, const ProfitParams& params) {
  return welfare(order_stat_expectations(groups), p, c, p0, params);
}

}  // namespace pbg
