#include "pbg/symmetric_eq.hpp"

#include <algorithm>
#include <cmath>

#include "pbg/numeric.hpp"

namespace pbg {

double K_of(double x, double u, double gamma, double beta) {
  if (!(x > 0.0)) throw Error(Errc::Domain, "K is undefined at x = 0");
  return (u + gamma * std::pow(x, beta)) / x;
}

double J_of(double y, std::span<const double> q, double u, double gamma,
            double beta) {
  return largest_root_linear(binomial_mixture(y, q), gamma, beta, u);
}

Argmax symmetric_lower_end(std::span<const double> q, double gamma, double beta) {
  return argmax_linear_reward_free(q.back(), gamma, beta);
}

std::vector<double> clustered_grid(double lo, double hi, int points,
                                   double first_cell) {
  if (points < 2) return {lo};
  const int m = points - 1;
  std::vector<double> g(points);
  double r = 1.0;
  if (first_cell < 1.0 / m) {
    auto frac = [m](double rr) { return (rr - 1.0) / std::expm1(m * std::log(rr)); };
    double a = 1.0 + 1e-12, b = 2.0;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      double mid = 0.5 * (a + b);
      (frac(mid) > first_cell ? a : b) = mid;
    }
    r = 0.5 * (a + b);
  }
  const double len = hi - lo;
  if (r == 1.0) {
    for (int k = 0; k <= m; ++k) g[k] = lo + len * k / m;
  } else {
    const double denom = std::expm1(m * std::log(r));
    for (int k = 0; k <= m; ++k) g[k] = lo + len * std::expm1(k * std::log(r)) / denom;
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

double level_cdf(double x, std::span<const double> q, double u, double gamma,
                 double beta, double y_lo) {
  const double target = K_of(x, u, gamma, beta);
  auto mix = [&](double y) { return binomial_mixture(y, q); };
  return num::invert_increasing(mix, target, y_lo, 1.0);
}

CdfSegment level_segment(std::span<const double> q, double u, double gamma,
                         double beta, double x_lo, double x_hi,
                         const SymmetricOptions& opts) {
  CdfSegment seg{clustered_grid(x_lo, x_hi, opts.grid_points, opts.first_cell), {}};
  seg.F.resize(seg.x.size());
  double prev = 0.0;
  for (std::size_t k = 0; k < seg.x.size(); ++k) {
    double y = level_cdf(seg.x[k], q, u, gamma, beta, opts.warm_start ? prev : 0.0);
    seg.F[k] = std::max(y, prev);
    prev = seg.F[k];
  }
  return seg;
}

MixedStrategy level_strategy(std::span<const double> q, double u, double gamma,
                             double beta, double x_lo, double x_hi,
                             const SymmetricOptions& opts) {
  CdfSegment seg = level_segment(q, u, gamma, beta, x_lo, x_hi, opts);
  seg.F.front() = 0.0;
  seg.F.back() = 1.0;
  return MixedStrategy(std::move(seg.x), std::move(seg.F));
}

namespace {

struct Prepared {
  std::vector<double> q;
  double gamma;
  double beta;
  double u;
  double x_lo;
  double x_hi;
};

Prepared prepare(const GameConfig& cfg, const SymmetricOptions& opts) {
  validate_config(cfg);
  if (!cfg.symmetric_costs()) {
    throw Error(Errc::Config, "symmetric solver needs equal cost multipliers");
  }
  Prepared s{cfg.effective(), cfg.cost.gammas.front(), cfg.cost.beta, 0, 0, 0};
  for (std::size_t i = 0; i + 1 < s.q.size(); ++i) {
    if (s.q[i] - s.q[i + 1] <= kTieTol) {
      throw Error(Errc::StrictDecreaseRequired, "tied effective biases",
                  static_cast<std::ptrdiff_t>(i + 1));
    }
  }
  Argmax lo = symmetric_lower_end(s.q, s.gamma, s.beta);
  s.x_lo = lo.x;
  s.u = lo.value;
  s.x_hi = s.q.size() == 1 ? s.x_lo : largest_root_linear(s.q.front(), s.gamma, s.beta, s.u);
  if (opts.check_max_effort && s.x_hi > 1.0) {
    throw Error(Errc::MaxEffortViolation, "support extends beyond effort 1");
  }
  return s;
}

}  // namespace

SymmetricEquilibrium solve_symmetric(const GameConfig& cfg,
                                     const SymmetricOptions& opts) {
  Prepared s = prepare(cfg, opts);
  SymmetricEquilibrium eq;
  eq.u = s.u;
  eq.x_lo = s.x_lo;
  eq.x_hi = s.x_hi;
  eq.gamma = s.gamma;
  eq.beta = s.beta;
  eq.strategy = s.q.size() == 1
                    ? MixedStrategy::point_mass(s.x_lo)
                    : level_strategy(s.q, s.u, s.gamma, s.beta, s.x_lo, s.x_hi, opts);
  eq.effective_p = std::move(s.q);
  return eq;
}

SymmetricEquilibrium closed_form_two_player(const GameConfig& cfg,
                                            const SymmetricOptions& opts) {
  if (cfg.n != 2) throw Error(Errc::Config, "closed form needs two creators");
  Prepared s = prepare(cfg, opts);
  const double d = s.q[0] - s.q[1];
  std::vector<double> grid = clustered_grid(s.x_lo, s.x_hi, opts.grid_points, opts.first_cell);
  std::vector<double> cdf(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid[k];
    double f = (s.u + s.gamma * std::pow(x, s.beta)) / (x * d) - s.q[1] / d;
    cdf[k] = std::clamp(f, 0.0, 1.0);
  }
  cdf.front() = 0.0;
  cdf.back() = 1.0;
  SymmetricEquilibrium eq;
  eq.u = s.u;
  eq.x_lo = s.x_lo;
  eq.x_hi = s.x_hi;
  eq.gamma = s.gamma;
  eq.beta = s.beta;
  eq.strategy = MixedStrategy(std::move(grid), std::move(cdf));
  eq.effective_p = std::move(s.q);
  return eq;
}

}  // namespace pbg
