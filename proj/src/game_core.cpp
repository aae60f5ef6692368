#include "pbg/game_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pbg/numeric.hpp"

namespace pbg {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::NonMonotone: return "NonMonotone";
    case Errc::NonPositive: return "NonPositive";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::Domain: return "Domain";
    case Errc::StrictDecreaseRequired: return "StrictDecreaseRequired";
    case Errc::MaxEffortViolation: return "MaxEffortViolation";
    case Errc::NoBracket: return "NoBracket";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::ValidationFailed: return "ValidationFailed";
    case Errc::MonotonicityBroken: return "MonotonicityBroken";
    case Errc::NonPositiveDelta: return "NonPositiveDelta";
    case Errc::ProbabilityAboveOne: return "ProbabilityAboveOne";
    case Errc::Infeasible: return "Infeasible";
    case Errc::Degenerate: return "Degenerate";
    case Errc::Config: return "Config";
  }
  return "Unknown";
}

PositionBiases validate_biases(std::vector<double> p, double p0) {
  if (p.empty()) throw Error(Errc::LengthMismatch, "empty bias vector");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) {
      throw Error(Errc::NonPositive, "bias at index " + std::to_string(i),
                  static_cast<std::ptrdiff_t>(i));
    }
    if (i > 0 && p[i] > p[i - 1] + kTieTol) {
      throw Error(Errc::NonMonotone, "bias increases at index " + std::to_string(i),
                  static_cast<std::ptrdiff_t>(i));
    }
  }
  if (p0 < 0.0 || p0 > 1.0) throw Error(Errc::Domain, "p0 outside [0, 1]");
  return {std::move(p), p0};
}

double cost_value(double x, std::size_t i, const CostModel& cm) {
  if (x < 0.0 || x > 1.0) throw Error(Errc::Domain, "effort outside [0, 1]");
  if (i >= cm.gammas.size()) throw Error(Errc::LengthMismatch, "creator index");
  return cm.gammas[i] * std::pow(x, cm.beta);
}

double cost_grad(double x, std::size_t i, const CostModel& cm) {
  if (x < 0.0 || x > 1.0) throw Error(Errc::Domain, "effort outside [0, 1]");
  if (i >= cm.gammas.size()) throw Error(Errc::LengthMismatch, "creator index");
  return cm.gammas[i] * cm.beta * std::pow(x, cm.beta - 1.0);
}

std::vector<double> GameConfig::effective() const {
  std::vector<double> q = biases.p;
  for (std::size_t i = 0; i < q.size() && i < c.size(); ++i) q[i] += c[i];
  return q;
}

bool GameConfig::symmetric_costs() const {
  if (split) return split->gamma_H == split->gamma_L;
  return std::all_of(cost.gammas.begin(), cost.gammas.end(),
                     [&](double g) { return g == cost.gammas.front(); });
}

GameConfig make_symmetric(std::vector<double> p, double gamma, double beta,
                          std::vector<double> c, double p0) {
  GameConfig cfg;
  cfg.n = static_cast<int>(p.size());
  cfg.cost.beta = beta;
  cfg.cost.gammas.assign(p.size(), gamma);
  cfg.c = c.empty() ? std::vector<double>(p.size(), 0.0) : std::move(c);
  cfg.biases = {std::move(p), p0};
  return cfg;
}

GameConfig make_binary(std::vector<double> p, int n_H, double gamma_H,
                       double gamma_L, double beta, std::vector<double> c,
                       double p0) {
  GameConfig cfg = make_symmetric(std::move(p), gamma_H, beta, std::move(c), p0);
  for (int i = n_H; i < cfg.n; ++i) cfg.cost.gammas[i] = gamma_L;
  cfg.split = TypeSplit{n_H, gamma_H, gamma_L};
  return cfg;
}

void validate_config(const GameConfig& cfg) {
  if (cfg.n < 1) throw Error(Errc::Config, "n must be positive");
  auto n = static_cast<std::size_t>(cfg.n);
  if (cfg.biases.p.size() != n || cfg.cost.gammas.size() != n || cfg.c.size() != n) {
    throw Error(Errc::LengthMismatch, "p, gammas and c must all have length n");
  }
  if (!(cfg.cost.beta > 1.0)) throw Error(Errc::Domain, "beta must exceed 1");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(cfg.cost.gammas[i] > 0.0)) {
      throw Error(Errc::NonPositive, "gamma", static_cast<std::ptrdiff_t>(i));
    }
    if (cfg.c[i] < 0.0) throw Error(Errc::Domain, "negative compensation",
                                    static_cast<std::ptrdiff_t>(i));
    if (i > 0 && cfg.c[i] > cfg.c[i - 1] + kTieTol) {
      throw Error(Errc::NonMonotone, "compensation increases",
                  static_cast<std::ptrdiff_t>(i));
    }
  }
  validate_biases(cfg.biases.p, cfg.biases.p0);
  validate_biases(cfg.effective(), cfg.biases.p0);
  if (cfg.split) {
    const auto& s = *cfg.split;
    if (s.n_H < 1 || s.n_H >= cfg.n) throw Error(Errc::Config, "n_H out of range");
    if (!(s.gamma_H <= s.gamma_L)) throw Error(Errc::Config, "gamma_H must not exceed gamma_L");
  }
}

double expected_rank_bias(std::span<const double> y, std::span<const double> p) {
  if (p.size() != y.size() + 1) {
    throw Error(Errc::LengthMismatch, "expected_rank_bias needs |p| = |y| + 1");
  }
  // d[k] = probability that exactly k opponents sit above.
  double buf[64];
  std::vector<double> heap;
  double* d = buf;
  if (p.size() > 64) {
    heap.resize(p.size());
    d = heap.data();
  }
  d[0] = 1.0;
  std::size_t m = 0;
  for (double yi : y) {
    d[m + 1] = d[m] * (1.0 - yi);
    for (std::size_t k = m; k > 0; --k) d[k] = d[k] * yi + d[k - 1] * (1.0 - yi);
    d[0] *= yi;
    ++m;
  }
  double w = 0.0;
  for (std::size_t k = 0; k <= m; ++k) w += d[k] * p[k];
  return w;
}

double binomial_mixture(double y, std::span<const double> q) {
  // de Casteljau in t = 1 - y with the biases as Bernstein coefficients.
  double buf[64];
  std::vector<double> heap;
  double* b = buf;
  if (q.size() > 64) {
    heap.resize(q.size());
    b = heap.data();
  }
  if (q.empty()) throw Error(Errc::LengthMismatch, "empty bias vector");
  std::copy(q.begin(), q.end(), b);
  const double t = 1.0 - y;
  const std::size_t m = q.size() - 1;
  for (std::size_t r = 1; r <= m; ++r) {
    for (std::size_t k = 0; k + r <= m; ++k) b[k] = y * b[k] + t * b[k + 1];
  }
  return b[0];
}

Argmax argmax_linear_reward_free(double q, double gamma, double beta) {
  if (!(q > 0.0)) throw Error(Errc::NonPositive, "bias must be positive");
  double x = std::pow(q / (gamma * beta), 1.0 / (beta - 1.0));
  return {x, x * q - gamma * std::pow(x, beta)};
}

Argmax argmax_linear_reward(double q, double gamma, double beta) {
  Argmax a = argmax_linear_reward_free(q, gamma, beta);
  if (a.x > 1.0) a = {1.0, q - gamma};
  return a;
}

double largest_root_linear(double q, double gamma, double beta, double u) {
  Argmax top = argmax_linear_reward_free(q, gamma, beta);
  if (u > top.value) {
    if (u - top.value <= 1e-13 * std::max(1.0, std::fabs(u))) return top.x;
    throw Error(Errc::NoBracket, "utility above the attainable maximum");
  }
  auto f = [&](double x) { return x * q - gamma * std::pow(x, beta) - u; };
  double hi = std::max(1.0, 2.0 * top.x);
  while (f(hi) > 0.0) hi *= 2.0;
  return num::bracket_root(f, top.x, hi);
}

MixedStrategy::MixedStrategy(std::vector<double> grid, std::vector<double> cdf,
                             std::vector<Atom> atoms)
    : grid_(std::move(grid)), cdf_(std::move(cdf)), atoms_(std::move(atoms)) {
  if (grid_.empty() || grid_.size() != cdf_.size()) {
    throw Error(Errc::LengthMismatch, "grid and cdf sizes differ");
  }
  for (std::size_t k = 1; k < grid_.size(); ++k) {
    if (!(grid_[k] > grid_[k - 1])) {
      throw Error(Errc::NonMonotone, "grid must increase strictly",
                  static_cast<std::ptrdiff_t>(k));
    }
  }
  node_atom_.assign(grid_.size(), 0.0);
  double total = 0.0;
  for (const Atom& a : atoms_) {
    auto it = std::lower_bound(grid_.begin(), grid_.end(), a.x);
    if (it == grid_.end() || *it != a.x) {
      throw Error(Errc::Domain, "atom is not on a grid node");
    }
    if (!(a.mass > 0.0)) throw Error(Errc::NonPositive, "atom mass");
    node_atom_[it - grid_.begin()] += a.mass;
    total += a.mass;
  }
  if (total > 1.0 + 1e-12) throw Error(Errc::Domain, "atom masses exceed 1");
  for (std::size_t k = 0; k < cdf_.size(); ++k) {
    double v = std::clamp(cdf_[k], 0.0, 1.0);
    if (std::fabs(v - cdf_[k]) > 1e-9) throw Error(Errc::Domain, "cdf outside [0, 1]");
    double left = v - node_atom_[k];
    double prev = k == 0 ? 0.0 : cdf_[k - 1];
    if (left < prev - 1e-9) {
      throw Error(Errc::NonMonotone, "cdf decreases", static_cast<std::ptrdiff_t>(k));
    }
    cdf_[k] = std::max(v, std::min(1.0, prev + node_atom_[k]));
  }
  if (cdf_.front() - node_atom_.front() > 1e-9) {
    throw Error(Errc::Domain, "cdf jumps at the first node without an atom");
  }
  if (std::fabs(cdf_.back() - 1.0) > 1e-6) {
    throw Error(Errc::Domain, "cdf does not reach 1 at the top of the grid");
  }
  cdf_.back() = 1.0;
}

MixedStrategy MixedStrategy::point_mass(double x) {
  return MixedStrategy({x}, {1.0}, {{x, 1.0}});
}

double MixedStrategy::cdf(double x) const {
  if (x < grid_.front()) return 0.0;
  if (x >= grid_.back()) return 1.0;
  auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  std::size_t k1 = it - grid_.begin();
  std::size_t k0 = k1 - 1;
  if (x == grid_[k0]) return cdf_[k0];
  double right = cdf_[k1] - node_atom_[k1];
  double t = (x - grid_[k0]) / (grid_[k1] - grid_[k0]);
  return cdf_[k0] + t * (right - cdf_[k0]);
}

double MixedStrategy::atom_at(double x) const {
  auto it = std::lower_bound(grid_.begin(), grid_.end(), x);
  if (it == grid_.end() || *it != x) return 0.0;
  return node_atom_[it - grid_.begin()];
}

double MixedStrategy::cdf_left(double x) const { return cdf(x) - atom_at(x); }

double MixedStrategy::mean() const {
  double m = grid_.front();
  for (std::size_t k = 0; k + 1 < grid_.size(); ++k) {
    double right = cdf_[k + 1] - node_atom_[k + 1];
    m += (grid_[k + 1] - grid_[k]) * (1.0 - 0.5 * (cdf_[k] + right));
  }
  return m;
}

}  // namespace pbg
