#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pbg/errors.hpp"

namespace pbg {

/// Tolerance used when comparing adjacent biases for ties.
inline constexpr double kTieTol = 1e-12;

struct PositionBiases {
  std::vector<double> p;
  double p0 = 0.0;
};

/// Accepts a positive, non-increasing vector (ties allowed up to kTieTol).
/// Throws NonPositive or NonMonotone with the first offending index.
PositionBiases validate_biases(std::vector<double> p, double p0 = 0.0);

struct CostModel {
  double beta = 2.0;
  std::vector<double> gammas;
};

double cost_value(double x, std::size_t i, const CostModel& cm);
double cost_grad(double x, std::size_t i, const CostModel& cm);

/// Binary-type view: creators [0, n_H) are type H, the rest type L.
struct TypeSplit {
  int n_H = 0;
  double gamma_H = 1.0;
  double gamma_L = 1.0;
};

struct GameConfig {
  int n = 0;
  PositionBiases biases;
  CostModel cost;
  std::vector<double> c;
  std::optional<TypeSplit> split;

  /// p + c, the bias vector every equilibrium computation uses.
  std::vector<double> effective() const;
  bool symmetric_costs() const;
};

GameConfig make_symmetric(std::vector<double> p, double gamma, double beta,
                          std::vector<double> c = {}, double p0 = 0.0);
GameConfig make_binary(std::vector<double> p, int n_H, double gamma_H,
                       double gamma_L, double beta, std::vector<double> c = {},
                       double p0 = 0.0);

/// Checks sizes, cost parameters, compensation ordering and the effective
/// bias vector. Throws on the first violated invariant.
void validate_config(const GameConfig& cfg);

struct ProfitParams {
  double alpha = 1.0;
  double h_power = 1.0;
};

/// Expected bias of a creator facing opponents who sit below it with the
/// given probabilities. p has one more entry than y.
double expected_rank_bias(std::span<const double> y, std::span<const double> p);

/// Sum_i C(m, i) y^(m-i) (1-y)^i q_i with m = q.size() - 1: the expected bias
/// when every opponent plays the same CDF value y.
double binomial_mixture(double y, std::span<const double> q);

struct Argmax {
  double x;
  double value;
};

/// Maximizes x*q - gamma*x^beta over x in [0, 1].
Argmax argmax_linear_reward(double q, double gamma, double beta);

/// Unconstrained version of the above; efforts above 1 are allowed when
/// effective biases exceed 1.
Argmax argmax_linear_reward_free(double q, double gamma, double beta);

/// Largest root of x*q - gamma*x^beta = u (u below the maximum value).
double largest_root_linear(double q, double gamma, double beta, double u);

/// A CDF on a non-uniform grid with point masses at grid nodes. Between
/// nodes the CDF is linear from F(g_k) to F(g_{k+1}-).
class MixedStrategy {
 public:
  struct Atom {
    double x;
    double mass;
  };

  MixedStrategy() = default;
  MixedStrategy(std::vector<double> grid, std::vector<double> cdf,
                std::vector<Atom> atoms = {});

  static MixedStrategy point_mass(double x);

  double cdf(double x) const;
  double cdf_left(double x) const;
  double atom_at(double x) const;
  double lo() const { return grid_.front(); }
  double hi() const { return grid_.back(); }
  double mean() const;

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& cdf_values() const { return cdf_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

 private:
  std::vector<double> grid_;
  std::vector<double> cdf_;
  std::vector<double> node_atom_;
  std::vector<Atom> atoms_;
};

inline double h_of(double mu, double h_power) {
  return mu <= 0.0 ? 0.0 : std::pow(mu, h_power);
}

}  // namespace pbg
