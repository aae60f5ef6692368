#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pbg/game_core.hpp"
#include "pbg/profit_lab.hpp"

namespace pbg {

enum class Regime {
  Symmetric,
  PureNE,
  SeparatedStrict,
  SeparatedTouching,
  HybridCase1,
  HybridCase2,
};

const char* regime_name(Regime r);

struct BinaryOptions {
  int grid_points = 2001;
  /// Points in the coarse scan of the type-L deviation utility.
  int scan_points = 400;
  double eps = 1e-10;
  double mono_slack = 1e-9;
  double residual_tol = 1e-6;
  /// Called with a fraction in [0, 1] during long solves.
  std::function<void(double)> progress;
};

struct PseudoStrategy {
  double u = 0.0;
  MixedStrategy strategy;
  double x_lo = 0.0;
  double x_hi = 0.0;
  int n_H = 0;
  double gamma_H = 1.0;
  std::vector<double> head_biases;
};

struct DeviationL {
  double value;
  double x;
  double x_lo;
  double x_hi;
};

struct UHResult {
  double u_H;
  int hint;
  double x_m;
};

struct BinaryTypeEquilibrium {
  double u_H = 0.0;
  double u_L = 0.0;
  MixedStrategy F_H;
  MixedStrategy F_L;
  Regime regime = Regime::SeparatedStrict;
  int hint = 0;
  double x_lo_H = 0.0;
  double x_lo_L = 0.0;
  double x_hi_H = 0.0;
  double x_hi_L = 0.0;
  std::optional<double> x_star;
  std::optional<double> x_star2;
  int n_H = 0;
  int n_L = 0;
  double gamma_H = 1.0;
  double gamma_L = 1.0;
  std::vector<double> effective_p;

  std::vector<StrategyGroup> groups() const;
};

/// Utility-u strategy of type H against its own kind only, on the first n_H
/// effective biases.
PseudoStrategy pseudo_strategy(double u, const GameConfig& cfg,
                               const BinaryOptions& opts = {});

/// Best type-L deviation against the type-H pseudo strategy at utility u.
DeviationL best_deviation_L(double u, const GameConfig& cfg,
                            const BinaryOptions& opts = {});

/// Bisection for the type-H equilibrium utility. hint 0 and 1 mark separated
/// supports (strict, touching), 2 marks an overlap.
UHResult compute_uH(const GameConfig& cfg, const BinaryOptions& opts = {});

/// Same search started from an arbitrary utility bracket.
UHResult compute_uH_bracket(const GameConfig& cfg, double u_lo, double u_hi,
                            const BinaryOptions& opts = {});

BinaryTypeEquilibrium solve_binary(const GameConfig& cfg, const BinaryOptions& opts = {});

struct PureNEResult {
  std::optional<std::vector<double>> profile;
  std::vector<double> candidate;
  std::vector<double> utilities;
  bool sufficient_ok = false;
  bool elasticity_uniqueness_ok = false;
  double max_gain = 0.0;
};

/// Pure equilibrium for strictly increasing cost multipliers.
PureNEResult pure_ne(const GameConfig& cfg);

struct VerifyReport {
  double max_gain = 0.0;
  int worst_creator = -1;
  double worst_effort = 0.0;
};

/// Grid best-response check of a profile given by strategy groups. q are the
/// effective biases; creators are numbered group by group.
VerifyReport verify_equilibrium(const std::vector<StrategyGroup>& groups,
                                const std::vector<double>& q, double beta,
                                int grid_size = 1000);

/// Expected utility of a creator of group g deviating to effort x.
double deviation_utility(const std::vector<StrategyGroup>& groups, std::size_t g,
                         double x, const std::vector<double>& q, double beta);

struct QuasiconvexityReport {
  std::vector<double> x;
  std::vector<double> value;
  double u_H = 0.0;
  bool verdict = true;
};

QuasiconvexityReport diagnostics_quasiconvexity(const GameConfig& cfg, int points = 500,
                                                const BinaryOptions& opts = {});

struct JacobianReport {
  std::vector<double> x;
  std::vector<double> k;
  double threshold = 0.0;
  bool invertible = true;
};

/// k(x) = b^2 / (ac) over [x_from, x_to] for a solved binary equilibrium.
JacobianReport diagnostics_jacobian_k(const BinaryTypeEquilibrium& eq, double x_from,
                                      double x_to, int points = 200);

}  // namespace pbg
