#pragma once

#include <span>
#include <vector>

#include "pbg/game_core.hpp"

namespace pbg {

struct SymmetricEquilibrium {
  double u = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  MixedStrategy strategy;
  double gamma = 1.0;
  double beta = 2.0;
  std::vector<double> effective_p;
};

struct SymmetricOptions {
  int grid_points = 2001;
  /// First grid cell as a fraction of the support length.
  double first_cell = 1e-5;
  /// Reject equilibria whose support leaves [0, 1].
  bool check_max_effort = false;
  /// Seed each CDF root find with the previous node's value.
  bool warm_start = true;
};

/// (u + gamma x^beta) / x.
double K_of(double x, double u, double gamma, double beta);

/// Effort whose K value equals the binomial mixture of q at quantile y.
double J_of(double y, std::span<const double> q, double u, double gamma,
            double beta);

/// Lowest support point and utility of the symmetric game on q.
Argmax symmetric_lower_end(std::span<const double> q, double gamma, double beta);

/// Grid on [lo, hi] whose cells grow geometrically away from lo.
std::vector<double> clustered_grid(double lo, double hi, int points,
                                   double first_cell);

/// CDF value y in [0, 1] with binomial_mixture(y, q) = K(x); clamps outside
/// the attainable range. y_lo narrows the search from below.
double level_cdf(double x, std::span<const double> q, double u, double gamma,
                 double beta, double y_lo = 0.0);

struct CdfSegment {
  std::vector<double> x;
  std::vector<double> F;
};

/// Level CDF values on a clustered grid of [x_lo, x_hi], endpoints untouched.
CdfSegment level_segment(std::span<const double> q, double u, double gamma,
                         double beta, double x_lo, double x_hi,
                         const SymmetricOptions& opts = {});

/// Strategy that keeps |q| - 1 identical opponents indifferent at utility u
/// on [x_lo, x_hi].
MixedStrategy level_strategy(std::span<const double> q, double u, double gamma,
                             double beta, double x_lo, double x_hi,
                             const SymmetricOptions& opts = {});

SymmetricEquilibrium solve_symmetric(const GameConfig& cfg,
                                     const SymmetricOptions& opts = {});

/// Analytic two-creator equilibrium, used as an oracle.
SymmetricEquilibrium closed_form_two_player(const GameConfig& cfg,
                                            const SymmetricOptions& opts = {});

}  // namespace pbg
