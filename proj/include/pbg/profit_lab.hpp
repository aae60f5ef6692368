#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pbg/game_core.hpp"

namespace pbg {

/// A block of creators sharing one strategy and one cost multiplier.
struct StrategyGroup {
  MixedStrategy strategy;
  int count = 1;
  double gamma = 1.0;
};

/// E[x_(1)] >= ... >= E[x_(n)] for the profile described by the groups.
std::vector<double> order_stat_expectations(const std::vector<StrategyGroup>& groups);

struct WelfareBreakdown {
  double page_term = 0.0;
  double overview_term = 0.0;
  double compensation_cost = 0.0;
  double mu = 0.0;
  double profit = 0.0;
};

/// Profit decomposition. p is the raw bias vector (without compensation).
WelfareBreakdown welfare(const std::vector<double>& order_stats,
                         const std::vector<double>& p, const std::vector<double>& c,
                         double p0, const ProfitParams& params);

WelfareBreakdown welfare(const std::vector<StrategyGroup>& groups,
                         const std::vector<double>& p, const std::vector<double>& c,
                         double p0, const ProfitParams& params);

struct SweepSpec {
  std::vector<double> betas;
  std::vector<double> alphas;
  std::vector<double> h_powers;
  std::vector<double> gamma_Ls;
  std::vector<int> n_Hs;
  double gamma_H = 1.0;
  /// Compensation grid step used for W4.
  double step = 0.02;
  /// TPBL segment ratio for W4 in binary cells; 0 selects a line search.
  double ratio = 0.0;
  /// Skip W4 (the mechanism search) when false.
  bool mechanisms = true;
  std::string tables = "paper-tables-v1";
  int jobs = 1;
};

struct SweepRow {
  double beta, alpha, h_power, gamma_L;
  int n_H;
  double W1, W2, W3, W4;
  double r21, r31, r41;
};

/// Ratios tried when SweepSpec::ratio is 0.
std::vector<double> default_tpbl_ratios();

/// Short- and long-term profit comparison over the grid in spec. Rows come
/// back in grid order regardless of the worker count.
std::vector<SweepRow> scenario_sweep(const SweepSpec& spec);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace pbg
