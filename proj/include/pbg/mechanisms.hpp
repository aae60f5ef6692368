#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "pbg/game_core.hpp"
#include "pbg/profit_lab.hpp"

namespace pbg {

struct CitationDesign {
  std::vector<double> q;
  std::vector<double> delta_pB;
  std::vector<double> induced_p;
};

enum class CompLayout { Free, FlatHead, TwoLevel };

const char* layout_name(CompLayout l);

struct CompensationVector {
  std::vector<double> c;
  CompLayout layout = CompLayout::Free;
};

/// Objective used by the searches below: W(p, c) for a fixed game context.
using Objective = std::function<double(const std::vector<double>& p,
                                       const std::vector<double>& c)>;

/// Full profit through the equilibrium solver and order statistics. cfg
/// supplies n, costs, type split and p0; its own p and c are ignored.
WelfareBreakdown profit_breakdown(const std::vector<double>& p, const std::vector<double>& c,
                                  const ProfitParams& params, const GameConfig& cfg);

double profit(const std::vector<double>& p, const std::vector<double>& c,
              const ProfitParams& params, const GameConfig& cfg);

/// Quantile form of the symmetric profit, composite Simpson on [0, 1].
double profit_reformulated(const std::vector<double>& p, const std::vector<double>& c,
                           const ProfitParams& params, double gamma, double beta,
                           double p0, int intervals = 512);

/// Sum of the two per-type quantile integrals. Throws Degenerate when the
/// binary equilibrium is not separated.
double profit_separated(const std::vector<double>& p, const std::vector<double>& c,
                        const ProfitParams& params, const GameConfig& cfg,
                        int intervals = 512);

/// Quantile form where it applies, the full solver otherwise.
double profit_fast(const std::vector<double>& p, const std::vector<double>& c,
                   const ProfitParams& params, const GameConfig& cfg);

Objective make_objective(const ProfitParams& params, const GameConfig& cfg);

struct CompSearchOptions {
  double step = 0.02;
  /// Also scan the last-rank payment c_n (symmetric layout only).
  bool sweep_cn = false;
  double cn_step = 0.0;  // 0: same as step
  /// Hard cap on any single payment level.
  double max_level = 10.0;
};

struct CompSearchResult {
  CompensationVector c;
  double profit = 0.0;
  int evaluations = 0;
  /// (c_n, best profit over the head) for every sampled c_n.
  std::vector<std::pair<double, double>> cn_curve;
};

/// Algorithm 1 style scan. Symmetric games use (c*, ..., c*, c_n); binary games
/// use (c_H x (n_H - 1), c_L x n_L, 0) with c_H >= c_L. Each level increases
/// until the objective first decreases.
CompSearchResult grid_search_compensation(const std::vector<double>& p,
                                          const GameConfig& cfg, const Objective& W,
                                          const CompSearchOptions& opts = {});

CompSearchResult grid_search_compensation(const std::vector<double>& p,
                                          const ProfitParams& params, const GameConfig& cfg,
                                          const CompSearchOptions& opts = {});

/// Delta p_i^B = p_i^C + mean(slots) - p_i^B per rank.
std::vector<double> delta_pB_per_rank(const std::vector<double>& pC,
                                      const std::vector<double>& pB,
                                      const std::vector<double>& slots);

/// Every rank gets the aggregate gain sum(p^C) + sum(slots) - sum(p^B).
std::vector<double> delta_pB_uniform(const std::vector<double>& pC,
                                     const std::vector<double>& pB,
                                     const std::vector<double>& slots);

CitationDesign ubl(const std::vector<double>& pB, const std::vector<double>& delta_pB);

inline constexpr double kRatioInf = std::numeric_limits<double>::infinity();

/// Two constant segments: ranks [1, n_H) and [n_H, n). ratio = s1 / s2.
CitationDesign tpbl(const std::vector<double>& pB, const std::vector<double>& delta_pB,
                    int n_H, double ratio);

struct CitationSearchOptions {
  double bias_step = 0.1;
  CompSearchOptions comp;
  /// Keep only this many candidates, ranked by W(p, 0), for the full inner
  /// compensation search. 0 keeps all.
  int prescreen = 0;
  /// Cheaper objective for the prescreen; defaults to the main objective.
  Objective screen;
};

struct CitationSearchResult {
  std::vector<double> p;
  std::vector<double> delta;
  CompSearchResult best;
  int candidates = 0;
};

/// Increments on a grid of bias_step in [0, q_1], summing to sum(slots), the
/// off-grid remainder placed on one rank; keeps p strictly decreasing.
std::vector<std::vector<double>> citation_candidates(const std::vector<double>& pC,
                                                     const std::vector<double>& slots,
                                                     double bias_step = 0.1);

CitationSearchResult simplified_optimal_citation(const std::vector<double>& pC,
                                                 const std::vector<double>& slots,
                                                 const GameConfig& cfg, const Objective& W,
                                                 const CitationSearchOptions& opts = {});

/// (W_mech - W_C) / (W_opt - W_C).
double approximation_ratio(double W_mech, double W_C, double W_opt);

double approximation_ratio(const std::vector<double>& p_mech, const std::vector<double>& pC,
                           const std::vector<double>& p_opt, const GameConfig& cfg,
                           const Objective& W, const CompSearchOptions& opts = {});

enum class ProbeGroup { Head, Tail };

struct MajorizationViolation {
  std::vector<double> x;  // majorizes y
  std::vector<double> y;
  double W_x;
  double W_y;
};

struct MajorizationReport {
  int vectors = 0;
  int pairs = 0;
  std::vector<MajorizationViolation> violations;
  bool holds() const { return violations.empty(); }
};

/// x majorizes y (both sorted non-increasing, equal sums).
bool majorizes(const std::vector<double>& x, const std::vector<double>& y, double tol = 1e-12);

/// Non-increasing vectors of length k on the grid of step with sum c_sum and
/// entries at most cap.
std::vector<std::vector<double>> simplex_slice(int k, double c_sum, double step,
                                               double cap = 1.0);

struct ProbeOptions {
  double step = 0.05;
  double tol = 1e-6;
  /// Payment on ranks 1..n_H while the tail group is probed.
  double head_level = 0.0;
};

/// Checks W(x) <= W(y) + tol for every pair where x majorizes y. Head varies
/// ranks 1..n_H-1 with the rest at 0; Tail varies ranks n_H+1..n-1. Vectors
/// whose induced game fails to solve are skipped.
MajorizationReport majorization_probe(const std::vector<double>& p, const GameConfig& cfg,
                                      const Objective& W, ProbeGroup group, double c_sum,
                                      const ProbeOptions& opts = {});

}  // namespace pbg
