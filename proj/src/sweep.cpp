#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "pbg/binary_type.hpp"
#include "pbg/data.hpp"
#include "pbg/mechanisms.hpp"
#include "pbg/profit_lab.hpp"
#include "pbg/symmetric_eq.hpp"

namespace pbg {

std::vector<double> default_tpbl_ratios() { return {1.0, 1.5, 2.0, 3.0, 5.0, kRatioInf}; }

namespace {

struct Cell {
  double beta, alpha, h_power, gamma_L;
  int n_H;
};

GameConfig cell_game(const std::vector<double>& p, const Cell& cell, double gamma_H,
                     double p0) {
  const int n = static_cast<int>(p.size());
  if (cell.n_H >= n || cell.gamma_L == gamma_H) {
    return make_symmetric(p, gamma_H, cell.beta, {}, p0);
  }
  return make_binary(p, cell.n_H, gamma_H, cell.gamma_L, cell.beta, {}, p0);
}

std::vector<StrategyGroup> equilibrium_groups(const GameConfig& cfg) {
  if (cfg.split && cfg.split->gamma_H != cfg.split->gamma_L) return solve_binary(cfg).groups();
  SymmetricEquilibrium eq = solve_symmetric(cfg);
  return {{eq.strategy, cfg.n, eq.gamma}};
}

SweepRow run_cell(const Cell& cell, const SweepSpec& spec, const BiasTables& t) {
  SweepRow row{cell.beta, cell.alpha, cell.h_power, cell.gamma_L, cell.n_H,
               0, 0, 0, 0, 0, 0, 0};
  const std::vector<double> zero(t.type_A.size(), 0.0);
  const std::vector<double> base = even_citation_baseline(t);
  const ProfitParams plain{1.0, cell.h_power};

  GameConfig gA = cell_game(t.type_A, cell, spec.gamma_H, 0.0);
  std::vector<StrategyGroup> old_groups = equilibrium_groups(gA);
  row.W1 = welfare(old_groups, t.type_A, zero, 0.0, plain).profit;
  row.W2 = welfare(old_groups, base, zero, t.p0, plain).profit;

  GameConfig gBase = cell_game(base, cell, spec.gamma_H, t.p0);
  row.W3 = welfare(equilibrium_groups(gBase), base, zero, t.p0, plain).profit;

  row.r21 = row.W2 / row.W1;
  row.r31 = row.W3 / row.W1;
  if (!spec.mechanisms) {
    row.W4 = row.r41 = std::numeric_limits<double>::quiet_NaN();
    return row;
  }

  const ProfitParams params{cell.alpha, cell.h_power};
  const Objective W = make_objective(params, gBase);
  CompSearchOptions copt;
  copt.step = spec.step;
  // The even-citation baseline with no payments is always available.
  double best = grid_search_compensation(base, gBase, W, copt).profit;
  const std::vector<double> delta = delta_pB_uniform(t.type_C, t.type_B, t.slots);
  const bool binary = gBase.split.has_value();
  std::vector<double> ratios = spec.ratio > 0.0 ? std::vector<double>{spec.ratio}
                                                : default_tpbl_ratios();
  if (!binary) ratios = {1.0};
  for (double r : ratios) {
    try {
      CitationDesign d = binary ? tpbl(t.type_B, delta, cell.n_H, r) : ubl(t.type_B, delta);
      best = std::max(best, grid_search_compensation(d.induced_p, gBase, W, copt).profit);
    } catch (const Error&) {
    }
  }
  row.W4 = best;
  row.r41 = row.W4 / (cell.alpha * row.W1);
  return row;
}

}  // namespace

std::vector<SweepRow> scenario_sweep(const SweepSpec& spec) {
  const BiasTables& t = bundled_tables(spec.tables);
  std::vector<Cell> cells;
  for (double b : spec.betas)
    for (double a : spec.alphas)
      for (double h : spec.h_powers)
        for (double gL : spec.gamma_Ls)
          for (int nH : spec.n_Hs) cells.push_back({b, a, h, gL, nH});
  if (cells.empty()) throw Error(Errc::Config, "sweep grid is empty");

  std::vector<SweepRow> rows(cells.size());
  std::vector<std::exception_ptr> errs(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      try {
        rows[k] = run_cell(cells[k], spec, t);
      } catch (...) {
        errs[k] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "beta,alpha,h_power,gamma_L,n_H,W1,W2,W3,W4,r21,r31,r41\n";
  for (const auto& r : rows) {
    os << r.beta << ',' << r.alpha << ',' << r.h_power << ',' << r.gamma_L << ',' << r.n_H
       << ',' << r.W1 << ',' << r.W2 << ',' << r.W3 << ',' << r.W4 << ',' << r.r21 << ','
       << r.r31 << ',' << r.r41 << '\n';
  }
  return os.str();
}

}  // namespace pbg
