#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pbg/binary_type.hpp"
#include "pbg/data.hpp"
#include "pbg/io.hpp"
#include "pbg/mechanisms.hpp"
#include "pbg/pbm_em.hpp"
#include "pbg/profit_lab.hpp"
#include "pbg/symmetric_eq.hpp"

namespace fs = std::filesystem;
using namespace pbg;

namespace {

struct Flags {
  std::string config;
  std::string input;
  std::string out;
  std::string mechanism = "ubl";
  int jobs = 0;
  int grid = 0;
  std::uint64_t seed = 1;
  double ratio = 0.0;
  double step = 0.0;
};

std::vector<std::string> with_game(std::vector<std::string> extra) {
  std::vector<std::string> keys = kGameKeys;
  keys.insert(keys.end(), extra.begin(), extra.end());
  return keys;
}

void write_text(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  const fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error(Errc::Config, "cannot write " + out);
  f << text;
}

void require_out(const Flags& f) {
  if (f.out.empty()) throw Error(Errc::Config, "--out is required");
}

json support_json(double lo, double hi) { return json::array({lo, hi}); }

void write_symmetric(const GameConfig& cfg, int grid, const fs::path& out) {
  SymmetricOptions opts;
  if (grid > 0) opts.grid_points = grid;
  SymmetricEquilibrium eq = solve_symmetric(cfg, opts);
  json h;
  h["kind"] = "symmetric";
  h["regime"] = regime_name(Regime::Symmetric);
  h["u"] = eq.u;
  h["support"] = support_json(eq.x_lo, eq.x_hi);
  h["config"] = game_to_json(cfg);
  write_equilibrium(out, h, {{eq.strategy, cfg.n, eq.gamma}}, eq.effective_p, eq.beta);
}

int solve_symmetric_cmd(const Flags& f) {
  require_out(f);
  json j = load_json(f.config);
  reject_unknown(j, with_game({"grid"}));
  GameConfig cfg = game_from_json(j);
  if (!cfg.symmetric_costs()) throw Error(Errc::Config, "solve-symmetric needs a single gamma");
  const int grid = f.grid > 0 ? f.grid : j.value("grid", 0);
  write_symmetric(cfg, grid, f.out);
  return 0;
}

int solve_binary_cmd(const Flags& f) {
  require_out(f);
  json j = load_json(f.config);
  reject_unknown(j, with_game({"grid"}));
  GameConfig cfg = game_from_json(j);
  const int grid = f.grid > 0 ? f.grid : j.value("grid", 0);
  if (!cfg.split && cfg.symmetric_costs()) {
    write_symmetric(cfg, grid, f.out);
    return 0;
  }
  if (!cfg.split) {
    PureNEResult r = pure_ne(cfg);
    if (!r.profile) throw Error(Errc::Infeasible, "no pure equilibrium for these costs");
    json h;
    h["kind"] = "pure";
    h["regime"] = regime_name(Regime::PureNE);
    h["utilities"] = r.utilities;
    h["config"] = game_to_json(cfg);
    std::vector<StrategyGroup> groups;
    for (int i = 0; i < cfg.n; ++i) {
      groups.push_back({MixedStrategy::point_mass((*r.profile)[i]), 1, cfg.cost.gammas[i]});
    }
    write_equilibrium(f.out, h, groups, cfg.effective(), cfg.cost.beta);
    return 0;
  }
  if (cfg.split->gamma_H == cfg.split->gamma_L) {
    write_symmetric(make_symmetric(cfg.biases.p, cfg.split->gamma_H, cfg.cost.beta, cfg.c,
                                   cfg.biases.p0),
                    grid, f.out);
    return 0;
  }
  BinaryOptions opts;
  if (grid > 0) opts.grid_points = grid;
  BinaryTypeEquilibrium eq = solve_binary(cfg, opts);
  json h;
  h["kind"] = "binary";
  h["regime"] = regime_name(eq.regime);
  h["hint"] = eq.hint;
  h["u_H"] = eq.u_H;
  h["u_L"] = eq.u_L;
  h["support_H"] = support_json(eq.x_lo_H, eq.x_hi_H);
  h["support_L"] = support_json(eq.x_lo_L, eq.x_hi_L);
  h["x_star"] = eq.x_star ? json(*eq.x_star) : json(nullptr);
  h["x_star2"] = eq.x_star2 ? json(*eq.x_star2) : json(nullptr);
  h["config"] = game_to_json(cfg);
  write_equilibrium(f.out, h, eq.groups(), eq.effective_p, cfg.cost.beta);
  return 0;
}

json comp_json(const CompSearchResult& r) {
  json j;
  j["c"] = r.c.c;
  j["layout"] = layout_name(r.c.layout);
  j["profit"] = r.profit;
  j["evaluations"] = r.evaluations;
  if (!r.cn_curve.empty()) {
    json curve = json::array();
    for (const auto& [cn, w] : r.cn_curve) curve.push_back({cn, w});
    j["cn_curve"] = curve;
  }
  return j;
}

int design_cmd(const Flags& f) {
  require_out(f);
  json j = load_json(f.config);
  reject_unknown(j, with_game({"alpha", "h_power", "delta", "ratio", "step", "bias_step",
                               "sweep_cn", "cn_step", "max_level", "prescreen"}));
  GameConfig cfg = game_from_json(j);
  const BiasTables& t = bundled_tables(j.value("tables", std::string("paper-tables-v1")));
  const ProfitParams params{j.value("alpha", 1.0), j.value("h_power", 1.0)};
  const Objective W = make_objective(params, cfg);

  CompSearchOptions copt;
  copt.step = f.step > 0.0 ? f.step : j.value("step", copt.step);
  copt.sweep_cn = j.value("sweep_cn", false);
  copt.cn_step = j.value("cn_step", 0.0);
  copt.max_level = j.value("max_level", copt.max_level);

  const std::string delta_kind = j.value("delta", std::string("uniform"));
  if (delta_kind != "uniform" && delta_kind != "per_rank") {
    throw Error(Errc::Config, "delta must be uniform or per_rank");
  }
  const std::vector<double> delta = delta_kind == "uniform"
                                        ? delta_pB_uniform(t.type_C, t.type_B, t.slots)
                                        : delta_pB_per_rank(t.type_C, t.type_B, t.slots);
  const double ratio = f.ratio > 0.0 ? f.ratio : j.value("ratio", 1.0);
  const int n_H = cfg.split ? cfg.split->n_H : cfg.n;

  json res;
  res["mechanism"] = f.mechanism;
  auto emit_citation = [&](const CitationDesign& d) {
    res["q"] = d.q;
    res["delta_pB"] = d.delta_pB;
    res["induced_p"] = d.induced_p;
    CompSearchResult r = grid_search_compensation(d.induced_p, cfg, W, copt);
    res["compensation"] = comp_json(r);
    res["profit"] = r.profit;
    return r.profit;
  };

  if (f.mechanism == "ubl") {
    emit_citation(ubl(t.type_B, delta));
  } else if (f.mechanism == "tpbl") {
    res["ratio"] = std::isinf(ratio) ? json("inf") : json(ratio);
    emit_citation(tpbl(t.type_B, delta, n_H, ratio));
  } else if (f.mechanism == "compensation") {
    CompSearchResult r = grid_search_compensation(cfg.biases.p, cfg, W, copt);
    res["induced_p"] = cfg.biases.p;
    res["compensation"] = comp_json(r);
    res["profit"] = r.profit;
  } else if (f.mechanism == "joint") {
    const double W_C = grid_search_compensation(cfg.biases.p, cfg, W, copt).profit;
    double W_mech = 0.0;
    std::vector<double> mech_p;
    if (cfg.split) {
      W_mech = -std::numeric_limits<double>::infinity();
      const std::vector<double> ratios =
          f.ratio > 0.0 || j.contains("ratio") ? std::vector<double>{ratio} : default_tpbl_ratios();
      for (double r : ratios) {
        CitationDesign d = tpbl(t.type_B, delta, n_H, r);
        const double w = grid_search_compensation(d.induced_p, cfg, W, copt).profit;
        if (w > W_mech) {
          W_mech = w;
          mech_p = d.induced_p;
          res["ratio"] = std::isinf(r) ? json("inf") : json(r);
        }
      }
    } else {
      CitationDesign d = ubl(t.type_B, delta);
      W_mech = grid_search_compensation(d.induced_p, cfg, W, copt).profit;
      mech_p = d.induced_p;
    }
    CitationSearchOptions sopt;
    sopt.bias_step = j.value("bias_step", sopt.bias_step);
    sopt.comp = copt;
    sopt.prescreen = j.value("prescreen", 0);
    if (sopt.prescreen > 0 && cfg.split) {
      const double gH = cfg.split->gamma_H, beta = cfg.cost.beta, p0 = cfg.biases.p0;
      sopt.screen = [params, gH, beta, p0](const std::vector<double>& p,
                                           const std::vector<double>& c) {
        return profit_reformulated(p, c, params, gH, beta, p0);
      };
    }
    CitationSearchResult opt = simplified_optimal_citation(cfg.biases.p, t.slots, cfg, W, sopt);
    res["mechanism_p"] = mech_p;
    res["induced_p"] = opt.p;
    res["delta"] = opt.delta;
    res["compensation"] = comp_json(opt.best);
    res["candidates"] = opt.candidates;
    res["W_C"] = W_C;
    res["W_mech"] = W_mech;
    res["W_opt"] = opt.best.profit;
    res["profit"] = opt.best.profit;
    res["rho"] = approximation_ratio(W_mech, W_C, opt.best.profit);
  } else {
    throw Error(Errc::Config, "unknown mechanism '" + f.mechanism + "'");
  }
  write_text(f.out, res.dump(2) + "\n");
  return 0;
}

template <class T>
std::vector<T> range(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(Errc::Config, std::string("missing '") + key + "'");
  std::vector<T> v;
  try {
    v = j.at(key).get<std::vector<T>>();
  } catch (const json::exception& e) {
    throw Error(Errc::Config, std::string("key '") + key + "': " + e.what());
  }
  if (v.empty()) throw Error(Errc::Config, std::string("empty range '") + key + "'");
  return v;
}

int sweep_cmd(const Flags& f) {
  require_out(f);
  json j = load_json(f.config);
  reject_unknown(j, {"betas", "alphas", "h_powers", "gamma_Ls", "n_Hs", "gamma_H", "step",
                     "ratio", "mechanisms", "tables"});
  SweepSpec s;
  s.betas = range<double>(j, "betas");
  s.alphas = range<double>(j, "alphas");
  s.h_powers = range<double>(j, "h_powers");
  s.gamma_Ls = range<double>(j, "gamma_Ls");
  s.n_Hs = range<int>(j, "n_Hs");
  s.gamma_H = j.value("gamma_H", s.gamma_H);
  s.step = f.step > 0.0 ? f.step : j.value("step", s.step);
  s.ratio = f.ratio > 0.0 ? f.ratio : j.value("ratio", s.ratio);
  s.mechanisms = j.value("mechanisms", s.mechanisms);
  s.tables = j.value("tables", s.tables);
  s.jobs = f.jobs > 0 ? f.jobs : std::max(1u, std::thread::hardware_concurrency());
  write_text(f.out, sweep_csv(scenario_sweep(s)));
  return 0;
}

int simulate_cmd(const Flags& f) {
  require_out(f);
  json j = load_json(f.config);
  reject_unknown(j, {"layouts", "attractiveness", "sessions"});
  std::vector<LayoutSpec> layouts;
  for (const json& l : j.at("layouts")) {
    reject_unknown(l, {"interface", "rank_bias", "slot_bias", "body_bias", "has_overview"});
    LayoutSpec s;
    s.iface = parse_interface(l.at("interface").get<std::string>());
    s.rank_bias = l.at("rank_bias").get<std::vector<double>>();
    s.slot_bias = l.value("slot_bias", std::vector<double>{});
    s.body_bias = l.value("body_bias", 0.0);
    s.has_overview = l.value("has_overview", false);
    layouts.push_back(std::move(s));
  }
  SimulationResult sim =
      simulate_clicks(layouts, j.at("attractiveness").get<std::vector<double>>(),
                      j.at("sessions").get<int>(), f.seed);
  std::ostringstream os;
  write_click_csv(os, sim.records);
  write_text(f.out, os.str());
  return 0;
}

int estimate_cmd(const Flags& f) {
  require_out(f);
  std::ifstream in(f.input);
  if (!in) throw Error(Errc::Config, "cannot open " + f.input);
  std::vector<ClickRecord> records = read_click_csv(in);
  EmOptions opts;
  if (!f.config.empty()) {
    json j = load_json(f.config);
    reject_unknown(j, {"max_iter", "tol", "anchor"});
    opts.max_iter = j.value("max_iter", opts.max_iter);
    opts.tol = j.value("tol", opts.tol);
    if (j.contains("anchor")) {
      const json& a = j.at("anchor");
      reject_unknown(a, {"interface", "slot", "rank", "value"});
      opts.anchor = EmAnchor{parse_interface(a.at("interface").get<std::string>()),
                             a.value("slot", false), a.value("rank", 1), a.at("value").get<double>()};
    }
  }
  write_text(f.out, fit_to_json(em_fit(records, opts)).dump(2) + "\n");
  return 0;
}

int verify_cmd(const Flags& f) {
  EquilibriumFiles ef = read_equilibrium(f.input);
  VerifyReport r = verify_equilibrium(ef.groups, ef.effective_p, ef.beta,
                                      f.grid > 0 ? f.grid : 1000);
  json j;
  j["max_gain"] = r.max_gain;
  j["worst_creator"] = r.worst_creator;
  j["worst_effort"] = r.worst_effort;
  write_text(f.out, j.dump(2) + "\n");
  return 0;
}

int exit_code(Errc e) {
  switch (e) {
    case Errc::Config:
    case Errc::LengthMismatch:
    case Errc::NonPositive:
    case Errc::NonMonotone:
    case Errc::Domain:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Position-based creator games: equilibria, mechanisms, sweeps, click models"};
  app.require_subcommand(1);
  Flags f;

  auto add_config = [&](CLI::App* sc) { sc->add_option("--config", f.config)->required(); };
  auto add_out = [&](CLI::App* sc) { sc->add_option("--out", f.out); };

  CLI::App* sym = app.add_subcommand("solve-symmetric", "Symmetric mixed equilibrium");
  add_config(sym);
  add_out(sym);
  sym->add_option("--grid", f.grid, "CDF grid points");

  CLI::App* bin = app.add_subcommand("solve-binary", "Binary-type or pure equilibrium");
  add_config(bin);
  add_out(bin);
  bin->add_option("--grid", f.grid, "CDF grid points");

  CLI::App* des = app.add_subcommand("design", "Citation and compensation mechanisms");
  add_config(des);
  add_out(des);
  des->add_option("--mechanism", f.mechanism)
      ->check(CLI::IsMember({"ubl", "tpbl", "compensation", "joint"}));
  des->add_option("--ratio", f.ratio, "TPBL segment ratio; inf allowed");
  des->add_option("--step", f.step, "Compensation grid step");

  CLI::App* swp = app.add_subcommand("sweep", "W1-W4 scenario sweep");
  add_config(swp);
  add_out(swp);
  swp->add_option("--jobs", f.jobs);
  swp->add_option("--ratio", f.ratio);
  swp->add_option("--step", f.step);

  CLI::App* sim = app.add_subcommand("simulate-clicks", "Synthetic position-based click log");
  add_config(sim);
  add_out(sim);
  sim->add_option("--seed", f.seed);

  CLI::App* est = app.add_subcommand("estimate-pbm", "EM fit of position biases");
  est->add_option("logs", f.input)->required();
  est->add_option("--config", f.config);
  add_out(est);

  CLI::App* ver = app.add_subcommand("verify", "Best-response check of equilibrium files");
  ver->add_option("equilibrium", f.input)->required();
  ver->add_option("--grid", f.grid);
  add_out(ver);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sym->parsed()) return solve_symmetric_cmd(f);
    if (bin->parsed()) return solve_binary_cmd(f);
    if (des->parsed()) return design_cmd(f);
    if (swp->parsed()) return sweep_cmd(f);
    if (sim->parsed()) return simulate_cmd(f);
    if (est->parsed()) return estimate_cmd(f);
    if (ver->parsed()) return verify_cmd(f);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
