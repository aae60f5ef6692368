#include "pbg/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include "pbg/binary_type.hpp"
#include "pbg/symmetric_eq.hpp"

namespace pbg {

const char* layout_name(CompLayout l) {
  switch (l) {
    case CompLayout::Free: return "Free";
    case CompLayout::FlatHead: return "FlatHead";
    case CompLayout::TwoLevel: return "TwoLevel";
  }
  return "Unknown";
}

namespace {

GameConfig with_pc(const GameConfig& cfg, const std::vector<double>& p,
                   const std::vector<double>& c) {
  GameConfig g = cfg;
  g.n = static_cast<int>(p.size());
  g.biases.p = p;
  g.c = c;
  if (g.cost.gammas.size() != p.size()) {
    if (g.split) {
      g.cost.gammas.assign(p.size(), g.split->gamma_L);
      std::fill_n(g.cost.gammas.begin(), std::min<std::size_t>(g.split->n_H, p.size()),
                  g.split->gamma_H);
    } else if (!g.cost.gammas.empty()) {
      g.cost.gammas.assign(p.size(), g.cost.gammas.front());
    }
  }
  return g;
}

void require_strict(const std::vector<double>& q) {
  for (std::size_t i = 0; i + 1 < q.size(); ++i) {
    if (q[i] - q[i + 1] <= kTieTol) {
      throw Error(Errc::StrictDecreaseRequired, "tied effective biases",
                  static_cast<std::ptrdiff_t>(i + 1));
    }
  }
}

// n * int_0^1 mix(y, w) J(y) dy and int_0^1 J(y) dy for one block of creators
// whose equilibrium utility is u.
struct BlockIntegrals {
  double weighted;
  double mean;
};

BlockIntegrals block_integrals(std::span<const double> q, std::span<const double> w,
                               double u, double gamma, double beta, int intervals) {
  const int N = intervals + (intervals % 2);
  const double h = 1.0 / N;
  double acc_w = 0.0, acc_m = 0.0;
  for (int k = 0; k <= N; ++k) {
    const double y = k * h;
    const double J = J_of(y, q, u, gamma, beta);
    const double wt = (k == 0 || k == N) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc_w += wt * binomial_mixture(y, w) * J;
    acc_m += wt * J;
  }
  const double m = static_cast<double>(q.size());
  return {m * acc_w * h / 3.0, acc_m * h / 3.0};
}

std::vector<double> net_weights(const std::vector<double>& p, const std::vector<double>& c,
                                double alpha) {
  std::vector<double> w(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) w[i] = alpha * p[i] - (i < c.size() ? c[i] : 0.0);
  return w;
}

}  // namespace

WelfareBreakdown profit_breakdown(const std::vector<double>& p, const std::vector<double>& c,
                                  const ProfitParams& params, const GameConfig& cfg) {
  GameConfig g = with_pc(cfg, p, c);
  std::vector<StrategyGroup> groups;
  if (g.split && g.split->gamma_H != g.split->gamma_L) {
    groups = solve_binary(g).groups();
  } else {
    SymmetricEquilibrium eq = solve_symmetric(g);
    groups.push_back({eq.strategy, g.n, eq.gamma});
  }
  return welfare(groups, p, c, g.biases.p0, params);
}

double profit(const std::vector<double>& p, const std::vector<double>& c,
              const ProfitParams& params, const GameConfig& cfg) {
  return profit_breakdown(p, c, params, cfg).profit;
}

double profit_reformulated(const std::vector<double>& p, const std::vector<double>& c,
                           const ProfitParams& params, double gamma, double beta,
                           double p0, int intervals) {
  GameConfig g = make_symmetric(p, gamma, beta, c, p0);
  validate_config(g);
  const std::vector<double> q = g.effective();
  require_strict(q);
  const std::vector<double> w = net_weights(p, c, params.alpha);
  const double u = symmetric_lower_end(q, gamma, beta).value;
  BlockIntegrals b = block_integrals(q, w, u, gamma, beta, intervals);
  return b.weighted + params.alpha * h_of(b.mean, params.h_power) * p0;
}

double profit_separated(const std::vector<double>& p, const std::vector<double>& c,
                        const ProfitParams& params, const GameConfig& cfg, int intervals) {
  GameConfig g = with_pc(cfg, p, c);
  if (!g.split) throw Error(Errc::Config, "separated profit needs a type split");
  UHResult U = compute_uH(g);
  if (U.hint == 2) throw Error(Errc::Degenerate, "equilibrium is not separated");
  const std::vector<double> q = g.effective();
  require_strict(q);
  const std::vector<double> w = net_weights(p, c, params.alpha);
  const std::size_t nH = static_cast<std::size_t>(g.split->n_H);
  const double beta = g.cost.beta;
  std::span<const double> qs(q), ws(w);

  BlockIntegrals H = block_integrals(qs.first(nH), ws.first(nH), U.u_H, g.split->gamma_H,
                                     beta, intervals);
  const double uL = argmax_linear_reward_free(q.back(), g.split->gamma_L, beta).value;
  BlockIntegrals L = block_integrals(qs.subspan(nH), ws.subspan(nH), uL, g.split->gamma_L,
                                     beta, intervals);
  const double n = static_cast<double>(q.size());
  const double mu = (nH * H.mean + (n - nH) * L.mean) / n;
  return H.weighted + L.weighted + params.alpha * h_of(mu, params.h_power) * g.biases.p0;
}

double profit_fast(const std::vector<double>& p, const std::vector<double>& c,
                   const ProfitParams& params, const GameConfig& cfg) {
  if (!cfg.split || cfg.split->gamma_H == cfg.split->gamma_L) {
    const double gamma = cfg.split ? cfg.split->gamma_H : cfg.cost.gammas.front();
    return profit_reformulated(p, c, params, gamma, cfg.cost.beta, cfg.biases.p0);
  }
  try {
    return profit_separated(p, c, params, cfg);
  } catch (const Error& e) {
    if (e.code() != Errc::Degenerate) throw;
  }
  return profit(p, c, params, cfg);
}

Objective make_objective(const ProfitParams& params, const GameConfig& cfg) {
  return [params, cfg](const std::vector<double>& p, const std::vector<double>& c) {
    return profit_fast(p, c, params, cfg);
  };
}

namespace {

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  double level = 0.0;
};

// Raises the level from start in steps until the objective first drops.
// Evaluations that fail to solve count as a drop.
template <class F>
Best scan_up(double start, double step, double cap, F&& f, int& evals) {
  Best best;
  double prev = -std::numeric_limits<double>::infinity();
  for (int k = 0;; ++k) {
    const double level = start + k * step;
    if (level > cap + 1e-12) break;
    double v;
    try {
      v = f(level);
    } catch (const Error&) {
      break;
    }
    ++evals;
    if (v < prev) break;
    if (v > best.value) best = {v, level};
    prev = v;
  }
  return best;
}

double snap(double v) { return std::round(v * 1e12) / 1e12; }

}  // namespace

CompSearchResult grid_search_compensation(const std::vector<double>& p, const GameConfig& cfg,
                                          const Objective& W, const CompSearchOptions& opts) {
  if (!(opts.step > 0.0)) throw Error(Errc::Config, "compensation step must be positive");
  const int n = static_cast<int>(p.size());
  if (n < 2) throw Error(Errc::Config, "compensation search needs two or more ranks");
  CompSearchResult res;
  const bool binary = cfg.split && cfg.split->gamma_H != cfg.split->gamma_L;

  if (!binary) {
    auto layout = [n](double head, double last) {
      std::vector<double> c(n, snap(head));
      c.back() = snap(last);
      return c;
    };
    auto head_scan = [&](double cn) {
      return scan_up(cn, opts.step, opts.max_level,
                     [&](double h) { return W(p, layout(h, cn)); }, res.evaluations);
    };
    Best bh;
    double best_cn = 0.0;
    if (!opts.sweep_cn) {
      bh = head_scan(0.0);
    } else {
      const double cs = opts.cn_step > 0.0 ? opts.cn_step : opts.step;
      Best outer = scan_up(0.0, cs, opts.max_level,
                           [&](double cn) {
                             Best b = head_scan(cn);
                             res.cn_curve.emplace_back(snap(cn), b.value);
                             if (b.value > bh.value) {
                               bh = b;
                               best_cn = cn;
                             }
                             return b.value;
                           },
                           res.evaluations);
      (void)outer;
    }
    res.c = {layout(bh.level, best_cn), CompLayout::FlatHead};
    res.profit = bh.value;
    return res;
  }

  const int nH = cfg.split->n_H;
  auto layout = [n, nH](double cH, double cL) {
    std::vector<double> c(n, snap(cL));
    std::fill_n(c.begin(), nH - 1, snap(cH));
    c.back() = 0.0;
    return c;
  };
  double best_H = 0.0, best_L = 0.0, best_v = -std::numeric_limits<double>::infinity();
  auto consider = [&](double v, double cH, double cL) {
    if (v > best_v || (v == best_v && std::make_pair(cH, cL) < std::make_pair(best_H, best_L))) {
      best_v = v;
      best_H = cH;
      best_L = cL;
    }
  };
  scan_up(0.0, opts.step, opts.max_level,
          [&](double cL) {
            if (nH == 1) {
              double v = W(p, layout(0.0, cL));
              consider(v, 0.0, cL);
              return v;
            }
            Best b = scan_up(cL, opts.step, opts.max_level,
                             [&](double cH) { return W(p, layout(cH, cL)); }, res.evaluations);
            consider(b.value, b.level, cL);
            return b.value;
          },
          res.evaluations);
  res.c = {layout(best_H, best_L), CompLayout::TwoLevel};
  res.profit = best_v;
  return res;
}

CompSearchResult grid_search_compensation(const std::vector<double>& p,
                                          const ProfitParams& params, const GameConfig& cfg,
                                          const CompSearchOptions& opts) {
  return grid_search_compensation(p, cfg, make_objective(params, cfg), opts);
}

std::vector<double> delta_pB_per_rank(const std::vector<double>& pC,
                                      const std::vector<double>& pB,
                                      const std::vector<double>& slots) {
  if (pC.size() != pB.size()) throw Error(Errc::LengthMismatch, "p^C and p^B differ in length");
  if (slots.empty()) throw Error(Errc::Config, "no overview slots");
  const double mean = std::accumulate(slots.begin(), slots.end(), 0.0) / slots.size();
  std::vector<double> d(pC.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = pC[i] + mean - pB[i];
  return d;
}

std::vector<double> delta_pB_uniform(const std::vector<double>& pC,
                                     const std::vector<double>& pB,
                                     const std::vector<double>& slots) {
  if (pC.size() != pB.size()) throw Error(Errc::LengthMismatch, "p^C and p^B differ in length");
  const double total = std::accumulate(pC.begin(), pC.end(), 0.0) +
                       std::accumulate(slots.begin(), slots.end(), 0.0) -
                       std::accumulate(pB.begin(), pB.end(), 0.0);
  return std::vector<double>(pC.size(), total);
}

namespace {

CitationDesign finish_design(const std::vector<double>& pB, const std::vector<double>& d,
                             std::vector<double> q) {
  CitationDesign out;
  out.q = std::move(q);
  out.delta_pB = d;
  out.induced_p = pB;
  for (std::size_t i = 0; i + 1 < pB.size(); ++i) {
    if (out.q[i] > 1.0 + 1e-12) {
      throw Error(Errc::ProbabilityAboveOne, "citation probability above one",
                  static_cast<std::ptrdiff_t>(i));
    }
    out.induced_p[i] += out.q[i] * d[i];
  }
  for (std::size_t i = 0; i + 1 < pB.size(); ++i) {
    if (out.induced_p[i] < out.induced_p[i + 1] - kTieTol) {
      throw Error(Errc::MonotonicityBroken, "induced biases increase",
                  static_cast<std::ptrdiff_t>(i + 1));
    }
  }
  return out;
}

void check_deltas(const std::vector<double>& pB, const std::vector<double>& d) {
  if (pB.size() != d.size()) throw Error(Errc::LengthMismatch, "delta length differs from p^B");
  if (pB.size() < 2) throw Error(Errc::Config, "citation needs two or more ranks");
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    if (!(d[i] > 0.0)) {
      throw Error(Errc::NonPositiveDelta, "bias increment must be positive",
                  static_cast<std::ptrdiff_t>(i));
    }
  }
}

}  // namespace

CitationDesign ubl(const std::vector<double>& pB, const std::vector<double>& delta_pB) {
  check_deltas(pB, delta_pB);
  double inv = 0.0;
  for (std::size_t i = 0; i + 1 < pB.size(); ++i) inv += 1.0 / delta_pB[i];
  const double s = 1.0 / inv;
  std::vector<double> q(pB.size(), 0.0);
  for (std::size_t i = 0; i + 1 < pB.size(); ++i) q[i] = s / delta_pB[i];
  return finish_design(pB, delta_pB, std::move(q));
}

CitationDesign tpbl(const std::vector<double>& pB, const std::vector<double>& delta_pB,
                    int n_H, double ratio) {
  check_deltas(pB, delta_pB);
  const int n = static_cast<int>(pB.size());
  if (n_H < 1 || n_H > n) throw Error(Errc::Config, "n_H out of range");
  if (!(ratio >= 1.0)) throw Error(Errc::Domain, "segment ratio must be at least 1");
  const int seg1 = n_H - 1;
  double inv1 = 0.0, inv2 = 0.0;
  for (int i = 0; i < seg1; ++i) inv1 += 1.0 / delta_pB[i];
  for (int i = seg1; i < n - 1; ++i) inv2 += 1.0 / delta_pB[i];
  double s1, s2;
  if (seg1 == 0) {
    s1 = 0.0;
    s2 = 1.0 / inv2;
  } else if (std::isinf(ratio) || inv2 == 0.0) {
    s1 = 1.0 / inv1;
    s2 = 0.0;
  } else {
    s2 = 1.0 / (ratio * inv1 + inv2);
    s1 = ratio * s2;
  }
  std::vector<double> q(n, 0.0);
  for (int i = 0; i < n - 1; ++i) q[i] = (i < seg1 ? s1 : s2) / delta_pB[i];
  return finish_design(pB, delta_pB, std::move(q));
}

std::vector<std::vector<double>> citation_candidates(const std::vector<double>& pC,
                                                     const std::vector<double>& slots,
                                                     double bias_step) {
  if (!(bias_step > 0.0)) throw Error(Errc::Config, "bias step must be positive");
  const int n = static_cast<int>(pC.size());
  std::vector<std::vector<double>> out;
  if (slots.empty()) {
    out.push_back(std::vector<double>(n, 0.0));
    return out;
  }
  const double total = std::accumulate(slots.begin(), slots.end(), 0.0);
  const double cap = slots.front();
  if (total > n * cap + 1e-12) {
    throw Error(Errc::Infeasible, "slot mass exceeds what the ranks can absorb");
  }
  const int units = static_cast<int>(std::floor(total / bias_step + 1e-9));
  const double rem = total - units * bias_step;
  const int max_u = static_cast<int>(std::floor(cap / bias_step + 1e-9));
  const bool has_rem = rem > 1e-12;

  std::vector<int> u(n, 0);
  auto emit = [&]() {
    for (int j = has_rem ? 0 : -1; j < (has_rem ? n : 0); ++j) {
      std::vector<double> d(n);
      for (int i = 0; i < n; ++i) d[i] = u[i] * bias_step;
      if (j >= 0) {
        if (d[j] + rem > cap + 1e-12) continue;
        d[j] += rem;
      }
      bool ok = true;
      for (int i = 0; i + 1 < n && ok; ++i) ok = pC[i] + d[i] - (pC[i + 1] + d[i + 1]) > kTieTol;
      if (ok) out.push_back(std::move(d));
    }
  };
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == n) {
      if (left == 0) emit();
      return;
    }
    if (left > (n - i) * max_u) return;
    for (int k = 0; k <= std::min(max_u, left); ++k) {
      u[i] = k;
      self(self, i + 1, left - k);
    }
    u[i] = 0;
  };
  rec(rec, 0, units);
  if (out.empty()) throw Error(Errc::Infeasible, "no monotone citation candidate on the grid");
  return out;
}

CitationSearchResult simplified_optimal_citation(const std::vector<double>& pC,
                                                 const std::vector<double>& slots,
                                                 const GameConfig& cfg, const Objective& W,
                                                 const CitationSearchOptions& opts) {
  std::vector<std::vector<double>> cands = citation_candidates(pC, slots, opts.bias_step);
  CitationSearchResult res;
  res.candidates = static_cast<int>(cands.size());
  auto with = [&](const std::vector<double>& d) {
    std::vector<double> p(pC);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += d[i];
    return p;
  };

  std::vector<std::size_t> keep(cands.size());
  std::iota(keep.begin(), keep.end(), 0);
  if (opts.prescreen > 0 && static_cast<std::size_t>(opts.prescreen) < cands.size()) {
    const Objective& S = opts.screen ? opts.screen : W;
    const std::vector<double> zero(pC.size(), 0.0);
    std::vector<double> score(cands.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < cands.size(); ++k) {
      try {
        score[k] = S(with(cands[k]), zero);
      } catch (const Error&) {
      }
    }
    std::stable_sort(keep.begin(), keep.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    keep.resize(opts.prescreen);
    std::sort(keep.begin(), keep.end());
  }

  bool found = false;
  for (std::size_t k : keep) {
    std::vector<double> p = with(cands[k]);
    CompSearchResult r = grid_search_compensation(p, cfg, W, opts.comp);
    if (!std::isfinite(r.profit)) continue;
    if (!found || r.profit > res.best.profit) {
      res.best = std::move(r);
      res.p = std::move(p);
      res.delta = cands[k];
      found = true;
    }
  }
  if (!found) throw Error(Errc::Infeasible, "no citation candidate could be evaluated");
  return res;
}

double approximation_ratio(double W_mech, double W_C, double W_opt) {
  const double den = W_opt - W_C;
  if (std::fabs(den) < 1e-12) throw Error(Errc::Degenerate, "optimal and baseline profit coincide");
  return (W_mech - W_C) / den;
}

double approximation_ratio(const std::vector<double>& p_mech, const std::vector<double>& pC,
                           const std::vector<double>& p_opt, const GameConfig& cfg,
                           const Objective& W, const CompSearchOptions& opts) {
  const double wm = grid_search_compensation(p_mech, cfg, W, opts).profit;
  const double wc = grid_search_compensation(pC, cfg, W, opts).profit;
  const double wo = grid_search_compensation(p_opt, cfg, W, opts).profit;
  return approximation_ratio(wm, wc, wo);
}

bool majorizes(const std::vector<double>& x, const std::vector<double>& y, double tol) {
  if (x.size() != y.size()) return false;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    if (sx < sy - tol) return false;
  }
  return std::fabs(sx - sy) <= tol;
}

std::vector<std::vector<double>> simplex_slice(int k, double c_sum, double step, double cap) {
  if (k < 1 || !(step > 0.0)) throw Error(Errc::Config, "bad simplex slice");
  const int units = static_cast<int>(std::lround(c_sum / step));
  const int max_u = static_cast<int>(std::floor(cap / step + 1e-9));
  std::vector<std::vector<double>> out;
  std::vector<int> u(k, 0);
  auto rec = [&](auto&& self, int i, int left, int bound) -> void {
    if (i == k) {
      if (left == 0) {
        std::vector<double> v(k);
        for (int j = 0; j < k; ++j) v[j] = snap(u[j] * step);
        out.push_back(std::move(v));
      }
      return;
    }
    for (int a = std::min(bound, left); a >= 0; --a) {
      if (a * (k - i) < left) break;
      u[i] = a;
      self(self, i + 1, left - a, a);
    }
  };
  rec(rec, 0, units, max_u);
  return out;
}

MajorizationReport majorization_probe(const std::vector<double>& p, const GameConfig& cfg,
                                      const Objective& W, ProbeGroup group, double c_sum,
                                      const ProbeOptions& opts) {
  const int n = static_cast<int>(p.size());
  const int nH = cfg.split ? cfg.split->n_H : n;
  const int from = group == ProbeGroup::Head ? 0 : nH;
  const int to = group == ProbeGroup::Head ? nH - 1 : n - 1;
  if (to - from < 1) throw Error(Errc::Config, "probed group is empty");

  MajorizationReport rep;
  std::vector<std::vector<double>> vecs;
  std::vector<double> vals;
  for (auto& v : simplex_slice(to - from, c_sum, opts.step)) {
    std::vector<double> c(n, 0.0);
    if (group == ProbeGroup::Tail) std::fill_n(c.begin(), nH, opts.head_level);
    std::copy(v.begin(), v.end(), c.begin() + from);
    try {
      vals.push_back(W(p, c));
      vecs.push_back(std::move(v));
    } catch (const Error&) {
    }
  }
  rep.vectors = static_cast<int>(vecs.size());
  for (std::size_t a = 0; a < vecs.size(); ++a) {
    for (std::size_t b = 0; b < vecs.size(); ++b) {
      if (a == b || !majorizes(vecs[a], vecs[b]) || vecs[a] == vecs[b]) continue;
      ++rep.pairs;
      if (vals[a] > vals[b] + opts.tol) {
        rep.violations.push_back({vecs[a], vecs[b], vals[a], vals[b]});
      }
    }
  }
  return rep;
}

}  // namespace pbg
