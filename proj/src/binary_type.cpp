#include "pbg/binary_type.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "pbg/numeric.hpp"
#include "pbg/symmetric_eq.hpp"

namespace pbg {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Symmetric: return "Symmetric";
    case Regime::PureNE: return "PureNE";
    case Regime::SeparatedStrict: return "SeparatedStrict";
    case Regime::SeparatedTouching: return "SeparatedTouching";
    case Regime::HybridCase1: return "HybridCase1";
    case Regime::HybridCase2: return "HybridCase2";
  }
  return "Unknown";
}

std::vector<StrategyGroup> BinaryTypeEquilibrium::groups() const {
  return {{F_H, n_H, gamma_H}, {F_L, n_L, gamma_L}};
}

namespace {

struct Game {
  std::vector<double> q;
  int nH = 0, nL = 0, n = 0;
  double gH = 1, gL = 1, beta = 2;
  double xlo_L = 0, uL = 0;
  double xstarH = 0, ubarH = 0;

  std::span<const double> head() const { return {q.data(), static_cast<std::size_t>(nH)}; }
  std::span<const double> head_plus() const {
    return {q.data(), static_cast<std::size_t>(nH + 1)};
  }
  std::span<const double> tail() const {
    return {q.data() + nH, static_cast<std::size_t>(nL)};
  }
  double g(double x) const { return std::pow(x, beta); }

  // Expected bias against hO type-H opponents at CDF value a and lO type-L
  // opponents at b.
  double W(int hO, double a, int lO, double b) const {
    std::array<double, 64> y{};
    int m = 0;
    for (int i = 0; i < hO; ++i) y[m++] = a;
    for (int i = 0; i < lO; ++i) y[m++] = b;
    return expected_rank_bias(std::span<const double>(y.data(), m),
                              std::span<const double>(q.data(), m + 1));
  }
  double Wh(double x, double a, double b) const { return x * W(nH - 1, a, nL, b) - gH * g(x); }
  double Wl(double x, double a, double b) const { return x * W(nH, a, nL - 1, b) - gL * g(x); }
};

Game make_game(const GameConfig& cfg) {
  validate_config(cfg);
  if (!cfg.split) throw Error(Errc::Config, "binary solver needs a type split");
  if (cfg.n > 63) throw Error(Errc::Config, "at most 63 creators supported");
  Game G;
  G.q = cfg.effective();
  G.n = cfg.n;
  G.nH = cfg.split->n_H;
  G.nL = cfg.n - G.nH;
  G.gH = cfg.split->gamma_H;
  G.gL = cfg.split->gamma_L;
  G.beta = cfg.cost.beta;
  Argmax l = argmax_linear_reward_free(G.q.back(), G.gL, G.beta);
  G.xlo_L = l.x;
  G.uL = l.value;
  Argmax h = argmax_linear_reward_free(G.q[G.nH - 1], G.gH, G.beta);
  G.xstarH = h.x;
  G.ubarH = h.value;
  return G;
}

std::pair<double, double> pseudo_support(const Game& G, double u) {
  double lo = u >= G.ubarH ? G.xstarH : largest_root_linear(G.q[G.nH - 1], G.gH, G.beta, u);
  double hi = largest_root_linear(G.q[0], G.gH, G.beta, u);
  return {lo, std::max(lo, hi)};
}

double pseudo_cdf(const Game& G, double u, double x, double lo, double hi,
                  double ylo = 0.0) {
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  return level_cdf(x, G.head(), u, G.gH, G.beta, ylo);
}

double uLu(const Game& G, double x, double F) {
  return x * binomial_mixture(F, G.head_plus()) - G.gL * G.g(x);
}

DeviationL best_dev(const Game& G, double u, int scan) {
  auto [lo, hi] = pseudo_support(G, u);
  if (hi - lo <= 0.0) return {uLu(G, lo, 0.0), lo, lo, hi};
  const int N = std::max(scan, 3);
  double best = -1e300, bx = lo, prev = 0.0;
  int bk = 0;
  for (int k = 0; k < N; ++k) {
    double x = lo + (hi - lo) * k / (N - 1);
    double F = pseudo_cdf(G, u, x, lo, hi, prev);
    prev = F;
    double v = uLu(G, x, F);
    if (v > best) {
      best = v;
      bx = x;
      bk = k;
    }
  }
  double a = lo + (hi - lo) * std::max(bk - 1, 0) / (N - 1);
  double b = lo + (hi - lo) * std::min(bk + 1, N - 1) / (N - 1);
  auto f = [&](double x) { return uLu(G, x, pseudo_cdf(G, u, x, lo, hi)); };
  num::Max1d m = num::maximize(f, a, b);
  if (m.value > best) {
    best = m.value;
    bx = m.x;
  }
  return {best, bx, lo, hi};
}

UHResult bisect_uH(const Game& G, double lo, double hi, const BinaryOptions& opts) {
  double u = 0.5 * (lo + hi);
  DeviationL d{};
  for (int it = 0; it < 200; ++it) {
    u = 0.5 * (lo + hi);
    d = best_dev(G, u, opts.scan_points);
    if (std::fabs(d.value - G.uL) <= opts.eps) {
      int hint = std::fabs(d.x - d.x_lo) < 1e-6 ? 1 : 2;
      return {u, hint, d.x};
    }
    (d.value < G.uL ? lo : hi) = u;
    if (hi - lo <= 1e-16 * std::max(1.0, std::fabs(u))) break;
  }
  throw Error(Errc::NonConvergence, "type-H utility bisection did not converge");
}

UHResult uH_single(const Game& G) {
  Argmax h = argmax_linear_reward_free(G.q[0], G.gH, G.beta);
  double uLuH = h.x * G.q[0] - G.gL * G.g(h.x);
  double xbarL = G.nL >= 2 ? largest_root_linear(G.q[1], G.gL, G.beta, G.uL) : G.xlo_L;
  if (xbarL <= h.x && uLuH <= G.uL) return {h.value, 0, h.x};
  double top = largest_root_linear(G.q[0], G.gL, G.beta, G.uL);
  return {top * G.q[0] - G.gH * G.g(top), 2, top};
}

// Pieces of a hybrid construction before assembly.
struct Track {
  std::vector<double> x, a, b;
  void push(double xv, double av, double bv) {
    if (!x.empty() && xv <= x.back()) {
      a.back() = av;
      b.back() = bv;
      return;
    }
    x.push_back(xv);
    a.push_back(av);
    b.push_back(bv);
  }
};

class Hybrid {
 public:
  Hybrid(const Game& G, double uH, const BinaryOptions& o) : G_(G), uH_(uH), o_(o) {
    top_ = G.nH >= 2 ? largest_root_linear(G.q[0], G.gH, G.beta, uH)
                     : largest_root_linear(G.q[0], G.gL, G.beta, G.uL);
  }

  std::optional<BinaryTypeEquilibrium> case2(std::string& why) {
    if (G_.nH < 2 || G_.nL < 2) {
      why = "case 2 needs two creators of each type";
      return std::nullopt;
    }
    const double xbarLs = largest_root_linear(G_.q[G_.nH], G_.gL, G_.beta, G_.uL);
    auto FLs = [&](double x) { return level_cdf(x, G_.tail(), G_.uL, G_.gL, G_.beta); };
    auto gap = [&](double x) { return G_.Wh(x, 0.0, FLs(x)) - uH_; };
    const double a = G_.xlo_L * (1.0 + 1e-9);
    const double ga = gap(a), gb = gap(xbarLs);
    if (!(ga < 0.0 && gb >= 0.0)) {
      why = "no type-H entry point on the type-L segment";
      return std::nullopt;
    }
    const double xloH = num::bracket_root(gap, a, xbarLs, ga, gb);
    const double FLf = FLs(xloH);
    CdfSegment FL_low = level_segment(G_.tail(), G_.uL, G_.gL, G_.beta, G_.xlo_L, xloH,
                                      seg_opts());
    FL_low.F.front() = 0.0;
    return finish(Regime::HybridCase2, xloH, FLf, 0.0, FL_low, std::nullopt, why);
  }

  std::optional<BinaryTypeEquilibrium> case1(std::string& why) {
    auto w = [&](double l) { return G_.W(G_.nH - 1, 0.0, G_.nL, l); };
    auto vmax = [&](double l) { return argmax_linear_reward_free(w(l), G_.gH, G_.beta).value - uH_; };
    const double v0 = vmax(0.0), v1 = vmax(1.0);
    if (v0 > 1e-12 || v1 < 0.0) {
      why = "no level of the type-L CDF supports the type-H utility";
      return std::nullopt;
    }
    const double level = v0 >= 0.0 ? 0.0 : num::bracket_root(vmax, 0.0, 1.0, v0, v1);
    const double xloH = argmax_linear_reward_free(w(level), G_.gH, G_.beta).x;
    std::optional<double> xss;
    CdfSegment FL_low;
    if (G_.nL >= 2) {
      xss = J_of(level, G_.tail(), G_.uL, G_.gL, G_.beta);
      if (*xss > xloH + 1e-12) {
        why = "x** lies above the type-H support start";
        return std::nullopt;
      }
      FL_low = level_segment(G_.tail(), G_.uL, G_.gL, G_.beta, G_.xlo_L, *xss, seg_opts());
      FL_low.F.front() = 0.0;
    } else {
      FL_low = {{G_.xlo_L}, {level}};
    }
    double atomH = 0.0;
    if (G_.nH == 1) {
      auto lg = [&](double m) { return G_.Wl(xloH, m, level) - G_.uL; };
      const double l0 = lg(0.0), l1 = lg(1.0);
      if (l0 > 1e-12 || l1 < 0.0) {
        why = "no type-H atom keeps type L indifferent";
        return std::nullopt;
      }
      atomH = l0 >= 0.0 ? 0.0 : num::bracket_root(lg, 0.0, 1.0, l0, l1);
    }
    return finish(Regime::HybridCase1, xloH, level, atomH, FL_low, xss, why);
  }

 private:
  SymmetricOptions seg_opts() const {
    SymmetricOptions s;
    s.grid_points = o_.grid_points;
    return s;
  }

  // Type-H CDF on the segment where the type-L CDF is frozen at FLf.
  std::optional<double> fh_frozen(double x, double FLf, double ylo) const {
    const double f0 = G_.Wh(x, ylo, FLf) - uH_;
    if (f0 > 1e-10) return std::nullopt;
    if (f0 >= 0.0) return ylo;
    const double f1 = G_.Wh(x, 1.0, FLf) - uH_;
    if (f1 <= 0.0) return 1.0;
    auto f = [&](double y) { return G_.Wh(x, y, FLf) - uH_; };
    return num::bracket_root(f, ylo, 1.0, f0, f1);
  }

  bool newton(double x, double& a, double& b, double& resid) const {
    auto r = [&](double av, double bv, double& r1, double& r2) {
      r1 = G_.Wh(x, av, bv) - uH_;
      r2 = G_.Wl(x, av, bv) - G_.uL;
    };
    double r1, r2;
    r(a, b, r1, r2);
    for (int it = 0; it < 60; ++it) {
      double norm = std::hypot(r1, r2);
      if (norm < 1e-14) break;
      const double h = 1e-7;
      const double ha = a + h <= 1.0 ? h : -h;
      const double hb = b + h <= 1.0 ? h : -h;
      double s1, s2, t1, t2;
      r(a + ha, b, s1, s2);
      r(a, b + hb, t1, t2);
      const double j11 = (s1 - r1) / ha, j21 = (s2 - r2) / ha;
      const double j12 = (t1 - r1) / hb, j22 = (t2 - r2) / hb;
      const double det = j11 * j22 - j12 * j21;
      if (det == 0.0) return false;
      const double da = -(r1 * j22 - r2 * j12) / det;
      const double db = -(j11 * r2 - j21 * r1) / det;
      double step = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls) {
        double na = std::clamp(a + step * da, 0.0, 1.0);
        double nb = std::clamp(b + step * db, 0.0, 1.0);
        double n1, n2;
        r(na, nb, n1, n2);
        if (std::hypot(n1, n2) < norm) {
          a = na;
          b = nb;
          r1 = n1;
          r2 = n2;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    resid = std::max(std::fabs(r1), std::fabs(r2));
    return true;
  }

  std::optional<BinaryTypeEquilibrium> finish(Regime regime, double xloH, double FLf,
                                              double atomH, const CdfSegment& FL_low,
                                              std::optional<double> xss, std::string& why) {
    const int N = std::max(o_.grid_points, 3) - 1;
    double max_resid = 0.0;
    bool mono = true;
    Track hseg;
    hseg.push(xloH, atomH, FLf);
    double xstar = xloH;
    double FHstar = atomH;
    if (G_.nH >= 2) {
      // Type H alone above its entry point until type L is indifferent again.
      double prevx = xloH, prevF = 0.0;
      bool found = false;
      for (int k = 1; k <= N; ++k) {
        const double x = xloH + (top_ - xloH) * k / N;
        auto F = fh_frozen(x, FLf, prevF);
        if (!F) {
          why = "type-H CDF would be negative after its entry point";
          return std::nullopt;
        }
        const double phi = G_.Wl(x, *F, FLf) - G_.uL;
        if (phi >= -1e-8) {
          double xs = x;
          if (phi > 0.0) {
            auto ph = [&](double z) {
              auto Fz = fh_frozen(z, FLf, 0.0);
              return G_.Wl(z, Fz.value_or(0.0), FLf) - G_.uL;
            };
            double pl = ph(prevx);
            xs = pl < 0.0 ? num::bracket_root(ph, prevx, x, pl, phi, 1e-13) : prevx;
          }
          xstar = xs;
          FHstar = fh_frozen(xs, FLf, 0.0).value_or(prevF);
          found = true;
          break;
        }
        if (*F < prevF - o_.mono_slack) mono = false;
        hseg.push(x, *F, FLf);
        prevx = x;
        prevF = *F;
      }
      if (!found) {
        why = "type L never returns to indifference before the top";
        return std::nullopt;
      }
      hseg.push(xstar, FHstar, FLf);
    }

    Track coupled;
    double a = FHstar, b = FLf;
    coupled.push(xstar, a, b);
    for (int k = 1; k <= N; ++k) {
      const double x = xstar + (top_ - xstar) * k / N;
      if (coupled.x.size() >= 2) {
        const std::size_t m = coupled.x.size();
        const double dx = (x - coupled.x[m - 1]) / (coupled.x[m - 1] - coupled.x[m - 2]);
        a = std::clamp(coupled.a[m - 1] + dx * (coupled.a[m - 1] - coupled.a[m - 2]), 0.0, 1.0);
        b = std::clamp(coupled.b[m - 1] + dx * (coupled.b[m - 1] - coupled.b[m - 2]), 0.0, 1.0);
      }
      double resid = 0.0;
      if (!newton(x, a, b, resid)) {
        why = "singular indifference system";
        return std::nullopt;
      }
      if (k < N) max_resid = std::max(max_resid, resid);
      if (a < coupled.a.back() - o_.mono_slack || b < coupled.b.back() - o_.mono_slack) mono = false;
      coupled.push(x, a, b);
      if (o_.progress && k % 200 == 0) o_.progress(static_cast<double>(k) / N);
    }
    const double top_gap = std::max(1.0 - coupled.a.back(), 1.0 - coupled.b.back());
    if (!mono || max_resid > o_.residual_tol || top_gap > 1e-4) {
      why = !mono ? "monotonicity check failed"
                  : (max_resid > o_.residual_tol ? "indifference residual too large"
                                                 : "CDFs do not reach 1 at the top");
      return std::nullopt;
    }

    // Assemble the type-H CDF.
    std::vector<double> gx, gf;
    auto append = [](std::vector<double>& xs, std::vector<double>& fs, double x, double f) {
      if (!xs.empty() && x <= xs.back()) {
        fs.back() = std::max(fs.back(), f);
        return;
      }
      xs.push_back(x);
      fs.push_back(std::max(f, fs.empty() ? 0.0 : fs.back()));
    };
    for (std::size_t i = 0; i < hseg.x.size(); ++i) append(gx, gf, hseg.x[i], hseg.a[i]);
    for (std::size_t i = 0; i < coupled.x.size(); ++i) append(gx, gf, coupled.x[i], coupled.a[i]);
    gf.back() = 1.0;
    std::vector<MixedStrategy::Atom> hatoms;
    if (atomH > 0.0) hatoms.push_back({gx.front(), atomH});
    else gf.front() = 0.0;

    std::vector<double> lx = FL_low.x, lf = FL_low.F;
    std::vector<MixedStrategy::Atom> latoms;
    if (G_.nL == 1 && FLf > 0.0) latoms.push_back({lx.front(), FLf});
    for (std::size_t i = 0; i < coupled.x.size(); ++i) append(lx, lf, coupled.x[i], coupled.b[i]);
    lf.back() = 1.0;

    BinaryTypeEquilibrium eq;
    eq.F_H = MixedStrategy(std::move(gx), std::move(gf), std::move(hatoms));
    eq.F_L = MixedStrategy(std::move(lx), std::move(lf), std::move(latoms));
    eq.regime = regime;
    eq.x_lo_H = xloH;
    eq.x_hi_H = top_;
    eq.x_hi_L = top_;
    eq.x_star = xstar;
    eq.x_star2 = xss;
    return eq;
  }

  const Game& G_;
  double uH_;
  const BinaryOptions& o_;
  double top_ = 0.0;
};

}  // namespace

PseudoStrategy pseudo_strategy(double u, const GameConfig& cfg, const BinaryOptions& opts) {
  Game G = make_game(cfg);
  if (!(u > 0.0) || u > G.ubarH * (1.0 + 1e-12)) {
    throw Error(Errc::Domain, "pseudo strategy utility outside (0, max]");
  }
  PseudoStrategy ps;
  ps.u = u;
  ps.n_H = G.nH;
  ps.gamma_H = G.gH;
  ps.head_biases.assign(G.q.begin(), G.q.begin() + G.nH);
  if (G.nH == 1) {
    ps.x_lo = ps.x_hi = G.xstarH;
    ps.strategy = MixedStrategy::point_mass(G.xstarH);
    return ps;
  }
  auto [lo, hi] = pseudo_support(G, u);
  ps.x_lo = lo;
  ps.x_hi = hi;
  SymmetricOptions s;
  s.grid_points = opts.grid_points;
  s.first_cell = u >= G.ubarH ? 1e-5 : 1.0 / (opts.grid_points - 1);
  ps.strategy = level_strategy(G.head(), u, G.gH, G.beta, lo, hi, s);
  return ps;
}

DeviationL best_deviation_L(double u, const GameConfig& cfg, const BinaryOptions& opts) {
  Game G = make_game(cfg);
  if (G.nH == 1) {
    Argmax h = argmax_linear_reward_free(G.q[0], G.gH, G.beta);
    return {h.x * G.q[0] - G.gL * G.g(h.x), h.x, h.x, h.x};
  }
  return best_dev(G, u, opts.scan_points);
}

UHResult compute_uH(const GameConfig& cfg, const BinaryOptions& opts) {
  Game G = make_game(cfg);
  if (G.nH == 1) return uH_single(G);
  DeviationL top = best_dev(G, G.ubarH, opts.scan_points);
  if (top.value < G.uL) return {G.ubarH, 0, top.x};
  const double lo = G.xlo_L * G.q.back() - G.gH * G.g(G.xlo_L);
  return bisect_uH(G, lo, G.ubarH, opts);
}

UHResult compute_uH_bracket(const GameConfig& cfg, double u_lo, double u_hi,
                            const BinaryOptions& opts) {
  Game G = make_game(cfg);
  if (G.nH == 1) return uH_single(G);
  return bisect_uH(G, u_lo, std::min(u_hi, G.ubarH), opts);
}

BinaryTypeEquilibrium solve_binary(const GameConfig& cfg, const BinaryOptions& opts) {
  Game G = make_game(cfg);
  BinaryTypeEquilibrium eq;
  eq.n_H = G.nH;
  eq.n_L = G.nL;
  eq.gamma_H = G.gH;
  eq.gamma_L = G.gL;
  eq.effective_p = G.q;
  eq.u_L = G.uL;
  eq.x_lo_L = G.xlo_L;

  SymmetricOptions sopt;
  sopt.grid_points = opts.grid_points;
  if (G.gH == G.gL) {
    SymmetricEquilibrium s = solve_symmetric(make_symmetric(G.q, G.gH, G.beta), sopt);
    eq.u_H = eq.u_L = s.u;
    eq.F_H = eq.F_L = s.strategy;
    eq.regime = Regime::Symmetric;
    eq.x_lo_H = eq.x_lo_L = s.x_lo;
    eq.x_hi_H = eq.x_hi_L = s.x_hi;
    return eq;
  }

  UHResult U = compute_uH(cfg, opts);
  eq.u_H = U.u_H;
  eq.hint = U.hint;
  if (U.hint == 0 || U.hint == 1) {
    if (G.nH == 1) {
      eq.F_H = MixedStrategy::point_mass(G.xstarH);
      eq.x_lo_H = eq.x_hi_H = G.xstarH;
    } else {
      PseudoStrategy ps = pseudo_strategy(U.u_H, cfg, opts);
      eq.F_H = ps.strategy;
      eq.x_lo_H = ps.x_lo;
      eq.x_hi_H = ps.x_hi;
    }
    if (G.nL == 1) {
      eq.F_L = MixedStrategy::point_mass(G.xlo_L);
      eq.x_hi_L = G.xlo_L;
    } else {
      eq.x_hi_L = largest_root_linear(G.q[G.nH], G.gL, G.beta, G.uL);
      eq.F_L = level_strategy(G.tail(), G.uL, G.gL, G.beta, G.xlo_L, eq.x_hi_L, sopt);
    }
    eq.regime = U.hint == 0 ? Regime::SeparatedStrict : Regime::SeparatedTouching;
    return eq;
  }

  Hybrid hy(G, U.u_H, opts);
  std::string why2, why1;
  std::optional<BinaryTypeEquilibrium> built = hy.case2(why2);
  if (!built) built = hy.case1(why1);
  if (!built) {
    throw Error(Errc::ValidationFailed,
                "hybrid construction failed (case 2: " + why2 + "; case 1: " + why1 + ")");
  }
  BinaryTypeEquilibrium out = std::move(*built);
  out.n_H = eq.n_H;
  out.n_L = eq.n_L;
  out.gamma_H = eq.gamma_H;
  out.gamma_L = eq.gamma_L;
  out.effective_p = eq.effective_p;
  out.u_H = eq.u_H;
  out.u_L = eq.u_L;
  out.x_lo_L = eq.x_lo_L;
  out.hint = eq.hint;
  if (opts.progress) opts.progress(1.0);
  return out;
}

PureNEResult pure_ne(const GameConfig& cfg) {
  validate_config(cfg);
  const std::vector<double> q = cfg.effective();
  const auto& gam = cfg.cost.gammas;
  const double beta = cfg.cost.beta;
  const std::size_t n = q.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (!(gam[i] > gam[i - 1])) {
      throw Error(Errc::Config, "pure equilibrium analysis needs increasing gammas",
                  static_cast<std::ptrdiff_t>(i));
    }
  }
  PureNEResult res;
  res.candidate.resize(n);
  res.utilities.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Argmax a = argmax_linear_reward_free(q[i], gam[i], beta);
    res.candidate[i] = a.x;
    res.utilities[i] = a.value;
  }
  res.sufficient_ok = true;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (gam[i + 1] / gam[i] < beta) res.sufficient_ok = false;
  }
  res.elasticity_uniqueness_ok = true;

  bool ordered = true;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(res.candidate[i] > res.candidate[i + 1])) ordered = false;
  }
  // Best reply of creator i over every rank it could take against the rest.
  double max_gain = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> others;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(res.candidate[j]);
    }
    std::sort(others.rbegin(), others.rend());
    for (std::size_t r = 0; r < n; ++r) {
      const double upper = r == 0 ? 1e300 : others[r - 1];
      const double lower = r == n - 1 ? 0.0 : others[r];
      double x = argmax_linear_reward_free(q[r], gam[i], beta).x;
      x = std::clamp(x, lower, std::min(upper, 1e6));
      const double v = x * q[r] - gam[i] * std::pow(x, beta);
      max_gain = std::max(max_gain, v - res.utilities[i]);
    }
  }
  res.max_gain = max_gain;
  if (ordered && max_gain <= 1e-12) res.profile = res.candidate;
  return res;
}

double deviation_utility(const std::vector<StrategyGroup>& groups, std::size_t g,
                         double x, const std::vector<double>& q, double beta) {
  std::size_t n = 0;
  for (const auto& gr : groups) n += gr.count;
  // dp[a * n + t]: a opponents above, t tied at x.
  std::vector<double> dp(n * n, 0.0), nd(n * n);
  dp[0] = 1.0;
  std::size_t seen = 0;
  for (std::size_t h = 0; h < groups.size(); ++h) {
    const auto& s = groups[h].strategy;
    const double below = s.cdf_left(x);
    const double tie = s.atom_at(x);
    const double above = 1.0 - s.cdf(x);
    const int cnt = groups[h].count - (h == g ? 1 : 0);
    for (int r = 0; r < cnt; ++r) {
      std::fill(nd.begin(), nd.end(), 0.0);
      for (std::size_t a = 0; a <= seen; ++a) {
        for (std::size_t t = 0; a + t <= seen; ++t) {
          const double v = dp[a * n + t];
          if (v == 0.0) continue;
          nd[a * n + t] += v * below;
          nd[a * n + t + 1] += v * tie;
          nd[(a + 1) * n + t] += v * above;
        }
      }
      dp.swap(nd);
      ++seen;
    }
  }
  std::vector<double> pre(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) pre[i + 1] = pre[i] + q[i];
  double w = 0.0;
  for (std::size_t a = 0; a <= seen; ++a) {
    for (std::size_t t = 0; a + t <= seen; ++t) {
      const double v = dp[a * n + t];
      if (v == 0.0) continue;
      w += v * (pre[a + t + 1] - pre[a]) / static_cast<double>(t + 1);
    }
  }
  return x * w - groups[g].gamma * std::pow(x, beta);
}

VerifyReport verify_equilibrium(const std::vector<StrategyGroup>& groups,
                                const std::vector<double>& q, double beta, int grid_size) {
  VerifyReport rep;
  rep.max_gain = -1e300;
  double xmax = 1.0;
  std::vector<double> extra;
  for (const auto& gr : groups) {
    xmax = std::max(xmax, gr.strategy.hi());
    extra.push_back(gr.strategy.lo());
    extra.push_back(gr.strategy.hi());
    for (const auto& at : gr.strategy.atoms()) {
      extra.push_back(at.x);
      extra.push_back(at.x * (1.0 + 1e-10) + 1e-12);
    }
  }
  std::vector<double> xs(extra);
  for (int k = 0; k < grid_size; ++k) xs.push_back(xmax * k / std::max(grid_size - 1, 1));
  int first = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& s = groups[g].strategy;
    // Equilibrium utility: expectation over the creator's own strategy.
    double ueq = 0.0;
    const auto& gx = s.grid();
    for (const auto& at : s.atoms()) ueq += at.mass * deviation_utility(groups, g, at.x, q, beta);
    for (std::size_t k = 0; k + 1 < gx.size(); ++k) {
      const double mass = s.cdf_left(gx[k + 1]) - s.cdf(gx[k]);
      if (mass <= 0.0) continue;
      ueq += mass * deviation_utility(groups, g, 0.5 * (gx[k] + gx[k + 1]), q, beta);
    }
    for (double x : xs) {
      const double gain = deviation_utility(groups, g, x, q, beta) - ueq;
      if (gain > rep.max_gain) {
        rep.max_gain = gain;
        rep.worst_creator = first;
        rep.worst_effort = x;
      }
    }
    first += groups[g].count;
  }
  return rep;
}

QuasiconvexityReport diagnostics_quasiconvexity(const GameConfig& cfg, int points,
                                                const BinaryOptions& opts) {
  Game G = make_game(cfg);
  QuasiconvexityReport rep;
  if (G.nH < 2) return rep;
  rep.u_H = compute_uH(cfg, opts).u_H;
  auto [lo, hi] = pseudo_support(G, rep.u_H);
  double prev = 0.0;
  for (int k = 0; k < points; ++k) {
    const double x = lo + (hi - lo) * k / (points - 1);
    const double F = pseudo_cdf(G, rep.u_H, x, lo, hi, prev);
    prev = F;
    rep.x.push_back(x);
    rep.value.push_back(uLu(G, x, F));
  }
  const double ends = std::max(rep.value.front(), rep.value.back());
  for (std::size_t k = 1; k + 1 < rep.value.size(); ++k) {
    if (rep.value[k] > ends + 1e-9) rep.verdict = false;
  }
  return rep;
}

JacobianReport diagnostics_jacobian_k(const BinaryTypeEquilibrium& eq, double x_from,
                                      double x_to, int points) {
  if (eq.n_H < 2 || eq.n_L < 2) {
    throw Error(Errc::Config, "Jacobian diagnostic needs two creators of each type");
  }
  const auto& q = eq.effective_p;
  std::vector<double> dq(q.size() - 1);
  for (std::size_t i = 0; i + 1 < q.size(); ++i) dq[i] = q[i] - q[i + 1];
  auto W = [&](int h, double a, int l, double b) {
    std::vector<double> y(h, a);
    y.insert(y.end(), l, b);
    return expected_rank_bias(y, std::span<const double>(dq.data(), y.size() + 1));
  };
  JacobianReport rep;
  rep.threshold = (1.0 - 1.0 / eq.n_H) / (eq.n_L * (eq.n_L - 1.0));
  for (int k = 0; k < points; ++k) {
    const double x = x_from + (x_to - x_from) * k / std::max(points - 1, 1);
    const double FH = eq.F_H.cdf(x), FL = eq.F_L.cdf(x);
    const double a = W(eq.n_H - 2, FH, eq.n_L, FL);
    const double b = W(eq.n_H - 1, FH, eq.n_L - 1, FL);
    const double c = W(eq.n_H, FH, eq.n_L - 2, FL);
    const double kv = b * b / (a * c);
    rep.x.push_back(x);
    rep.k.push_back(kv);
    if (!(std::fabs(kv - rep.threshold) > 1e-12)) rep.invertible = false;
  }
  return rep;
}

}  // namespace pbg
