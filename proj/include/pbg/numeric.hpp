#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "pbg/errors.hpp"

namespace pbg::num {

inline constexpr double kRootTol = 1e-14;

/// Root of f on [lo, hi] given a sign change. Endpoint values that are
/// already zero are returned directly.
template <class F>
double bracket_root(F&& f, double lo, double hi, double flo, double fhi,
                    double tol = kRootTol) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw Error(Errc::NoBracket, "root is not bracketed");
  }
  std::uintmax_t iters = 200;
  auto stop = [tol](double a, double b) { return std::fabs(b - a) <= tol; };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
  if (iters >= 200) throw Error(Errc::NonConvergence, "bracketed root");
  return 0.5 * (r.first + r.second);
}

template <class F>
double bracket_root(F&& f, double lo, double hi, double tol = kRootTol) {
  return bracket_root(f, lo, hi, f(lo), f(hi), tol);
}

/// Solves g(y) = target for y in [lo, hi] where g is non-decreasing; targets
/// outside the range clamp to the matching endpoint.
template <class G>
double invert_increasing(G&& g, double target, double lo = 0.0,
                         double hi = 1.0, double tol = kRootTol) {
  double glo = g(lo) - target;
  if (glo >= 0.0) return lo;
  double ghi = g(hi) - target;
  if (ghi <= 0.0) return hi;
  auto f = [&](double y) { return g(y) - target; };
  return bracket_root(f, lo, hi, glo, ghi, tol);
}

struct Max1d {
  double x;
  double value;
};

/// Brent maximization on [a, b].
template <class F>
Max1d maximize(F&& f, double a, double b) {
  std::uintmax_t iters = 200;
  auto neg = [&](double x) { return -f(x); };
  auto r = boost::math::tools::brent_find_minima(neg, a, b, 52, iters);
  return {r.first, -r.second};
}

}  // namespace pbg::num
