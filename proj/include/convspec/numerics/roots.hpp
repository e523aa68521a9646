#ifndef CONVSPEC_NUMERICS_ROOTS_HPP
#define CONVSPEC_NUMERICS_ROOTS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "convspec/error.hpp"

namespace convspec::numerics {

/// Root of f in [lo, hi] by Brent's method (secant / inverse quadratic steps
/// guarded by bisection). Stops when |f| <= f_tol or the bracket shrinks to
/// x_tol plus a few ulps.
template <typename F>
double find_root(F&& f, double lo, double hi, double f_tol = 1e-14, double x_tol = 0.0, int max_iter = 300) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if (!(fa * fb < 0)) {
    std::ostringstream os;
    os << "find_root: no sign change on [" << lo << ", " << hi << "] (f = " << fa << ", " << fb << ")";
    throw BracketError(os.str());
  }
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0 && fc > 0) || (fb < 0 && fc < 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2 * std::numeric_limits<double>::epsilon() * std::abs(b) + x_tol / 2;
    const double m = (c - b) / 2;
    if (std::abs(fb) <= f_tol || std::abs(m) <= tol) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2 * m * s;
        q = 1 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2 * m * q * (q - r) - (b - a) * (r - 1));
        q = (q - 1) * (r - 1) * (s - 1);
      }
      if (p > 0) q = -q; else p = -p;
      if (2 * p < std::min(3 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  throw ConvergenceError("find_root: iteration budget exhausted");
}

/// Newton iteration kept inside a shrinking sign-change bracket; falls back
/// to bisection whenever the Newton step leaves the bracket.
template <typename F, typename DF>
double find_root_newton(F&& f, DF&& df, double lo, double hi, double f_tol = 1e-14, int max_iter = 300) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if (!(flo * fhi < 0)) throw BracketError("find_root_newton: no sign change in bracket");
  double x = (lo + hi) / 2;
  for (int iter = 0; iter < max_iter; ++iter) {
    const double fx = f(x);
    if (std::abs(fx) <= f_tol) return x;
    if ((fx < 0) == (flo < 0)) { lo = x; flo = fx; } else { hi = x; fhi = fx; }
    const double slope = df(x);
    double next = slope != 0 ? x - fx / slope : lo - 1;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    if (std::abs(hi - lo) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(x)) return next;
    x = next;
  }
  throw ConvergenceError("find_root_newton: iteration budget exhausted");
}

}  // namespace convspec::numerics

#endif  // CONVSPEC_NUMERICS_ROOTS_HPP
