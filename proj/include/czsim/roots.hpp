#ifndef CZSIM_ROOTS_HPP
#define CZSIM_ROOTS_HPP

#include <cmath>
#include <optional>
#include <utility>

#include "czsim/common.hpp"

namespace czsim {

/// Brent's root bracketing method. f(lo) and f(hi) must differ in sign;
/// returns nullopt otherwise.
template <typename F>
std::optional<Real> brent_root(F&& f, Real lo, Real hi, Real x_tol = 1e-13,
                               int max_iter = 200) {
  Real a = lo, b = hi;
  Real fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) return std::nullopt;
  Real c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const Real tol = 2.0 * 1e-16 * std::abs(b) + 0.5 * x_tol;
    const Real m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      Real p, q, r;
      const Real s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0)
        q = -q;
      else
        p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

/// Brent's minimizer on [lo, hi]. Returns (argmin, min).
template <typename F>
std::pair<Real, Real> brent_minimize(F&& f, Real lo, Real hi, Real x_tol = 1e-12,
                                     int max_iter = 200) {
  constexpr Real golden = 0.3819660112501051;
  Real a = lo, b = hi;
  Real x = a + golden * (b - a), w = x, v = x;
  Real fx = f(x), fw = fx, fv = fx;
  Real d = 0.0, e = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Real xm = 0.5 * (a + b);
    const Real tol1 = 1e-10 * std::abs(x) + x_tol / 3.0;
    const Real tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool golden_step = true;
    if (std::abs(e) > tol1) {
      Real r = (x - w) * (fx - fv);
      Real q = (x - v) * (fx - fw);
      Real p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0) p = -p;
      q = std::abs(q);
      const Real etemp = e;
      e = d;
      if (!(std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) ||
            p >= q * (b - x))) {
        d = p / q;
        const Real u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (xm - x >= 0) ? tol1 : -tol1;
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x >= xm) ? a - x : b - x;
      d = golden * e;
    }
    const Real u = (std::abs(d) >= tol1) ? x + d : x + (d >= 0 ? tol1 : -tol1);
    const Real fu = f(u);
    if (fu <= fx) {
      if (u >= x)
        a = x;
      else
        b = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x)
        a = u;
      else
        b = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, fx};
}

}  // namespace czsim

#endif  // CZSIM_ROOTS_HPP
