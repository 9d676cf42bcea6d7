#pragma once

// Adaptive Simpson quadrature with an absolute-error budget.  The budget is
// split between subintervals on refinement, so the accepted Richardson
// estimates sum to at most the requested tolerance.

#include <cmath>

#include "hypvis/errors.hpp"

namespace hypvis {

namespace detail {

template <class F>
double adapt_simpson(F& f, double a, double fa, double b, double fb, double m, double fm,
                     double whole, double tol, int depth) {
  if (depth > 60)
    throw numerical_error("adaptive quadrature: refinement limit reached (integrand too rough)");
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adapt_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
         adapt_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

template <class F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol) {
  if (!(abs_tol > 0)) throw validation_error("adaptive_simpson: tolerance must be positive");
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adapt_simpson(f, a, fa, b, fb, m, fm, whole, abs_tol, 0);
}

}  // namespace hypvis
