#pragma once

// Decay rates of the segment-containment probability f(r): the vacant-phase
// closed form, the occupied-phase integral-equation root, and the Monte Carlo
// log-slope fit.  Every returned rate carries its provenance and an error
// bound.

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "hypvis/errors.hpp"
#include "hypvis/geometry.hpp"
#include "hypvis/quadrature.hpp"
#include "hypvis/radius_law.hpp"
#include "hypvis/stats.hpp"

namespace hypvis {

enum class AlphaProvenance { closed_form_vacant, integral_equation_occupied, monte_carlo_fit };

struct AlphaValue {
  double value = 0.0;  // decay rate, >= 0
  AlphaProvenance provenance = AlphaProvenance::closed_form_vacant;
  double tolerance = 0.0;  // reported error bound, > 0
};

inline AlphaValue alpha_vacant(double lambda, const RadiusLaw& law) {
  if (lambda < 0) throw validation_error("alpha_vacant: negative intensity");
  law.validate();
  // the two discrete laws are exact closed forms; the truncated exponential
  // uses the exact moment integral, reported at the contract tolerance
  double tol = law.kind == RadiusLaw::Kind::exponential ? 1e-10 : 1e-15;
  return AlphaValue{2.0 * lambda * law.mean_sinh(), AlphaProvenance::closed_form_vacant, tol};
}

// Void probability of the r-deep segment's radius-R neighborhood.
inline double f_vacant(double lambda, double R, double r) {
  if (lambda < 0 || R < 0 || r < 0) throw validation_error("f_vacant: negative argument");
  return std::exp(-lambda * sausage_area(r, R));
}

// Random-radius mean sausage area: affine in r through the law's moments.
inline double mean_sausage_area(double r, const RadiusLaw& law) {
  law.validate();
  if (r < 0) throw validation_error("mean_sausage_area: negative depth");
  return two_pi * (law.mean_cosh() - 1.0) + 2.0 * r * law.mean_sinh();
}

inline double f_vacant_law(double lambda, const RadiusLaw& law, double r) {
  if (lambda < 0) throw validation_error("f_vacant_law: negative intensity");
  return std::exp(-lambda * mean_sausage_area(r, law));
}

// Half-chord profile of the radius-R ball at height s, equal to
// sinh(acosh(cosh R / cosh s)) but evaluated through the product form
// cosh^2 R - cosh^2 s = 2 sinh((R+s)/2) sinh((R-s)/2)(cosh R + cosh s),
// which avoids cancellation as s -> R.
inline double g_profile(double s, double R) {
  if (!(R > 0)) throw validation_error("g_profile: R must be positive");
  if (s < 0 || s > R) throw validation_error("g_profile: s outside [0, R]");
  double prod = 2.0 * std::sinh(0.5 * (R + s)) * std::sinh(0.5 * (R - s)) *
                (std::cosh(R) + std::cosh(s));
  return std::sqrt(std::max(0.0, prod)) / std::cosh(s);
}

namespace detail {

// Profile integrand after the substitution s = R - u^2, which removes the
// square-root vanishing of g at s = R; smooth in u on [0, sqrt(R)].  The
// clamp absorbs the 1-ulp overshoot of sqrt(R)^2 past R.
inline double g_sub(double u, double R) {
  return 2.0 * u * g_profile(std::clamp(R - u * u, 0.0, R), R);
}

// int_0^x g(s, R) ds.  The full profile integral is ball_area(R)/4 exactly
// (substitute sinh s = sinh R sin phi), so only the smooth substituted tail
// over [x, R] needs quadrature.
inline double g_integral(double x, double R, double tol) {
  double w = std::sqrt(std::max(0.0, R - x));
  double tail = adaptive_simpson([R](double u) { return g_sub(u, R); }, 0.0, w, tol);
  return ball_area(R) / 4.0 - tail;
}

// Memoized cumulative K(v) = int_0^v g_sub(u, R) du.  New queries integrate
// only the increment from the nearest cached node below v, with a
// length-proportional slice of the error budget, so any chain of increments
// stays within `tol` and repeated evaluations cost only local refinement.
class GSubCumulative {
 public:
  GSubCumulative(double R, double tol) : R_(R), tol_(tol), vmax_(std::sqrt(R)) {
    k_[0.0] = 0.0;
  }
  double operator()(double v) {
    auto it = k_.lower_bound(v);
    if (it != k_.end() && it->first == v) return it->second;
    --it;  // the v = 0 node guarantees a predecessor for any v >= 0
    double inc_tol = std::max(tol_ * (v - it->first) / vmax_, 1e-16);
    double k = it->second +
               adaptive_simpson([this](double u) { return g_sub(u, R_); }, it->first, v, inc_tol);
    k_.emplace(v, k);
    return k;
  }

 private:
  double R_, tol_, vmax_;
  std::map<double, double> k_;
};

}  // namespace detail

enum class KernelMode { density, literal_magnitude };

// density: h(t) = 2 lambda g(t/2) exp(-4 lambda int_0^{t/2} g), the
// nonnegative renewal density whose total mass is 1 - exp(-lambda ball_area).
// literal_magnitude: just the envelope exp(-4 lambda int_0^{t/2} g).
inline double occupied_kernel(double t, double lambda, double R,
                              KernelMode mode = KernelMode::density) {
  if (!(R > 0)) throw validation_error("occupied_kernel: R must be positive");
  if (lambda < 0) throw validation_error("occupied_kernel: negative intensity");
  if (t < 0 || t > 2.0 * R) throw validation_error("occupied_kernel: t outside [0, 2R]");
  double env = std::exp(-4.0 * lambda * detail::g_integral(0.5 * t, R, 1e-10));
  if (mode == KernelMode::literal_magnitude) return env;
  return 2.0 * lambda * g_profile(0.5 * t, R) * env;
}

namespace detail {

// Phi(alpha) = int_0^{2R} e^{alpha t} kernel(t) dt, integrated in the
// substituted variable v = sqrt(R - t/2) where the integrand is smooth.
inline double phi_occupied(double alpha, double lambda, double R, KernelMode mode,
                           GSubCumulative& K) {
  double ball4 = ball_area(R) / 4.0;
  auto f = [&](double v) {
    double x = std::clamp(R - v * v, 0.0, R);  // = t/2
    double env = std::exp(-4.0 * lambda * (ball4 - K(v)));
    double base = mode == KernelMode::density ? 2.0 * lambda * g_profile(x, R) * env : env;
    return 4.0 * v * std::exp(alpha * 2.0 * x) * base;
  };
  return adaptive_simpson(f, 0.0, std::sqrt(R), 1e-10);
}

}  // namespace detail

// The root alpha >= 0 of Phi(alpha) = 1.  Phi is strictly increasing and
// unbounded, so the root exists iff Phi(0) <= 1; in density mode
// Phi(0) = 1 - exp(-lambda ball_area(R)) < 1 always, while literal mode can
// start above 1, which is reported as an inconsistency.
inline AlphaValue alpha_occupied(double lambda, double R, KernelMode mode = KernelMode::density) {
  if (!(lambda > 0)) throw validation_error("alpha_occupied: lambda must be positive");
  if (!(R > 0)) throw validation_error("alpha_occupied: R must be positive");
  const double residual_tol = 1e-8;
  detail::GSubCumulative K(R, 1e-10);
  auto phi1 = [&](double a) { return detail::phi_occupied(a, lambda, R, mode, K) - 1.0; };

  double f_lo = phi1(0.0);
  if (std::abs(f_lo) <= residual_tol)
    return AlphaValue{0.0, AlphaProvenance::integral_equation_occupied, 1e-12};
  if (f_lo > 0)
    throw numerical_error(
        "alpha_occupied: kernel mass at alpha = 0 already exceeds 1 "
        "(mode/parameter inconsistency)");

  double lo = 0.0, hi = 1.0, f_hi = phi1(hi);
  for (int d = 0; f_hi < 0; ++d) {
    if (d >= 60) throw numerical_error("alpha_occupied: no bracket within 60 doublings");
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = phi1(hi);
  }

  // Illinois-damped false position inside the bracket
  int last_side = 0;
  for (int it = 0; it < 200; ++it) {
    double mid = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    double f_mid = phi1(mid);
    if (std::abs(f_mid) <= residual_tol) {
      // first-order error bound from the bracket's secant slope
      double slope = (f_hi - f_lo) / (hi - lo);
      double err = std::min(hi - lo, std::abs(f_mid) / std::max(slope, 1e-300));
      return AlphaValue{mid, AlphaProvenance::integral_equation_occupied,
                        std::max(err, 1e-12)};
    }
    if (f_mid < 0) {
      lo = mid;
      f_lo = f_mid;
      if (last_side == -1) f_hi *= 0.5;
      last_side = -1;
    } else {
      hi = mid;
      f_hi = f_mid;
      if (last_side == 1) f_lo *= 0.5;
      last_side = 1;
    }
  }
  throw numerical_error("alpha_occupied: root refinement did not converge");
}

struct AlphaFitPoint {
  double r;     // probe depth
  double fhat;  // estimated f(r), must be > 0
  double se;    // standard error of fhat (0 = exact)
};

struct AlphaFit {
  AlphaValue alpha;
  double slope = 0.0;  // unclamped fitted decay rate
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Weighted least-squares fit of -log fhat against r.  Per-point variances come
// from the delta method var(log f) = (se/f)^2; exact inputs (all se = 0) fall
// back to the ordinary fit, whose residual-based stderr is then 0.
inline AlphaFit fit_alpha(const std::vector<AlphaFitPoint>& pts) {
  if (pts.size() < 4) throw validation_error("fit_alpha: need at least 4 points");
  std::vector<double> x, y, var;
  bool any_exact = false;
  for (const AlphaFitPoint& p : pts) {
    if (!(p.fhat > 0))
      throw validation_error("fit_alpha: nonpositive f estimate (reduce the depth range)");
    if (p.se < 0) throw validation_error("fit_alpha: negative stderr");
    x.push_back(p.r);
    y.push_back(-std::log(p.fhat));
    double sy = p.se / p.fhat;
    var.push_back(sy * sy);
    any_exact |= p.se == 0.0;
  }
  LineFit lf = any_exact ? ols_line(x, y) : wls_line(x, y, var);
  AlphaFit out;
  out.slope = lf.slope;
  out.intercept = lf.intercept;
  out.slope_stderr = lf.slope_stderr;
  out.alpha = AlphaValue{std::max(lf.slope, 0.0), AlphaProvenance::monte_carlo_fit,
                         std::max(lf.slope_stderr, 1e-15)};
  return out;
}

}  // namespace hypvis
