#pragma once

// Closed-form geometry of the hyperbolic plane (curvature -1) in polar
// coordinates (rho, theta) about a fixed origin o.  Polar coordinates stay
// numerically sane out to rho ~ 700 where Poincare-disk coordinates would have
// collapsed onto the unit circle long before; the disk map exists only as an
// export transform for visualization.

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "hypvis/errors.hpp"

namespace hypvis {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Round-off guards: arguments of acosh/asin/atanh land epsilon outside their
// domain after cancellation; clamp with a 1e-12 tolerance policy.
inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }
inline double clamp_ge1(double x) { return x < 1.0 ? 1.0 : x; }

// Wrap to [0, 2pi).
inline double wrap_angle(double t) {
  t = std::fmod(t, two_pi);
  if (t < 0) t += two_pi;
  // fmod can return exactly two_pi after the add when t was a tiny negative.
  if (t >= two_pi) t = 0.0;
  return t;
}

// Signed angular difference a - b wrapped to (-pi, pi].
inline double angle_diff(double a, double b) {
  double d = std::fmod(a - b, two_pi);
  if (d <= -pi) d += two_pi;
  if (d > pi) d -= two_pi;
  return d;
}

struct HPoint {
  double rho = 0.0;    // hyperbolic distance from o, >= 0
  double theta = 0.0;  // angle in [0, 2pi)
};

// Geodesic segment from o of the given length in direction theta0.
struct RaySegment {
  double theta0 = 0.0;
  double length = 1.0;
};

// Hyperbolic disk obstacle.
struct Grain {
  HPoint center;
  double radius = 0.0;
};

// Point at arclength t >= 0 along the ray from o in direction theta0.
inline HPoint point_on_ray(double theta0, double t) { return HPoint{t, wrap_angle(theta0)}; }

// Hyperbolic law of cosines about o.
inline double dist(const HPoint& a, const HPoint& b) {
  double dtheta = angle_diff(a.theta, b.theta);
  double c = std::cosh(a.rho) * std::cosh(b.rho) -
             std::sinh(a.rho) * std::sinh(b.rho) * std::cos(dtheta);
  return std::acosh(clamp_ge1(c));
}

// Minimum distance from p to the geodesic segment [o, endpoint(seg)].
// The foot of the perpendicular from p onto the full ray sits at arclength
// t* = artanh(tanh rho * cos dtheta); three cases depending on where t* lands.
inline double dist_to_ray_segment(const HPoint& p, const RaySegment& seg) {
  double dtheta = angle_diff(p.theta, seg.theta0);
  double c = std::cos(dtheta);
  if (c <= 0.0) return p.rho;  // nearest point is o itself
  double tstar = std::atanh(std::min(std::tanh(p.rho) * c, 1.0));
  if (tstar >= seg.length) return dist(p, HPoint{seg.length, seg.theta0});
  return std::asinh(std::sinh(p.rho) * std::abs(std::sin(dtheta)));
}

// Area of the hyperbolic disk of radius R.
inline double ball_area(double R) { return two_pi * (std::cosh(R) - 1.0); }

// Area of the R-neighborhood of a geodesic segment of length r.
inline double sausage_area(double r, double R) { return ball_area(R) + 2.0 * r * std::sinh(R); }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// Parameter interval {t in [0, L] : dist(point_on_ray(theta0, t), center) <= radius}.
// Along the ray, cosh dist(t) = A cosh t - B sinh t with A = cosh rho_g,
// B = sinh rho_g cos dtheta; the sublevel set of cosh R is an interval around
// t0 = artanh(B/A) of half-width arccosh(C/D), D = sqrt(A^2 - B^2) >= 1.
inline std::optional<Interval> ball_ray_interval(const Grain& g, const RaySegment& seg) {
  double dtheta = angle_diff(g.center.theta, seg.theta0);
  double A = std::cosh(g.center.rho);
  double B = std::sinh(g.center.rho) * std::cos(dtheta);
  double C = std::cosh(g.radius);
  double D = std::sqrt(clamp_ge1(A * A - B * B));
  if (C < D) return std::nullopt;  // grain misses the full geodesic line
  double t0 = std::atanh(B / A);
  double w = std::acosh(clamp_ge1(C / D));
  double lo = std::max(0.0, t0 - w);
  double hi = std::min(seg.length, t0 + w);
  if (hi < lo) return std::nullopt;  // interval lies outside [0, L]
  return Interval{lo, hi};
}

// Largest angular offset psi* in [0, pi] such that a ray segment of length L
// at offset |psi| <= psi* from the grain's direction passes within g.radius of
// the grain center.  Exact case split:
//   - grain out of reach (rho_g > L + R_g): nothing blocked;
//   - critical contact interior to the segment: sinh R = sinh rho * sin psi;
//   - critical contact at the far endpoint: law of cosines at distance R.
// Throws when the grain covers o (every direction blocked; callers must
// short-circuit that case).
inline double blocking_halfwidth(const Grain& g, double L) {
  double rho = g.center.rho, R = g.radius;
  if (R >= rho) throw validation_error("blocking_halfwidth: grain covers the origin");
  if (rho > L + R) return 0.0;
  double sr = std::sinh(rho);
  double s = std::sinh(R) / sr;  // < 1 since R < rho
  double psi_int = std::asin(std::min(s, 1.0));
  // Foot of the perpendicular at the critical interior angle: t* <= L iff
  // tanh rho * cos psi <= tanh L (atanh is monotone, so compare arguments).
  double cos_int = std::sqrt(std::max(1.0 - s * s, 0.0));
  if (std::tanh(rho) * cos_int <= std::tanh(L)) return psi_int;
  double carg = (std::cosh(rho) * std::cosh(L) - std::cosh(R)) / (sr * std::sinh(L));
  return std::acos(clamp_unit(carg));
}

// Reference implementation by bisection on the monotone map
// psi -> dist_to_ray_segment((rho, psi), segment), angular tolerance 1e-12.
inline double blocking_halfwidth_bisect(const Grain& g, double L) {
  double rho = g.center.rho, R = g.radius;
  if (R >= rho) throw validation_error("blocking_halfwidth_bisect: grain covers the origin");
  RaySegment seg{0.0, L};
  auto blocked = [&](double psi) { return dist_to_ray_segment(HPoint{rho, psi}, seg) <= R; };
  if (!blocked(0.0)) return 0.0;
  double lo = 0.0, hi = pi;  // dist at pi equals rho > R, never blocked
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    (blocked(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Poincare-disk coordinates for visualization exports.
inline std::pair<double, double> to_poincare(const HPoint& p) {
  double r = std::tanh(0.5 * p.rho);
  return {r * std::cos(p.theta), r * std::sin(p.theta)};
}

}  // namespace hypvis
