#pragma once

// Boolean-model phase queries: point/segment containment and the angular
// visibility set seen from the origin, exact in the vacant phase and
// grid-refined in the occupied phase.

#include <algorithm>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hypvis/arcset.hpp"
#include "hypvis/errors.hpp"
#include "hypvis/geometry.hpp"
#include "hypvis/sampler.hpp"

namespace hypvis {

enum class Phase { vacant, occupied };

// Gaps narrower than this in the covered-segment sweep are treated as closed;
// the same tolerance absorbs roundoff at arc endpoints.
inline constexpr double cover_gap_tol = 1e-12;

namespace detail {

// Queries are only valid away from the window edge: a grain centered just
// outside the window could still reach a point within r_max of the boundary.
inline void require_point_margin(const Configuration& c, const HPoint& p) {
  if (p.rho > c.window.rho_w - c.law.r_max())
    throw validation_error("contains_point: point within the edge-effect margin of the window");
}

inline void require_segment_margin(const Configuration& c, const RaySegment& seg) {
  if (seg.length < 0) throw validation_error("segment query: negative length");
  if (seg.length + c.law.r_max() > c.window.rho_w)
    throw validation_error("segment query: length + max radius exceeds the window");
}

}  // namespace detail

inline bool contains_point(const Configuration& c, Phase phase, const HPoint& p) {
  detail::require_point_margin(c, p);
  for (const Grain& g : c.grains) {
    // dist >= |rho_p - rho_g|, so most grains are rejected without trig; the
    // pad keeps the cheap bound consistent with the rounded exact distance
    if (std::abs(p.rho - g.center.rho) > g.radius + 1e-9) continue;
    double d = dist(p, g.center);
    if (phase == Phase::occupied) {
      if (d <= g.radius) return true;
    } else {
      if (d < g.radius) return false;  // strictly interior to a grain
    }
  }
  return phase == Phase::vacant;
}

inline bool segment_in_vacant(const Configuration& c, const RaySegment& seg) {
  detail::require_segment_margin(c, seg);
  for (const Grain& g : c.grains) {
    if (g.center.rho > seg.length + g.radius) continue;  // cannot reach the segment
    if (dist_to_ray_segment(g.center, seg) < g.radius) return false;
  }
  return true;
}

inline bool segment_in_occupied(const Configuration& c, const RaySegment& seg) {
  detail::require_segment_margin(c, seg);
  if (c.grains.empty()) return false;
  std::vector<Interval> iv;
  iv.reserve(16);
  for (const Grain& g : c.grains) {
    if (g.center.rho > seg.length + g.radius) continue;
    if (auto hit = ball_ray_interval(g, seg)) iv.push_back(*hit);
  }
  if (iv.empty()) return false;
  std::sort(iv.begin(), iv.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double covered = 0.0;
  for (const Interval& i : iv) {
    if (i.lo > covered + cover_gap_tol) return false;
    covered = std::max(covered, i.hi);
    if (covered >= seg.length - cover_gap_tol) return true;
  }
  return covered >= seg.length - cover_gap_tol;
}

// Directions whose depth-L segment stays in the vacant phase, as exact arc
// complement of the per-grain blocked arcs.
inline ArcSet visible_arcs_vacant(const Configuration& c, double L) {
  detail::require_segment_margin(c, RaySegment{0.0, L});
  for (const Grain& g : c.grains)
    if (g.radius >= g.center.rho) return ArcSet::empty_set();  // origin covered
  std::vector<Interval> blocked;
  for (const Grain& g : c.grains) {
    if (g.center.rho > L + g.radius) continue;
    double psi = blocking_halfwidth(g, L);
    if (psi > 0.0) blocked.push_back(Interval{g.center.theta - psi, g.center.theta + psi});
  }
  if (blocked.empty()) return ArcSet::full_circle();
  return complement(ArcSet::from_arcs(blocked));
}

// Directions whose depth-L segment is covered by the grain union, found on an
// m-point grid with endpoints sharpened by bisection between adjacent
// disagreeing grid directions.
inline ArcSet visible_dirs_occupied(const Configuration& c, double L, int m) {
  if (m < (1 << 10)) throw validation_error("visible_dirs_occupied: grid size below 2^10");
  detail::require_segment_margin(c, RaySegment{0.0, L});
  const double h = two_pi / m;
  std::vector<char> ok(static_cast<std::size_t>(m));
  int surviving = 0;
  for (int i = 0; i < m; ++i) {
    ok[i] = segment_in_occupied(c, RaySegment{h * i, L});
    surviving += ok[i];
  }
  if (surviving == m) return ArcSet::full_circle();
  if (surviving == 0) return ArcSet::empty_set();

  auto refine = [&](double inside, double outside) {
    // keep the invariant: `inside` survives, `outside` does not
    for (int step = 0; step < 40; ++step) {
      double mid = 0.5 * (inside + outside);
      if (segment_in_occupied(c, RaySegment{mid, L}))
        inside = mid;
      else
        outside = mid;
    }
    return 0.5 * (inside + outside);
  };

  std::vector<Interval> arcs;
  for (int i = 0; i < m; ++i) {
    if (!ok[i] || ok[(i + m - 1) % m]) continue;  // not the start of a run
    int j = i;
    while (ok[(j + 1) % m]) ++j;  // run is i..j in unwrapped indices
    double lo = refine(h * i, h * i - h);
    double hi = refine(h * j, h * j + h);
    arcs.push_back(Interval{lo, hi});
  }
  return ArcSet::from_arcs(arcs);
}

// Directions theta in [0, pi) with both theta and theta + pi in `a`: the
// intersection of `a` with its half-turn, folded onto [0, pi).
inline ArcSet line_arcs(const ArcSet& a) {
  ArcSet inter = intersect(a, rotate(a, pi));
  std::vector<Interval> folded;
  for (const Interval& arc : inter.arcs()) {
    // stored arcs satisfy lo in [0, 2pi), hi <= lo + 2pi < 4pi
    for (int k = 0; k < 4; ++k) {
      double lo = std::max(arc.lo, k * pi);
      double hi = std::min(arc.hi, (k + 1) * pi);
      if (hi > lo) folded.push_back(Interval{lo - k * pi, hi - k * pi});
    }
  }
  return ArcSet::from_arcs(folded);
}

// Record format for replay: a header line then one grain per row as
// "rho,theta,radius" with round-trip-exact decimal fields.
inline void write_grain_rows(std::ostream& os, const Configuration& c) {
  os << "rho,theta,radius\n";
  char buf[96];
  for (const Grain& g : c.grains) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.center.rho, g.center.theta,
                  g.radius);
    os << buf;
  }
}

inline std::vector<Grain> read_grain_rows(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("rho,theta,radius", 0) != 0)
    throw validation_error("grain rows: missing header");
  std::vector<Grain> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double rho, theta, radius;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &rho, &theta, &radius) != 3)
      throw validation_error("grain rows: malformed row '" + line + "'");
    out.push_back(Grain{HPoint{rho, theta}, radius});
  }
  return out;
}

}  // namespace hypvis
