#pragma once

// Arc-set algebra on the direction circle [0, 2pi): union engine, parallel
// sets, intersection, rotation, complement.  Closed-set semantics throughout:
// degenerate point arcs are legal, touching arcs merge, and complements are
// taken up to closure (a removed point does not survive).

#include <algorithm>
#include <cmath>
#include <vector>

#include "hypvis/errors.hpp"
#include "hypvis/geometry.hpp"

namespace hypvis {

// Reusable circular-union engine (the hot path of the visibility experiments
// keeps one instance per worker to avoid reallocating).
//
// Input arcs are intervals (lo, hi), hi >= lo, in any angular frame; widths
// above 2pi mean "everything".  The union is computed in a frame rotated so
// that the first arc starts at 0 -- a point known to be covered -- which turns
// the circular problem into a linear sweep: arcs crossing 2pi are split, the
// pieces sorted and merged by running maximum, and a final cluster reaching
// 2pi is glued back onto the first one (its lo then goes negative).
class ArcUnioner {
 public:
  // Returns true when the union covers the whole circle.
  bool unite(const std::vector<Interval>& raw) {
    clusters_.clear();
    pieces_.clear();
    full_ = false;
    anchor_ = 0.0;
    if (raw.empty()) return false;
    anchor_ = wrap_angle(raw.front().lo);
    bool first = true;
    for (const Interval& a : raw) {
      double w = a.hi - a.lo;
      if (w >= two_pi) {
        full_ = true;
        clusters_.assign(1, Interval{0.0, two_pi});
        return true;
      }
      // The first arc starts exactly at the anchor; forcing s = 0 keeps the
      // sweep's "position 0 is covered" precondition immune to wrap round-off.
      double s = first ? 0.0 : wrap_angle(a.lo - anchor_);
      first = false;
      double e = s + w;
      if (e > two_pi) {
        pieces_.push_back(Interval{s, two_pi});
        pieces_.push_back(Interval{0.0, e - two_pi});
      } else {
        pieces_.push_back(Interval{s, e});
      }
    }
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    double cs = pieces_.front().lo, ce = pieces_.front().hi;
    for (size_t i = 1; i < pieces_.size(); ++i) {
      if (pieces_[i].lo > ce) {
        clusters_.push_back(Interval{cs, ce});
        cs = pieces_[i].lo;
        ce = pieces_[i].hi;
      } else {
        ce = std::max(ce, pieces_[i].hi);
      }
    }
    clusters_.push_back(Interval{cs, ce});
    if (clusters_.size() >= 2 && clusters_.back().hi >= two_pi) {
      clusters_.front().lo = clusters_.back().lo - two_pi;
      clusters_.pop_back();
    }
    if (clusters_.size() == 1 && clusters_.front().width() >= two_pi) {
      full_ = true;
      clusters_.assign(1, Interval{0.0, two_pi});
    }
    return full_;
  }

  bool full() const { return full_; }
  double anchor() const { return anchor_; }
  // Clusters in the rotated frame; the first may have lo < 0 when the union
  // wraps through the anchor.
  const std::vector<Interval>& clusters() const { return clusters_; }

  double covered_length() const {
    if (full_) return two_pi;
    double t = 0.0;
    for (const Interval& c : clusters_) t += c.width();
    return std::min(t, two_pi);
  }

  // Appends the complementary arcs (the circular gaps between clusters) in
  // absolute coordinates.  Empty input union => the whole circle.
  void gaps_absolute(std::vector<Interval>& out) const {
    if (full_) return;
    if (clusters_.empty()) {
      out.push_back(Interval{0.0, two_pi});
      return;
    }
    size_t k = clusters_.size();
    for (size_t i = 0; i < k; ++i) {
      double gs = clusters_[i].hi;
      double ge = (i + 1 < k) ? clusters_[i + 1].lo : clusters_.front().lo + two_pi;
      if (ge > gs) {
        double lo = wrap_angle(gs + anchor_);
        out.push_back(Interval{lo, lo + (ge - gs)});
      }
    }
  }

 private:
  std::vector<Interval> pieces_;
  std::vector<Interval> clusters_;
  double anchor_ = 0.0;
  bool full_ = false;
};

// Finite union of disjoint closed arcs on the circle of circumference 2pi.
// Normalized representation: sorted by lo in [0, 2pi), positive gaps between
// consecutive arcs, at most one arc wrapping past 2pi (stored last, hi > 2pi).
// The full circle is the single arc [0, 2pi].
class ArcSet {
 public:
  ArcSet() = default;

  static ArcSet empty_set() { return ArcSet(); }

  static ArcSet full_circle() {
    ArcSet a;
    a.arcs_.push_back(Interval{0.0, two_pi});
    return a;
  }

  // Builds the normalized union of arbitrary arcs (any frame, overlaps fine).
  static ArcSet from_arcs(const std::vector<Interval>& raw) {
    ArcSet out;
    if (raw.empty()) return out;
    ArcUnioner u;
    if (u.unite(raw)) return full_circle();
    out.arcs_.reserve(u.clusters().size());
    for (const Interval& c : u.clusters()) {
      double lo = wrap_angle(c.lo + u.anchor());
      out.arcs_.push_back(Interval{lo, lo + c.width()});
    }
    std::sort(out.arcs_.begin(), out.arcs_.end(),
              [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    return out;
  }

  const std::vector<Interval>& arcs() const { return arcs_; }
  bool empty() const { return arcs_.empty(); }
  bool full() const { return arcs_.size() == 1 && arcs_.front().width() >= two_pi; }

 private:
  std::vector<Interval> arcs_;
};

inline double total_length(const ArcSet& a) {
  double t = 0.0;
  for (const Interval& arc : a.arcs()) t += arc.width();
  return std::min(t, two_pi);
}

inline ArcSet parallel_set(const ArcSet& a, double delta) {
  if (delta < 0) throw validation_error("parallel_set: delta must be >= 0");
  if (a.empty()) return a;
  std::vector<Interval> raw;
  raw.reserve(a.arcs().size());
  for (const Interval& arc : a.arcs()) raw.push_back(Interval{arc.lo - delta, arc.hi + delta});
  return ArcSet::from_arcs(raw);
}

inline ArcSet rotate(const ArcSet& a, double phi) {
  if (a.empty()) return a;
  std::vector<Interval> raw;
  raw.reserve(a.arcs().size());
  for (const Interval& arc : a.arcs()) raw.push_back(Interval{arc.lo + phi, arc.hi + phi});
  return ArcSet::from_arcs(raw);
}

namespace detail {
// Splits wrap arcs so every piece lies inside [0, 2pi]; sorted by lo.
inline std::vector<Interval> unroll(const ArcSet& s) {
  std::vector<Interval> v;
  v.reserve(s.arcs().size() + 1);
  for (const Interval& a : s.arcs()) {
    if (a.hi > two_pi) {
      v.push_back(Interval{a.lo, two_pi});
      v.push_back(Interval{0.0, a.hi - two_pi});
    } else {
      v.push_back(a);
    }
  }
  std::sort(v.begin(), v.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  return v;
}
}  // namespace detail

inline ArcSet intersect(const ArcSet& a, const ArcSet& b) {
  if (a.empty() || b.empty()) return ArcSet::empty_set();
  std::vector<Interval> fa = detail::unroll(a), fb = detail::unroll(b);
  std::vector<Interval> out;
  size_t i = 0, j = 0;
  while (i < fa.size() && j < fb.size()) {
    double lo = std::max(fa[i].lo, fb[j].lo);
    double hi = std::min(fa[i].hi, fb[j].hi);
    if (hi >= lo) out.push_back(Interval{lo, hi});  // closed sets: keep touch points
    (fa[i].hi < fb[j].hi ? i : j)++;
  }
  return ArcSet::from_arcs(out);
}

inline ArcSet complement(const ArcSet& a) {
  if (a.empty()) return ArcSet::full_circle();
  if (a.full()) return ArcSet::empty_set();
  const std::vector<Interval>& arcs = a.arcs();
  std::vector<Interval> gaps;
  size_t k = arcs.size();
  gaps.reserve(k);
  for (size_t i = 0; i < k; ++i) {
    double gs = arcs[i].hi;
    double ge = (i + 1 < k) ? arcs[i + 1].lo : arcs.front().lo + two_pi;
    if (ge >= gs) gaps.push_back(Interval{gs, ge});
  }
  return ArcSet::from_arcs(gaps);
}

// Depth-n middle-thirds construction on an arc of length 1: 2^n closed arcs of
// length 3^-n.  Self-test oracle for the dimension estimator.
inline ArcSet cantor_arcset(int depth) {
  if (depth < 1 || depth > 20)
    throw validation_error("cantor_arcset: depth must be in [1, 20]");
  std::vector<Interval> cur{Interval{0.0, 1.0}};
  for (int d = 0; d < depth; ++d) {
    std::vector<Interval> next;
    next.reserve(cur.size() * 2);
    for (const Interval& iv : cur) {
      double w = iv.width() / 3.0;
      next.push_back(Interval{iv.lo, iv.lo + w});
      next.push_back(Interval{iv.hi - w, iv.hi});
    }
    cur.swap(next);
  }
  return ArcSet::from_arcs(cur);
}

}  // namespace hypvis
