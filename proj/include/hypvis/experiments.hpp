#pragma once

// Monte Carlo experiment harness: reproducible replicate-parallel runs of the
// visibility-rate, exponent-fit, dimension, and pair-correlation experiments,
// plus an end-to-end selftest.  Replicates are partitioned into fixed-size
// batches merged in batch order, so every aggregate -- and every output file
// -- is byte-identical for any worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hypvis/analytic.hpp"
#include "hypvis/arcset.hpp"
#include "hypvis/config.hpp"
#include "hypvis/dimension.hpp"
#include "hypvis/geometry.hpp"
#include "hypvis/io.hpp"
#include "hypvis/model.hpp"
#include "hypvis/sampler.hpp"
#include "hypvis/stats.hpp"

namespace hypvis {

inline constexpr const char* version_string = "hypvis 1.0.0";

// Each experiment family draws from its own stream, so one base seed never
// correlates replicates across subcommands.
namespace streams {
inline constexpr std::uint64_t frate = 1;  // alpha-fit replays this stream
inline constexpr std::uint64_t visibility = 2;
inline constexpr std::uint64_t lines = 3;
inline constexpr std::uint64_t pairs = 4;
inline constexpr std::uint64_t selftest = 9;
}  // namespace streams

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

// Runs fn(replicate, slot) for every replicate in [0, replicates), partitioned
// into fixed 256-replicate batches pulled by worker threads.  Results land in
// one slot per batch; callers fold the returned slots in index order, which
// fixes the floating-point reduction order independently of scheduling.
template <class Slot, class Fn>
std::vector<Slot> run_batches(std::uint64_t replicates, int workers, Fn&& fn) {
  constexpr std::uint64_t batch_size = 256;
  const std::uint64_t nb = (replicates + batch_size - 1) / batch_size;
  std::vector<Slot> slots(nb);
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr err;
  std::mutex err_mu;

  auto work = [&] {
    for (;;) {
      std::uint64_t b = next.fetch_add(1);
      if (b >= nb || failed.load()) return;
      std::uint64_t lo = b * batch_size;
      std::uint64_t hi = std::min(replicates, lo + batch_size);
      try {
        for (std::uint64_t rep = lo; rep < hi; ++rep) fn(rep, slots[b]);
      } catch (...) {
        std::lock_guard<std::mutex> g(err_mu);
        if (!failed.exchange(true)) err = std::current_exception();
        return;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return slots;
}

// Samples replicate `rep` over the full window but keeps only grains able to
// reach within keep_depth of o (cosh rho <= cosh(keep_depth + radius)).  All
// point/segment/visibility queries at depths <= keep_depth are unchanged by
// the discard, and the acosh is paid only for survivors.
inline Configuration pruned_configuration(const ExperimentConfig& cfg, const Seed& seed,
                                          std::uint64_t rep, double keep_depth) {
  Configuration c;
  c.window = Window{cfg.window_rho()};
  c.lambda = cfg.lambda;
  c.law = cfg.law;
  const bool fixed = cfg.law.kind == RadiusLaw::Kind::constant;
  const double chD = std::cosh(keep_depth), shD = std::sinh(keep_depth);
  const double fixed_thresh = fixed ? std::cosh(keep_depth + cfg.law.R) : 0.0;
  for_each_grain(cfg.lambda, c.window, cfg.law, seed, rep,
                 [&](double csh, double theta, double rad) {
                   double thresh =
                       fixed ? fixed_thresh : chD * std::cosh(rad) + shD * std::sinh(rad);
                   if (csh <= thresh)
                     c.grains.push_back(Grain{HPoint{std::acosh(clamp_ge1(csh)), theta}, rad});
                   return true;
                 });
  return c;
}

// ---------------------------------------------------------------------------
// Containment rate f(r)

struct FrateRow {
  double depth = 0.0;
  std::uint64_t n = 0;
  std::uint64_t contained = 0;
  double fhat = 0.0;
  double se = 0.0;
  double f_ref = nan_value;    // analytic reference, vacant phase only
  double fm_mean = nan_value;  // paired first-moment difference, vacant only
  double fm_se = nan_value;
};

struct FrateResult {
  ExperimentConfig cfg;
  std::vector<FrateRow> rows;
  double window = 0.0;
  bool fm_ok = true;  // first-moment identity within 3 stderr on every vacant row
};

// f(r) = P(depth-r segment contained in the chosen phase), estimated per depth
// over independent configurations.  In the vacant phase each replicate also
// contributes the paired difference
//   length(visible arcs at r)/2pi - 1{segment at theta=0 contained},
// whose mean is exactly 0 (rotation invariance makes the angular measure an
// unbiased estimator of f); the 3-sigma check on it guards the arc machinery
// against the direct segment query.
inline FrateResult exp_frate(const ExperimentConfig& cfg) {
  cfg.validate();
  FrateResult out;
  out.cfg = cfg;
  out.window = cfg.window_rho();
  const Seed seed{cfg.seed, streams::frate};
  const std::size_t nd = cfg.depths.size();
  const double keep = *std::max_element(cfg.depths.begin(), cfg.depths.end());
  const bool vacant = cfg.phase == Phase::vacant;

  struct Slot {
    std::vector<std::uint64_t> contained;
    std::vector<Accum> fm;
  };
  auto slots = run_batches<Slot>(
      cfg.replicates, cfg.workers, [&](std::uint64_t rep, Slot& s) {
        if (s.contained.empty()) {
          s.contained.assign(nd, 0);
          s.fm.assign(nd, Accum{});
        }
        Configuration c = pruned_configuration(cfg, seed, rep, keep);
        for (std::size_t i = 0; i < nd; ++i) {
          RaySegment seg{0.0, cfg.depths[i]};
          bool in = vacant ? segment_in_vacant(c, seg) : segment_in_occupied(c, seg);
          if (in) ++s.contained[i];
          if (vacant) {
            double frac = total_length(visible_arcs_vacant(c, cfg.depths[i])) / two_pi;
            s.fm[i].add(frac - (in ? 1.0 : 0.0));
          }
        }
      });

  std::vector<std::uint64_t> contained(nd, 0);
  std::vector<Accum> fm(nd);
  for (const auto& s : slots) {
    if (s.contained.empty()) continue;
    for (std::size_t i = 0; i < nd; ++i) {
      contained[i] += s.contained[i];
      fm[i].merge(s.fm[i]);
    }
  }

  const double N = double(cfg.replicates);
  for (std::size_t i = 0; i < nd; ++i) {
    FrateRow row;
    row.depth = cfg.depths[i];
    row.n = cfg.replicates;
    row.contained = contained[i];
    row.fhat = double(contained[i]) / N;
    row.se = std::sqrt(row.fhat * (1.0 - row.fhat) / N);
    if (vacant) {
      row.f_ref = f_vacant_law(cfg.lambda, cfg.law, row.depth);
      row.fm_mean = fm[i].mean();
      row.fm_se = fm[i].stderr_mean();
      if (std::abs(row.fm_mean) > 3.0 * row.fm_se + 1e-15) out.fm_ok = false;
    }
    out.rows.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exponent fit from containment rates

struct AlphaFitResult {
  FrateResult base;
  AlphaFit fit;
  AlphaValue reference{};  // analytic alpha when the model admits one
  bool have_reference = false;
};

inline AlphaFitResult exp_alpha_fit(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.depths.size() < 4)
    throw validation_error("alpha fit needs >= 4 probe depths");
  AlphaFitResult out;
  out.base = exp_frate(cfg);
  std::vector<AlphaFitPoint> pts;
  pts.reserve(out.base.rows.size());
  for (const FrateRow& row : out.base.rows) {
    if (row.contained == 0)
      throw validation_error("no containment events at depth " + fmt17(row.depth) +
                             "; reduce the largest probe depth or increase mc.replicates");
    pts.push_back(AlphaFitPoint{row.depth, row.fhat, row.se});
  }
  out.fit = fit_alpha(pts);
  if (cfg.phase == Phase::vacant) {
    out.reference = alpha_vacant(cfg.lambda, cfg.law);
    out.have_reference = true;
  } else if (cfg.law.kind == RadiusLaw::Kind::constant) {
    out.reference = alpha_occupied(cfg.lambda, cfg.law.R);
    out.have_reference = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Visibility-set dimension (circle directions and line directions)

struct DimRow {
  double L = 0.0;
  std::uint64_t n = 0;
  std::uint64_t survived = 0;
  double survival = 0.0;
  double dim_mean = nan_value;  // over surviving replicates only
  double dim_se = nan_value;
  double dmin_mean = nan_value;  // resolution cutoff actually used
};

struct DimResult {
  ExperimentConfig cfg;
  std::vector<DimRow> rows;
  double alpha_model = nan_value;  // analytic exponent of the configured model
  bool have_alpha = false;
  double target_dim = nan_value;  // 1 - alpha (circle) or 1 - 2 alpha (lines)
  std::vector<Interval> sample_arcs;  // first surviving replicate, deepest L
  double sample_L = nan_value;
  std::uint64_t sample_rep = 0;
  bool have_sample = false;
  double window = 0.0;
};

namespace detail {

// Nearest-rank 1st percentile (the minimum for fewer than 101 values).
inline double percentile1(std::vector<double>& w) {
  std::sort(w.begin(), w.end());
  std::size_t k = (w.size() + 99) / 100;
  return w[k - 1];
}

// Shared engine for the circle and line dimension experiments; `fold` maps
// the visibility arcs to the set whose dimension is estimated.
template <class Fold>
DimResult exp_dim_core(const ExperimentConfig& cfg, std::uint64_t stream, bool lines_target,
                       Fold&& fold) {
  cfg.validate();
  DimResult out;
  out.cfg = cfg;
  out.window = cfg.window_rho();
  const Seed seed{cfg.seed, stream};
  const std::size_t nd = cfg.depths.size();
  const double keep = *std::max_element(cfg.depths.begin(), cfg.depths.end());
  const std::size_t sample_idx =
      std::max_element(cfg.depths.begin(), cfg.depths.end()) - cfg.depths.begin();
  const bool vacant = cfg.phase == Phase::vacant;
  const std::vector<double> full_ladder = geometric_ladder(cfg.delta0, cfg.rungs);

  if (vacant) {
    out.alpha_model = alpha_vacant(cfg.lambda, cfg.law).value;
    out.have_alpha = true;
  } else if (cfg.law.kind == RadiusLaw::Kind::constant) {
    out.alpha_model = alpha_occupied(cfg.lambda, cfg.law.R).value;
    out.have_alpha = true;
  }
  if (out.have_alpha)
    out.target_dim = lines_target ? 1.0 - 2.0 * out.alpha_model : 1.0 - out.alpha_model;

  struct Slot {
    std::vector<std::uint64_t> survived;
    std::vector<Accum> dim, dmin;
    std::uint64_t sample_rep = 0;
    std::vector<Interval> sample_arcs;
    bool have_sample = false;
  };
  auto slots = run_batches<Slot>(
      cfg.replicates, cfg.workers, [&](std::uint64_t rep, Slot& s) {
        if (s.survived.empty()) {
          s.survived.assign(nd, 0);
          s.dim.assign(nd, Accum{});
          s.dmin.assign(nd, Accum{});
        }
        Configuration c = pruned_configuration(cfg, seed, rep, keep);
        for (std::size_t i = 0; i < nd; ++i) {
          double L = cfg.depths[i];
          ArcSet vis = vacant ? visible_arcs_vacant(c, L)
                              : visible_dirs_occupied(c, L, cfg.grid_m);
          ArcSet target = fold(vis);
          if (target.empty()) continue;
          ++s.survived[i];
          std::vector<double> widths;
          widths.reserve(target.arcs().size());
          for (const Interval& a : target.arcs()) widths.push_back(a.width());
          double dmin = percentile1(widths);
          std::vector<double> ladder;
          for (double d : full_ladder)
            if (d >= dmin) ladder.push_back(d);
          if (ladder.size() < 4)
            ladder.assign(full_ladder.begin(), full_ladder.begin() + 4);
          DimensionEstimate est = minkowski_dimension(target, ladder);
          s.dim[i].add(est.dimension);
          s.dmin[i].add(dmin);
          if (i == sample_idx && !s.have_sample) {
            s.have_sample = true;
            s.sample_rep = rep;
            s.sample_arcs = target.arcs();
          }
        }
      });

  std::vector<std::uint64_t> survived(nd, 0);
  std::vector<Accum> dim(nd), dmin(nd);
  for (const auto& s : slots) {
    if (s.survived.empty()) continue;
    for (std::size_t i = 0; i < nd; ++i) {
      survived[i] += s.survived[i];
      dim[i].merge(s.dim[i]);
      dmin[i].merge(s.dmin[i]);
    }
    // batches are scanned in replicate order, so the first sample wins
    if (s.have_sample && !out.have_sample) {
      out.have_sample = true;
      out.sample_rep = s.sample_rep;
      out.sample_arcs = s.sample_arcs;
      out.sample_L = cfg.depths[sample_idx];
    }
  }

  for (std::size_t i = 0; i < nd; ++i) {
    DimRow row;
    row.L = cfg.depths[i];
    row.n = cfg.replicates;
    row.survived = survived[i];
    row.survival = double(survived[i]) / double(cfg.replicates);
    if (survived[i] > 0) {
      row.dim_mean = dim[i].mean();
      row.dim_se = dim[i].stderr_mean();
      row.dmin_mean = dmin[i].mean();
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace detail

// Dimension of the set of visible directions (conditioned on nonemptiness);
// theory predicts 1 - alpha for alpha < 1, empty beyond.
inline DimResult exp_visibility_dim(const ExperimentConfig& cfg) {
  return detail::exp_dim_core(cfg, streams::visibility, false,
                              [](const ArcSet& vis) { return vis; });
}

// Dimension of the set of fully visible lines through o.  Directions theta and
// theta + pi must both be visible; the folded set lives on [0, pi) and is
// stretched by 2 onto the circle before estimation (box dimension is invariant
// under the bi-Lipschitz doubling, and the stretch restores the correct
// wrap-around adjacency).  Theory predicts 1 - 2 alpha for alpha < 1/2.
inline DimResult exp_lines_dim(const ExperimentConfig& cfg) {
  return detail::exp_dim_core(cfg, streams::lines, true, [](const ArcSet& vis) {
    ArcSet folded = line_arcs(vis);
    std::vector<Interval> scaled;
    scaled.reserve(folded.arcs().size());
    for (const Interval& a : folded.arcs())
      scaled.push_back(Interval{2.0 * a.lo, 2.0 * a.hi});
    return ArcSet::from_arcs(scaled);
  });
}

// ---------------------------------------------------------------------------
// Pair correlation of direction visibility

struct PairRow {
  double psi = 0.0;  // angular separation of the second direction
  double rho = 0.0;  // chordal distance between the unit-circle points
  std::uint64_t n = 0;
  std::uint64_t both = 0;   // replicates with directions 0 and psi both visible
  double p2 = 0.0;
  double p2_se = 0.0;
  double ratio = nan_value;  // p2 / fhat^2
  double ratio_se = nan_value;
};

struct PairResult {
  ExperimentConfig cfg;
  double depth = 0.0;
  std::vector<PairRow> rows;
  std::uint64_t n1 = 0;  // replicates with direction 0 visible
  double fhat = 0.0;
  double f_se = 0.0;
  double f_ref = nan_value;
  double slope = nan_value;  // log ratio vs log rho
  double slope_se = nan_value;
  double window = 0.0;
};

// P(two directions separated by psi both visible to depth r) against the
// product of singles.  Blockers are reduced to their angular half-width once
// per grain; a direction is blocked iff it falls strictly inside some
// half-width, matching the strict-interior convention of segment_in_vacant.
inline PairResult exp_pair_correlation(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.phase != Phase::vacant)
    throw validation_error("pair correlation is defined for the vacant phase");
  if (cfg.separations.empty())
    throw validation_error("probe.separations must be nonempty");
  PairResult out;
  out.cfg = cfg;
  out.window = cfg.window_rho();
  out.depth = cfg.depths.front();
  const double r = out.depth;
  const Seed seed{cfg.seed, streams::pairs};
  const std::size_t ns = cfg.separations.size();
  const Window w{cfg.window_rho()};
  const bool fixed = cfg.law.kind == RadiusLaw::Kind::constant;
  const double chR = std::cosh(r), shR = std::sinh(r);
  const double fixed_thresh = fixed ? std::cosh(r + cfg.law.R) : 0.0;

  struct Blocker {
    double theta, psi;
  };
  struct Slot {
    std::uint64_t n1 = 0;
    std::vector<std::uint64_t> both;
  };
  auto slots = run_batches<Slot>(
      cfg.replicates, cfg.workers, [&](std::uint64_t rep, Slot& s) {
        if (s.both.empty()) s.both.assign(ns, 0);
        std::vector<Blocker> blockers;
        bool covered = false;
        for_each_grain(cfg.lambda, w, cfg.law, seed, rep,
                       [&](double csh, double theta, double rad) {
                         double thresh = fixed ? fixed_thresh
                                               : chR * std::cosh(rad) + shR * std::sinh(rad);
                         if (csh > thresh) return true;  // cannot reach the probe
                         double rho = std::acosh(clamp_ge1(csh));
                         if (rad >= rho) {
                           covered = true;  // grain over o blocks everything
                           return false;
                         }
                         double psi = blocking_halfwidth(Grain{HPoint{rho, theta}, rad}, r);
                         if (psi > 0.0) blockers.push_back(Blocker{theta, psi});
                         return true;
                       });
        if (covered) return;
        auto visible = [&](double dir) {
          for (const Blocker& b : blockers)
            if (std::abs(angle_diff(b.theta, dir)) < b.psi) return false;
          return true;
        };
        if (!visible(0.0)) return;
        ++s.n1;
        for (std::size_t j = 0; j < ns; ++j)
          if (visible(cfg.separations[j])) ++s.both[j];
      });

  std::vector<std::uint64_t> both(ns, 0);
  for (const auto& s : slots) {
    out.n1 += s.n1;
    if (s.both.empty()) continue;
    for (std::size_t j = 0; j < ns; ++j) both[j] += s.both[j];
  }

  const double N = double(cfg.replicates);
  out.fhat = double(out.n1) / N;
  out.f_se = std::sqrt(out.fhat * (1.0 - out.fhat) / N);
  out.f_ref = f_vacant_law(cfg.lambda, cfg.law, r);

  std::vector<double> xs, ys, vars;
  for (std::size_t j = 0; j < ns; ++j) {
    PairRow row;
    row.psi = cfg.separations[j];
    row.rho = dist(HPoint{1.0, 0.0}, HPoint{1.0, row.psi});
    row.n = cfg.replicates;
    row.both = both[j];
    row.p2 = double(both[j]) / N;
    row.p2_se = std::sqrt(row.p2 * (1.0 - row.p2) / N);
    if (both[j] > 0 && out.n1 > 0) {
      row.ratio = row.p2 / (out.fhat * out.fhat);
      // delta method on log(p2) - 2 log(f); the shared-events nesting cancels
      // the covariance term, leaving relvar(ratio) = (1 - p2) / (N p2)
      double relvar = (1.0 - row.p2) / (N * row.p2);
      row.ratio_se = row.ratio * std::sqrt(relvar);
      if (row.rho > 0.0 && relvar > 0.0) {
        xs.push_back(std::log(row.rho));
        ys.push_back(std::log(row.ratio));
        vars.push_back(relvar);
      }
    }
    out.rows.push_back(row);
  }
  if (xs.size() >= 2) {
    LineFit f = wls_line(xs, ys, vars);
    out.slope = f.slope;
    out.slope_se = f.slope_stderr;
  }
  return out;
}

}  // namespace hypvis
