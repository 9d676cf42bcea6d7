#pragma once

// Built-in end-to-end checks: geometry identities, sampler distribution
// tests, dimension-estimator oracles, quadrature pins, and the occupied-phase
// exponent residual.  Deterministic given the seed; every threshold sits at
// the 1% level or far beyond it, so a failure indicates a defect, not noise.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hypvis/analytic.hpp"
#include "hypvis/arcset.hpp"
#include "hypvis/dimension.hpp"
#include "hypvis/experiments.hpp"
#include "hypvis/geometry.hpp"
#include "hypvis/io.hpp"
#include "hypvis/quadrature.hpp"
#include "hypvis/rng.hpp"
#include "hypvis/sampler.hpp"
#include "hypvis/stats.hpp"

namespace hypvis {

struct SelfTestCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelfTestReport {
  std::vector<SelfTestCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline SelfTestReport run_selftest(std::uint64_t seed_base) {
  SelfTestReport rep;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    rep.checks.push_back(SelfTestCheck{name, pass, detail});
  };
  auto gen = [&](std::uint64_t k) { return rng_stream(seed_base, streams::selftest, k); };

  {  // distance identities: antipodal doubling and collinear differencing
    auto g = gen(0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      double a = g.uniform(0.0, 5.0), b = g.uniform(0.0, 5.0), th = g.uniform(0.0, two_pi);
      worst = std::max(worst, std::abs(dist(HPoint{a, th}, HPoint{a, th + pi}) - 2.0 * a));
      worst = std::max(worst, std::abs(dist(HPoint{a, th}, HPoint{b, th}) - std::abs(a - b)));
    }
    add("distance identities", worst <= 1e-9, "max deviation " + fmt17(worst));
  }

  {  // ball-ray interval endpoints land on the grain boundary
    auto g = gen(1);
    double worst = 0.0;
    int tested = 0;
    for (int i = 0; i < 2000; ++i) {
      Grain gr{HPoint{g.uniform(0.0, 4.0), g.uniform(0.0, two_pi)}, g.uniform(0.05, 1.5)};
      RaySegment seg{g.uniform(0.0, two_pi), g.uniform(0.5, 4.0)};
      auto iv = ball_ray_interval(gr, seg);
      if (!iv) continue;
      for (double t : {iv->lo, iv->hi}) {
        if (t < 1e-6 || t > seg.length - 1e-6) continue;  // clipped, not a true endpoint
        ++tested;
        worst = std::max(worst,
                         std::abs(dist(point_on_ray(seg.theta0, t), gr.center) - gr.radius));
      }
    }
    add("ball-ray interval endpoints", tested > 100 && worst <= 1e-8,
        "max boundary error " + fmt17(worst) + " over " + std::to_string(tested) + " endpoints");
  }

  {  // closed-form blocking half-width vs bisection
    auto g = gen(2);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      double rho = g.uniform(0.05, 5.0);
      double R = g.uniform(0.0, 1.0) * 0.9 * rho + 1e-3;
      if (R >= rho) continue;
      Grain gr{HPoint{rho, g.uniform(0.0, two_pi)}, R};
      double L = g.uniform(0.5, 4.0);
      worst = std::max(worst,
                       std::abs(blocking_halfwidth(gr, L) - blocking_halfwidth_bisect(gr, L)));
    }
    add("blocking half-width vs bisection", worst <= 1e-8, "max deviation " + fmt17(worst));
  }

  {  // radial law KS + angular chi-square at the 1% level
    auto g = gen(3);
    const double rho_w = 3.0;
    const int N = 100000;
    Window w{rho_w};
    std::vector<double> radii(N);
    std::vector<std::uint64_t> bins(36, 0);
    for (int i = 0; i < N; ++i) {
      HPoint p = sample_point(w, g);
      radii[i] = p.rho;
      bins[std::min<std::size_t>(35, std::size_t(p.theta / two_pi * 36.0))]++;
    }
    double span = std::cosh(rho_w) - 1.0;
    double D = ks_statistic(radii, [&](double x) { return (std::cosh(x) - 1.0) / span; });
    double crit = ks_critical_1pct / std::sqrt(double(N));
    add("radial law KS (1%)", D <= crit, "D " + fmt17(D) + " critical " + fmt17(crit));
    double c2 = chi2_uniform(bins, double(N));
    add("angle uniformity chi-square (1%)", c2 <= chi2_crit_35dof_1pct,
        "chi2 " + fmt17(c2) + " critical " + fmt17(chi2_crit_35dof_1pct));
  }

  {  // Poisson grain count mean
    const double lambda = 0.2, rho_w = 5.0;
    const int reps = 2000;
    Window w{rho_w};
    double target = lambda * ball_area(rho_w);
    double sum = 0.0;
    for (int i = 0; i < reps; ++i) {
      auto g = gen(100 + std::uint64_t(i));
      sum += double(sample_count(lambda, w, g));
    }
    double mean = sum / reps;
    double tol = 4.0 * std::sqrt(target / reps);
    add("Poisson count mean", std::abs(mean - target) <= tol,
        "mean " + fmt17(mean) + " target " + fmt17(target) + " tol " + fmt17(tol));
  }

  {  // dimension estimator: Cantor set and the degenerate extremes
    std::vector<double> ladder;
    for (int k = 2; k <= 7; ++k) ladder.push_back(std::pow(3.0, -k));
    double dim = minkowski_dimension(cantor_arcset(8), ladder).dimension;
    const double target = 0.63092975357145744;  // log 2 / log 3
    add("Cantor dimension", std::abs(dim - target) <= 0.05,
        "estimate " + fmt17(dim) + " target " + fmt17(target));
    auto lad = geometric_ladder(0.25, 8);
    double full = minkowski_dimension(ArcSet::full_circle(), lad).dimension;
    double point = minkowski_dimension(ArcSet::from_arcs({{1.0, 1.0}}), lad).dimension;
    add("degenerate arc dimensions", full >= 0.98 && point <= 0.02,
        "full circle " + fmt17(full) + " single point " + fmt17(point));
  }

  {  // quadrature pin and the occupied kernel's exact mass
    double I = detail::g_integral(0.5, 1.0, 1e-10);
    const double pin = 0.54668725315974283;
    bool ok1 = std::abs(I - pin) <= 1e-9;
    double s = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, pi, 1e-10);
    bool ok2 = std::abs(s - 2.0) <= 1e-9;
    detail::GSubCumulative K(1.0, 1e-10);
    double mass = detail::phi_occupied(0.0, 0.3, 1.0, KernelMode::density, K);
    double exact = -std::expm1(-0.3 * ball_area(1.0));
    bool ok3 = std::abs(mass - exact) <= 1e-6;
    add("quadrature pins and kernel mass", ok1 && ok2 && ok3,
        "profile integral err " + fmt17(I - pin) + ", sine err " + fmt17(s - 2.0) +
            ", mass err " + fmt17(mass - exact));
  }

  {  // occupied exponent: pinned value and recomputed residual
    AlphaValue a = alpha_occupied(0.3, 1.0);
    const double pin = 0.602135124596;
    detail::GSubCumulative K(1.0, 1e-10);
    double resid = detail::phi_occupied(a.value, 0.3, 1.0, KernelMode::density, K) - 1.0;
    add("occupied exponent root", std::abs(a.value - pin) <= 5e-6 && std::abs(resid) <= 2e-8,
        "alpha " + fmt17(a.value) + " residual " + fmt17(resid));
  }

  return rep;
}

}  // namespace hypvis
