#pragma once

// Grain-radius distributions: a constant radius, a two-point mixture, and a
// truncated exponential.  The exponential law needs rate beta > 1 so that
// E[e^R] is finite, and is cut at quantile q (default 1 - 1e-6); the discarded
// tail mass is reported in experiment outputs.

#include <cmath>
#include <string>

#include "hypvis/errors.hpp"
#include "hypvis/rng.hpp"

namespace hypvis {

struct RadiusLaw {
  enum class Kind { constant, two_point, exponential };

  Kind kind = Kind::constant;
  double R = 1.0;                 // constant
  double r1 = 0.5, p = 0.5, r2 = 1.0;  // two_point: r1 w.p. p, else r2
  double beta = 2.0, q = 1.0 - 1e-6;   // exponential(rate beta) truncated at quantile q

  static RadiusLaw constant(double R) {
    RadiusLaw l;
    l.kind = Kind::constant;
    l.R = R;
    return l;
  }
  static RadiusLaw two_point(double r1, double p, double r2) {
    RadiusLaw l;
    l.kind = Kind::two_point;
    l.r1 = r1;
    l.p = p;
    l.r2 = r2;
    return l;
  }
  static RadiusLaw exponential(double beta, double q = 1.0 - 1e-6) {
    RadiusLaw l;
    l.kind = Kind::exponential;
    l.beta = beta;
    l.q = q;
    return l;
  }

  void validate() const {
    switch (kind) {
      case Kind::constant:
        if (!(R > 0)) throw validation_error("radius law: constant R must be > 0");
        break;
      case Kind::two_point:
        if (!(r1 > 0) || !(r2 > 0)) throw validation_error("radius law: radii must be > 0");
        if (!(p >= 0 && p <= 1)) throw validation_error("radius law: p must be in [0, 1]");
        break;
      case Kind::exponential:
        if (!(beta > 1))
          throw validation_error("radius law: exponential rate must be > 1 (E[e^R] finite)");
        if (!(q > 0 && q < 1)) throw validation_error("radius law: truncation quantile in (0, 1)");
        break;
    }
  }

  // Truncation point of the exponential variant (radii are <= this).
  double trunc_point() const { return -std::log1p(-q) / beta; }

  double r_max() const {
    switch (kind) {
      case Kind::constant: return R;
      case Kind::two_point: return std::max(r1, r2);
      case Kind::exponential: return trunc_point();
    }
    return 0.0;
  }

  double tail_mass() const { return kind == Kind::exponential ? 1.0 - q : 0.0; }

  // E[sinh R]; for the truncated exponential this is the exact integral of
  // sinh against the renormalized density beta e^{-beta r} / q on [0, X_q].
  double mean_sinh() const {
    switch (kind) {
      case Kind::constant: return std::sinh(R);
      case Kind::two_point: return p * std::sinh(r1) + (1.0 - p) * std::sinh(r2);
      case Kind::exponential: {
        double X = trunc_point();
        double lo = (1.0 - std::exp(-(beta - 1.0) * X)) / (2.0 * (beta - 1.0));
        double hi = (1.0 - std::exp(-(beta + 1.0) * X)) / (2.0 * (beta + 1.0));
        return beta / q * (lo - hi);
      }
    }
    return 0.0;
  }

  double mean_cosh() const {
    switch (kind) {
      case Kind::constant: return std::cosh(R);
      case Kind::two_point: return p * std::cosh(r1) + (1.0 - p) * std::cosh(r2);
      case Kind::exponential: {
        double X = trunc_point();
        double lo = (1.0 - std::exp(-(beta - 1.0) * X)) / (2.0 * (beta - 1.0));
        double hi = (1.0 - std::exp(-(beta + 1.0) * X)) / (2.0 * (beta + 1.0));
        return beta / q * (lo + hi);
      }
    }
    return 0.0;
  }

  // Constant law consumes no randomness; the other variants consume exactly
  // one uniform per draw (the streaming sampler relies on this).
  double sample(Xoshiro256ss& g) const {
    switch (kind) {
      case Kind::constant: return R;
      case Kind::two_point: return g.uniform() < p ? r1 : r2;
      case Kind::exponential: return -std::log1p(-g.uniform() * q) / beta;
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case Kind::constant: return "constant";
      case Kind::two_point: return "two-point";
      case Kind::exponential: return "exponential";
    }
    return "?";
  }
};

}  // namespace hypvis
