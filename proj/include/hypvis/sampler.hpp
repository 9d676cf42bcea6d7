#pragma once

// Poisson sampling under hyperbolic area measure inside a disk window around
// o.  Radial inversion: Area(B(o, rho)) grows like cosh rho - 1, so
// cosh rho = 1 + U (cosh rho_w - 1) is an exact draw; theta is uniform.

#include <cstdint>
#include <vector>

#include "hypvis/errors.hpp"
#include "hypvis/geometry.hpp"
#include "hypvis/radius_law.hpp"
#include "hypvis/rng.hpp"

namespace hypvis {

struct Window {
  double rho_w = 1.0;
};

struct Seed {
  std::uint64_t base = 0;
  std::uint64_t stream = 0;
};

inline Xoshiro256ss replicate_stream(const Seed& s, std::uint64_t replicate) {
  return rng_stream(s.base, s.stream, replicate);
}

inline std::uint64_t sample_count(double lambda, const Window& w, Xoshiro256ss& g) {
  if (!(lambda >= 0)) throw validation_error("sample_count: lambda must be >= 0");
  return sample_poisson(g, lambda * ball_area(w.rho_w));
}

inline HPoint sample_point(const Window& w, Xoshiro256ss& g) {
  double csh = 1.0 + g.uniform() * (std::cosh(w.rho_w) - 1.0);
  double theta = g.uniform(0.0, two_pi);
  return HPoint{std::acosh(clamp_ge1(csh)), theta};
}

struct Configuration {
  std::vector<Grain> grains;
  Window window;
  double lambda = 0.0;
  RadiusLaw law;
};

inline Configuration sample_configuration(double lambda, const Window& w, const RadiusLaw& law,
                                          const Seed& seed, std::uint64_t replicate = 0) {
  Configuration c;
  c.window = w;
  c.lambda = lambda;
  c.law = law;
  Xoshiro256ss g = replicate_stream(seed, replicate);
  std::uint64_t n = sample_count(lambda, w, g);
  c.grains.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    HPoint p = sample_point(w, g);
    double r = law.sample(g);
    c.grains.push_back(Grain{p, r});
  }
  return c;
}

// Streaming mirror of sample_configuration for the Monte Carlo hot paths: the
// visitor receives (cosh rho, theta, radius) per grain -- no acosh, no grain
// vector.  Draw order is identical to sample_configuration, so the same
// (seed, replicate) produces the same grains.  Returning false stops early;
// the remainder of this replicate's private stream is simply unused.
template <class Visit>
inline void for_each_grain(double lambda, const Window& w, const RadiusLaw& law, const Seed& seed,
                           std::uint64_t replicate, Visit&& visit) {
  Xoshiro256ss g = replicate_stream(seed, replicate);
  std::uint64_t n = sample_count(lambda, w, g);
  double span = std::cosh(w.rho_w) - 1.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    double csh = 1.0 + g.uniform() * span;
    double theta = g.uniform(0.0, two_pi);
    double r = law.sample(g);
    if (!visit(csh, theta, r)) return;
  }
}

}  // namespace hypvis
