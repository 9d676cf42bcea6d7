#pragma once

// Deterministic, platform-independent random numbers.  The standard library's
// distributions are implementation-defined, which would break the byte-level
// reproducibility contract, so the few generators needed are hand-rolled:
// xoshiro256** streams keyed by (base, stream, index) through splitmix64, and
// a Poisson sampler (inversion below mean 10, transformed rejection above).

#include <array>
#include <cmath>
#include <cstdint>

#include "hypvis/errors.hpp"

namespace hypvis {

struct SplitMix64 {
  std::uint64_t state = 0;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

class Xoshiro256ss {
 public:
  Xoshiro256ss() : s_{1, 2, 3, 4} {}
  Xoshiro256ss(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) : s_{a, b, c, d} {}

  std::uint64_t next() {
    std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Stream derivation contract: the returned generator is a pure function of
// (base, stream, index) -- identical triples give identical sequences on every
// platform, thread schedule, and worker count.
inline Xoshiro256ss rng_stream(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  SplitMix64 sm{base};
  std::uint64_t a = sm.next();
  sm.state = a ^ (0x9E3779B97F4A7C15ull * (stream + 1));
  std::uint64_t b = sm.next();
  sm.state = b ^ (0xC2B2AE3D27D4EB4Full * (index + 1));
  return Xoshiro256ss(sm.next(), sm.next(), sm.next(), sm.next());
}

namespace detail {
// log(k!) -- exact cumulative table below 31, Stirling series beyond
// (absolute error < 3e-14 at k >= 30).
inline double log_factorial(std::uint64_t k) {
  static const std::array<double, 31> table = [] {
    std::array<double, 31> t{};
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(double(i));
    return t;
  }();
  if (k < table.size()) return table[k];
  double x = double(k);
  double inv = 1.0 / x, inv2 = inv * inv;
  return 0.5 * std::log(2.0 * 3.14159265358979323846 * x) + x * (std::log(x) - 1.0) +
         inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}
}  // namespace detail

// Exact Poisson draw.  Mean below 10: product-of-uniforms inversion; above:
// transformed rejection with squeeze (Hormann's PTRS).  Guard at 1e9 mean.
inline std::uint64_t sample_poisson(Xoshiro256ss& g, double mean) {
  if (!(mean >= 0.0)) throw validation_error("sample_poisson: mean must be >= 0");
  if (mean > 1e9) throw numerical_error("sample_poisson: mean exceeds the 1e9 resource guard");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    double limit = std::exp(-mean), prod = 1.0;
    std::uint64_t k = 0;
    for (;;) {
      prod *= g.uniform();
      if (prod <= limit) return k;
      ++k;
    }
  }
  double slam = std::sqrt(mean), loglam = std::log(mean);
  double b = 0.931 + 2.53 * slam;
  double a = -0.059 + 0.02483 * b;
  double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double U = g.uniform() - 0.5;
    double V = g.uniform();
    double us = 0.5 - std::abs(U);
    double kf = std::floor((2.0 * a / us + b) * U + mean + 0.43);
    if (us >= 0.07 && V <= vr) return std::uint64_t(kf);
    if (kf < 0.0 || (us < 0.013 && V > us)) continue;
    if (std::log(V) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + kf * loglam - detail::log_factorial(std::uint64_t(kf)))
      return std::uint64_t(kf);
  }
}

}  // namespace hypvis
