#pragma once

// Small statistics kit: running moments, line fits (ordinary and
// known-variance weighted), Kolmogorov-Smirnov statistic, chi-square.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hypvis/errors.hpp"

namespace hypvis {

struct Accum {
  double s = 0.0, s2 = 0.0;
  std::uint64_t n = 0;
  void add(double x) {
    s += x;
    s2 += x * x;
    ++n;
  }
  void merge(const Accum& o) {
    s += o.s;
    s2 += o.s2;
    n += o.n;
  }
  double mean() const { return n ? s / double(n) : 0.0; }
  double var() const {
    if (n < 2) return 0.0;
    double m = mean();
    return std::max(0.0, (s2 - double(n) * m * m) / double(n - 1));
  }
  double stderr_mean() const { return n ? std::sqrt(var() / double(n)) : 0.0; }
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares; slope stderr from the residual variance.
inline LineFit ols_line(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  if (n != y.size() || n < 2) throw validation_error("ols_line: need >= 2 matched points");
  double xm = 0, ym = 0;
  for (size_t i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= double(n);
  ym /= double(n);
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (sxx <= 0) throw validation_error("ols_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  if (n > 2) {
    double ssr = 0;
    for (size_t i = 0; i < n; ++i) {
      double r = y[i] - (f.intercept + f.slope * x[i]);
      ssr += r * r;
    }
    f.slope_stderr = std::sqrt(std::max(0.0, ssr / double(n - 2)) / sxx);
  }
  return f;
}

// Weighted least squares with known per-point variances var_y[i]; the slope
// standard error is the exact propagation sqrt(1 / sum w (x - xbar_w)^2).
inline LineFit wls_line(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& var_y) {
  size_t n = x.size();
  if (n != y.size() || n != var_y.size() || n < 2)
    throw validation_error("wls_line: need >= 2 matched points");
  double sw = 0, swx = 0, swy = 0;
  for (size_t i = 0; i < n; ++i) {
    if (var_y[i] <= 0) throw validation_error("wls_line: variances must be > 0");
    double w = 1.0 / var_y[i];
    sw += w;
    swx += w * x[i];
    swy += w * y[i];
  }
  double xm = swx / sw, ym = swy / sw;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    double w = 1.0 / var_y[i];
    sxx += w * (x[i] - xm) * (x[i] - xm);
    sxy += w * (x[i] - xm) * (y[i] - ym);
  }
  if (sxx <= 0) throw validation_error("wls_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  f.slope_stderr = std::sqrt(1.0 / sxx);
  return f;
}

// Two-sided KS statistic sup |F_n - F| against a continuous CDF.
template <class Cdf>
inline double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) throw validation_error("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  double n = double(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double F = cdf(samples[i]);
    d = std::max(d, std::max(F - double(i) / n, double(i + 1) / n - F));
  }
  return d;
}

// Critical coefficient c so that the 1%-level KS threshold is c / sqrt(N).
inline constexpr double ks_critical_1pct = 1.6276236307187293;

// chi-square statistic for equiprobable bins.
inline double chi2_uniform(const std::vector<std::uint64_t>& counts, double total) {
  double e = total / double(counts.size());
  double c = 0.0;
  for (std::uint64_t o : counts) c += (double(o) - e) * (double(o) - e) / e;
  return c;
}

// 99th percentile of chi-square with 35 degrees of freedom (36 bins).
inline constexpr double chi2_crit_35dof_1pct = 57.342;

}  // namespace hypvis
