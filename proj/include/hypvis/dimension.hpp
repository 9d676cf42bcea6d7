#pragma once

// Minkowski (box) dimension of circle subsets via the parallel-set length
// slope: dim = 1 - d log length(S(delta)) / d log delta, estimated by least
// squares over a finite geometric ladder of scales.

#include <cmath>
#include <vector>

#include "hypvis/arcset.hpp"
#include "hypvis/errors.hpp"
#include "hypvis/stats.hpp"

namespace hypvis {

struct DimensionEstimate {
  double dimension = 0.0;  // 1 - slope, clamped to [0, 1]
  double slope = 0.0;      // raw regression slope
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::vector<double> scales;  // the delta ladder actually used
};

inline std::vector<double> geometric_ladder(double delta0, int rungs) {
  if (delta0 <= 0) throw validation_error("geometric_ladder: delta0 must be > 0");
  if (rungs < 1) throw validation_error("geometric_ladder: rungs must be >= 1");
  std::vector<double> v(rungs);
  double d = delta0;
  for (int k = 0; k < rungs; ++k, d *= 0.5) v[k] = d;
  return v;
}

inline DimensionEstimate minkowski_dimension(const ArcSet& a, const std::vector<double>& ladder) {
  if (a.empty())
    throw validation_error("minkowski_dimension: undefined for the empty set");
  if (ladder.size() < 4)
    throw validation_error("minkowski_dimension: need >= 4 scales");
  for (size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] <= 0) throw validation_error("minkowski_dimension: scales must be > 0");
    if (i && ladder[i] >= ladder[i - 1])
      throw validation_error("minkowski_dimension: scales must be strictly decreasing");
  }
  std::vector<double> xs(ladder.size()), ys(ladder.size());
  for (size_t i = 0; i < ladder.size(); ++i) {
    xs[i] = std::log(ladder[i]);
    ys[i] = std::log(total_length(parallel_set(a, ladder[i])));  // > 0: set nonempty
  }
  LineFit f = ols_line(xs, ys);
  DimensionEstimate e;
  e.slope = f.slope;
  e.intercept = f.intercept;
  e.slope_stderr = f.slope_stderr;
  e.dimension = std::clamp(1.0 - f.slope, 0.0, 1.0);
  e.scales = ladder;
  return e;
}

}  // namespace hypvis
