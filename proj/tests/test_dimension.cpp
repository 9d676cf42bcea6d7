#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hypvis/dimension.hpp"

using namespace hypvis;

TEST_CASE("geometric_ladder") {
  auto l = geometric_ladder(0.25, 8);
  REQUIRE(l.size() == 8);
  REQUIRE(l[0] == 0.25);
  REQUIRE(l[7] == 0.25 / 128.0);
  REQUIRE_THROWS_AS(geometric_ladder(0.0, 8), validation_error);
  REQUIRE_THROWS_AS(geometric_ladder(0.25, 0), validation_error);
}

TEST_CASE("minkowski_dimension: full circle and single point") {
  auto ladder = geometric_ladder(0.25, 8);
  DimensionEstimate full = minkowski_dimension(ArcSet::full_circle(), ladder);
  REQUIRE(full.dimension >= 0.98);
  REQUIRE(std::abs(full.slope) <= 1e-12);

  DimensionEstimate pt = minkowski_dimension(ArcSet::from_arcs({{1.0, 1.0}}), ladder);
  REQUIRE(pt.dimension <= 0.02);
  REQUIRE(std::abs(pt.slope - 1.0) <= 1e-12);
  REQUIRE(pt.scales == ladder);
}

TEST_CASE("minkowski_dimension: middle-thirds oracle") {
  std::vector<double> ladder;
  for (int k = 2; k <= 7; ++k) ladder.push_back(std::pow(3.0, -k));
  DimensionEstimate e = minkowski_dimension(cantor_arcset(8), ladder);
  const double target = 0.63092975357145744;  // log 2 / log 3
  REQUIRE(std::abs(e.dimension - target) <= 0.05);
  REQUIRE(e.dimension == std::clamp(1.0 - e.slope, 0.0, 1.0));
}

TEST_CASE("minkowski_dimension: rotation invariance") {
  std::vector<double> ladder;
  for (int k = 2; k <= 7; ++k) ladder.push_back(std::pow(3.0, -k));
  ArcSet c = cantor_arcset(6);
  DimensionEstimate a = minkowski_dimension(c, ladder);
  DimensionEstimate b = minkowski_dimension(rotate(c, 2.345), ladder);
  REQUIRE(std::abs(a.dimension - b.dimension) <= 1e-9);
}

TEST_CASE("minkowski_dimension: finite arc unions flatten to dimension 1") {
  ArcSet a = ArcSet::from_arcs({{0.0, 0.1}, {1.0, 1.1}, {3.0, 3.1}});
  // ladder far below the minimal arc width
  DimensionEstimate e = minkowski_dimension(a, geometric_ladder(0.01, 6));
  REQUIRE(e.dimension >= 0.9);
}

TEST_CASE("minkowski_dimension: input validation") {
  auto ladder = geometric_ladder(0.25, 8);
  REQUIRE_THROWS_AS(minkowski_dimension(ArcSet::empty_set(), ladder), validation_error);
  REQUIRE_THROWS_AS(minkowski_dimension(ArcSet::full_circle(), {0.25, 0.125, 0.0625}),
                    validation_error);
  REQUIRE_THROWS_AS(minkowski_dimension(ArcSet::full_circle(), {0.25, 0.25, 0.125, 0.0625}),
                    validation_error);
  REQUIRE_THROWS_AS(minkowski_dimension(ArcSet::full_circle(), {0.25, 0.125, 0.0625, 0.0}),
                    validation_error);
}
