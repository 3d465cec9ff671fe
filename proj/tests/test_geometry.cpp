#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/oracles.hpp"
#include "trustmhe/geometry.hpp"

using trustmhe::box_distance;
using trustmhe::BoxShape;
using trustmhe::make_box_shape;
using trustmhe::OrientedBox;
using trustmhe::segment_distance2;
using trustmhe::Vec2;

TEST_CASE("segment distance handles degenerate inputs") {
  CHECK(segment_distance2({0, 0}, {0, 0}, {3, 4}, {3, 4}) == doctest::Approx(25.0));
  CHECK(segment_distance2({0, 0}, {0, 0}, {1, -1}, {1, 1}) == doctest::Approx(1.0));
  CHECK(segment_distance2({0, 0}, {2, 0}, {1, 3}, {1, 5}) == doctest::Approx(9.0));
  // Parallel, laterally offset.
  CHECK(segment_distance2({0, 0}, {4, 0}, {1, 2}, {3, 2}) == doctest::Approx(4.0));
  // Collinear with a gap.
  CHECK(segment_distance2({0, 0}, {1, 0}, {3, 0}, {5, 0}) == doctest::Approx(4.0));
  // Crossing segments touch.
  CHECK(segment_distance2({-1, -1}, {1, 1}, {-1, 1}, {1, -1}) == doctest::Approx(0.0));
}

TEST_CASE("axis-aligned boxes at a known gap") {
  const OrientedBox a{{0.0, 0.0}, 0.0, 2.0, 2.0};
  const OrientedBox b{{5.0, 0.0}, 0.0, 2.0, 2.0};
  CHECK(box_distance(a, b) == doctest::Approx(3.0));
}

TEST_CASE("overlapping and touching boxes return exactly zero") {
  const OrientedBox a{{0.0, 0.0}, 0.0, 4.0, 2.0};
  SUBCASE("partial overlap") {
    const OrientedBox b{{3.0, 0.5}, 0.3, 4.0, 2.0};
    CHECK(box_distance(a, b) == 0.0);
  }
  SUBCASE("containment") {
    const OrientedBox b{{0.2, 0.1}, 0.7, 0.5, 0.3};
    CHECK(box_distance(a, b) == 0.0);
  }
  SUBCASE("edge contact") {
    const OrientedBox b{{4.0, 0.0}, 0.0, 4.0, 2.0};
    CHECK(box_distance(a, b) == 0.0);
  }
  SUBCASE("identical") { CHECK(box_distance(a, a) == 0.0); }
}

TEST_CASE("rotated box against an axis-aligned one") {
  // 2x2 box rotated 45 deg reaches sqrt(2) along x; neighbor edge at x = 3.
  const OrientedBox a{{0.0, 0.0}, std::numbers::pi / 4.0, 2.0, 2.0};
  const OrientedBox b{{4.0, 0.0}, 0.0, 2.0, 2.0};
  CHECK(box_distance(a, b) == doctest::Approx(3.0 - std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("box distance is symmetric") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> ang(-3.2, 3.2);
  std::uniform_real_distribution<double> ext(0.4, 6.0);
  for (int i = 0; i < 2000; ++i) {
    const OrientedBox a{{pos(rng), pos(rng)}, ang(rng), ext(rng), ext(rng)};
    const OrientedBox b{{pos(rng), pos(rng)}, ang(rng), ext(rng), ext(rng)};
    const double dab = box_distance(a, b);
    const double dba = box_distance(b, a);
    CHECK(std::abs(dab - dba) <= 1e-9 * (1.0 + dab));
  }
}

TEST_CASE("box distance matches the perimeter-sampling reference") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> pos(-8.0, 8.0);
  std::uniform_real_distribution<double> ang(-3.2, 3.2);
  std::uniform_real_distribution<double> ext(0.5, 5.0);
  for (int i = 0; i < 100; ++i) {
    const BoxShape a = make_box_shape({{pos(rng), pos(rng)}, ang(rng), ext(rng), ext(rng)});
    const BoxShape b = make_box_shape({{pos(rng), pos(rng)}, ang(rng), ext(rng), ext(rng)});
    const double got = box_distance(a, b);
    const double ref = oracles::box_distance_reference(a, b, 4000);
    CHECK(std::abs(got - ref) < 2e-3);
  }
}
