#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dgt/error.hpp"
#include "dgt/scan.hpp"
#include "test_util.hpp"

using namespace dgt;

TEST_SUITE("scan_core") {

TEST_CASE("radial area index examples") {
  const RadialPartition part{50, 100.0, DistanceMode::kRange3d};
  CHECK(radial_area_index({0, 0, 0}, part) == 0);
  // dist 5.0 with 2 m bins
  CHECK(radial_area_index({3, 4, 0}, part) == 2);
  CHECK(radial_area_index({200, 0, 0}, part) == 49);
  CHECK(radial_area_index({100, 0, 0}, part) == 49);
}

TEST_CASE("planar mode ignores z") {
  const RadialPartition range{50, 100.0, DistanceMode::kRange3d};
  const RadialPartition planar{50, 100.0, DistanceMode::kPlanar};
  const Point p{3, 0, 4};  // 3-D range 5, planar range 3
  CHECK(range.area_index(p) == 2);
  CHECK(planar.area_index(p) == 1);
}

TEST_CASE("partition validation") {
  CHECK_THROWS_AS((RadialPartition{0, 100.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((RadialPartition{5, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((InclinationPartition{1, -1, 1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((InclinationPartition{4, 0.2, 0.1}.validate()), std::invalid_argument);
}

TEST_CASE("inclination examples") {
  CHECK(inclination_of({1, 0, 0}) == 0.0);
  CHECK(inclination_of({1e-9f, 0, 1}) == doctest::Approx(std::numbers::pi / 2));
  CHECK(inclination_of({1, 0, 1}) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));
  CHECK_THROWS_WITH_AS(inclination_of({0, 0, 0}), "degenerate point at sensor center",
                       DataError);
}

TEST_CASE("inclination area index examples") {
  const InclinationPartition part{4, -0.4, 0.0};
  CHECK(part.area_index_of_angle(-0.4) == 0);
  CHECK(part.area_index_of_angle(0.0 - 1e-9) == 3);
  CHECK(part.area_index_of_angle(-0.15) == 2);
  // Clamping outside the bounds.
  CHECK(part.area_index_of_angle(-2.0) == 0);
  CHECK(part.area_index_of_angle(1.0) == 3);
  CHECK(inclination_area_index({1, 0, 0}, part) == 3);
}

TEST_CASE("area histogram is total and distance-monotone") {
  Rng rng(11);
  const RadialPartition part{37, 80.0, DistanceMode::kRange3d};
  for (int trial = 0; trial < 20; ++trial) {
    const Scan scan = testing::random_scan(rng, 500, 120.0, false);
    const auto counts = area_histogram(scan, part);
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    CHECK(total == scan.size());
    for (const auto& p : scan.points) {
      const int idx = part.area_index(p);
      CHECK(idx >= 0);
      CHECK(idx < part.m);
      const Point farther{p.x * 1.5f, p.y * 1.5f, p.z * 1.5f};
      CHECK(part.area_index(farther) >= idx);
    }
  }
}

TEST_CASE("scan validation catches channel mismatches") {
  Scan scan;
  scan.points = {{1, 2, 3}, {4, 5, 6}};
  scan.labels = std::vector<ClassId>{1};
  CHECK_THROWS_AS(scan.validate(), DataError);
  scan.labels = std::vector<ClassId>{1, 2};
  CHECK_NOTHROW(scan.validate());
  scan.points[1].y = std::nanf("");
  CHECK_THROWS_AS(scan.validate(), DataError);
}

TEST_CASE("select_points carries channels") {
  Scan scan;
  scan.points = {{1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  scan.labels = std::vector<ClassId>{7, 8, 9};
  const std::vector<std::uint32_t> idx{2, 0};
  const Scan out = select_points(scan, idx);
  REQUIRE(out.size() == 2);
  CHECK(out.points[0].x == 3);
  CHECK((*out.labels)[1] == 7);
  CHECK_FALSE(out.instance_ids.has_value());
}

}
