// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "glassforge/tiler.hpp"
#include "support.hpp"

using namespace glassforge;

namespace {

double max_level_error(const LinearImage& a, const LinearImage& b) {
  return double((a.array() - b.array()).abs().maxCoeff()) * 255.0;
}

}  // namespace

TEST_CASE("plan_axis") {
  CHECK(plan_axis(608, 608, 96) == std::vector<int>{0});
  CHECK(plan_axis(1000, 608, 96) == std::vector<int>{0, 392});
  CHECK(plan_axis(1216, 608, 96) == std::vector<int>{0, 304, 608});
  for (int length = 609; length < 3000; length += 37) {
    const auto o = plan_axis(length, 608, 96);
    CHECK(o.front() == 0);
    CHECK(o.back() == length - 608);
    for (std::size_t i = 1; i < o.size(); ++i) CHECK(o[i - 1] + 608 - o[i] >= 96);
  }
}

TEST_CASE("plan_tiles upsamples the shorter side") {
  const TilePlan p = plan_tiles(300, 450);
  CHECK(p.resampled());
  CHECK(p.working_width == 608);
  CHECK(p.working_height == 912);
  CHECK(p.origins_x == std::vector<int>{0});
  CHECK(p.origins_y == std::vector<int>{0, 304});

  const TilePlan q = plan_tiles(608, 608);
  CHECK_FALSE(q.resampled());
  CHECK(q.tile_count() == 1);
  CHECK_THROWS_AS(plan_tiles(0, 10), Error);
  CHECK_THROWS_AS(plan_tiles(700, 700, 64, 64), Error);
}

TEST_CASE("tile weights are a partition of unity with monotone ramps") {
  const TilePlan p = plan_tiles(1000, 1700, 608, 96);
  for (int x = 0; x < p.working_width; ++x) {
    double sum = 0;
    for (std::size_t i = 0; i < p.origins_x.size(); ++i) sum += p.axis_weight_x(i, x);
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  for (int y = 0; y < p.working_height; ++y) {
    double sum = 0;
    for (std::size_t j = 0; j < p.origins_y.size(); ++j) sum += p.axis_weight_y(j, y);
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  // Second tile fades in across the overlap band, first tile fades out.
  for (int x = p.origins_x[1]; x + 1 < 608; ++x) {
    CHECK(p.axis_weight_x(1, x + 1) > p.axis_weight_x(1, x));
    CHECK(p.axis_weight_x(0, x + 1) < p.axis_weight_x(0, x));
  }
  CHECK(p.axis_weight_x(0, 0) == 1.0);
  CHECK(p.axis_weight_x(1, 0) == 0.0);
}

TEST_CASE("split then stitch is the identity") {
  SUBCASE("no resampling, shared overlap pixels") {
    const LinearImage img = testing::smooth_random(1216, 608, 1);
    const TilePlan p = plan_tiles(1216, 608);
    const auto tiles = split(img, p);
    REQUIRE(tiles.size() == 3);
    // Overlap pixels carry the same source values in both tiles.
    CHECK(tiles[0].pixel(400, 10).isApprox(tiles[1].pixel(96, 10)));
    CHECK(max_level_error(stitch(tiles, p), img) < 1e-3);
  }
  SUBCASE("shorter side upsampled") {
    const LinearImage img = testing::smooth_random(250, 333, 2);
    const TilePlan p = plan_tiles(250, 333);
    const LinearImage back = stitch(split(img, p), p);
    CHECK(back.width() == 250);
    CHECK(back.height() == 333);
    CHECK(max_level_error(back, img) <= 1.0);
  }
}

TEST_CASE("tile plan JSON round trip and stitch errors") {
  const TilePlan p = plan_tiles(900, 700);
  const TilePlan q = tile_plan_from_json(to_json(p));
  CHECK(q.origins_x == p.origins_x);
  CHECK(q.origins_y == p.origins_y);
  CHECK(q.working_width == p.working_width);
  CHECK_THROWS_AS(stitch({}, p), Error);
  CHECK_THROWS_AS(split(LinearImage(10, 10), p), Error);
}
