// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "glassforge/scene.hpp"
#include "support.hpp"

using namespace glassforge;

TEST_CASE("background footprint matches the frustum with margin") {
  SceneConfig c = testing::basic_config(64);
  const Scene s = solve_geometry(c);
  CHECK(s.background.half_extent_u == doctest::Approx(1.2124).epsilon(1e-4));
  CHECK(s.background.half_extent_v == doctest::Approx(1.2124).epsilon(1e-4));
  CHECK(s.background.center.isApprox(Vec3(0, 0, -2)));
}

TEST_CASE("solve_geometry validation") {
  SceneConfig c = testing::basic_config();
  c.glass.distance_m = 0.0;
  CHECK_THROWS_AS(solve_geometry(c), Error);
  c = testing::basic_config();
  c.background.distance_m = 0.4;
  CHECK_THROWS_AS(solve_geometry(c), Error);
  c = testing::basic_config();
  c.camera.fov_x = 150;
  CHECK_THROWS_AS(solve_geometry(c), Error);
  c = testing::basic_config();
  c.glass.tilt_deg = 0.0;
  CHECK_NOTHROW(solve_geometry(c));  // envmap covers everything
}

TEST_CASE("planar reflection coverage") {
  SceneConfig c = testing::basic_config(48);
  c.reflection.mode = ReflectionMode::plane;
  c.reflection.distance_m = 1.5;
  c.glass.tilt_deg = 8.0;
  const Scene s = solve_geometry(c);
  const auto& src = std::get<PlaneTarget>(s.reflection_source);
  // Every order-0 reflected corner and interior ray lands on the source plane.
  for (double py = 0; py <= 48; py += 6)
    for (double px = 0; px <= 48; px += 6) {
      const Ray r = camera_ray(s, px, py);
      const auto t = intersect_glass(r, s.glass);
      REQUIRE(t);
      const Ray refl{r.origin + *t * r.direction, reflect(r.direction, s.glass.normal)};
      CHECK(intersect_plane(refl, src).has_value());
    }

  SceneConfig bad = c;
  bad.camera.fov_x = 100;
  bad.glass.tilt_deg = 40;
  bad.reflection.distance_m = 3.0;
  CHECK_THROWS_WITH_AS(solve_geometry(bad), doctest::Contains("corner"), Error);
}

TEST_CASE("every camera ray hits the background") {
  SceneConfig c = testing::basic_config(33);
  c.glass.tilt_deg = -10;
  c.camera.height = 21;
  const Scene s = solve_geometry(c);
  for (double py : {0.0, 10.5, 21.0})
    for (double px : {0.0, 16.5, 33.0}) CHECK(intersect_plane(camera_ray(s, px, py), s.background));
}

TEST_CASE("solve_geometry is deterministic") {
  SceneConfig c = testing::basic_config(40);
  c.reflection.mode = ReflectionMode::plane;
  c.glass.tilt_deg = 5.5;
  const Scene a = solve_geometry(c);
  const Scene b = solve_geometry(c);
  const auto& pa = std::get<PlaneTarget>(a.reflection_source);
  const auto& pb = std::get<PlaneTarget>(b.reflection_source);
  CHECK(pa.center == pb.center);
  CHECK(pa.half_extent_u == pb.half_extent_u);
  CHECK(pa.half_extent_v == pb.half_extent_v);
  CHECK(a.glass.normal == b.glass.normal);
}

TEST_CASE("camera_ray geometry") {
  SceneConfig c = testing::basic_config(65);
  c.camera.fov_x = 90;
  const Scene s = solve_geometry(c);
  CHECK(camera_ray(s, 32.5, 32.5).direction.isApprox(s.camera.forward));

  const Vec3 tl = camera_ray(s, 0.5, 0.5).direction;
  const Vec3 br = camera_ray(s, 64.5, 64.5).direction;
  CHECK(tl.dot(s.camera.forward) == doctest::Approx(br.dot(s.camera.forward)));
  CHECK(tl.x() == doctest::Approx(-br.x()));

  const Vec3 right = camera_ray(s, 64.5, 32.5).direction;
  const double angle = std::acos(right.dot(s.camera.forward)) * 180 / std::numbers::pi;
  const double half_pixel_deg = 90.0 / 65 / 2;
  CHECK(std::abs(angle - 45.0) <= half_pixel_deg);

  CHECK_THROWS_AS(camera_ray(s, -1, 3), Error);
  CHECK_THROWS_AS(camera_ray(s, 3, 70), Error);
}

TEST_CASE("project inverts camera_ray") {
  const Scene s = solve_geometry(testing::basic_config(50));
  const Ray r = camera_ray(s, 12.25, 40.5);
  const Eigen::Vector2d p = project(s.camera, r.origin + 3.0 * r.direction);
  CHECK(p.x() == doctest::Approx(12.25));
  CHECK(p.y() == doctest::Approx(40.5));
}

TEST_CASE("intersect_plane") {
  PlaneTarget plane;
  plane.center = Vec3(0, 0, -1);
  plane.normal = Vec3(0, 0, 1);
  plane.half_extent_u = 2;
  plane.half_extent_v = 2;
  auto hit = intersect_plane({Vec3::Zero(), Vec3(0, 0, -1)}, plane);
  REQUIRE(hit);
  CHECK(hit->u == doctest::Approx(0.5));
  CHECK(hit->v == doctest::Approx(0.5));
  CHECK(hit->t == doctest::Approx(1.0));

  CHECK_FALSE(intersect_plane({Vec3::Zero(), Vec3(1, 0, 0)}, plane));

  hit = intersect_plane({Vec3::Zero(), Vec3(-1, 0, -1).normalized()}, plane);
  REQUIRE(hit);
  CHECK(hit->u == doctest::Approx(0.25));
  CHECK(hit->v == doctest::Approx(0.5));

  CHECK_FALSE(intersect_plane({Vec3::Zero(), Vec3(-3, 0, -1).normalized()}, plane));
  CHECK_FALSE(intersect_plane({Vec3::Zero(), Vec3(0, 0, 1)}, plane));
}

TEST_CASE("scene config JSON") {
  const nlohmann::json j = nlohmann::json::parse(R"({
    "camera": {"width": 32, "height": 24, "fov_x": 50, "tilt": 2},
    "glass": {"distance_m": 0.4, "tilt_deg": 3},
    "background": {"distance_m": 2.5, "image": "bg.png"},
    "reflection": {"mode": "plane", "image": "r.png", "distance_m": 1.2, "exposure": 0.5}
  })");
  const SceneConfig c = scene_config_from_json(j, ".", false);
  CHECK(c.camera.width == 32);
  CHECK(c.camera.height == 24);
  CHECK(c.glass.tilt_deg == 3);
  CHECK(c.reflection.mode == ReflectionMode::plane);
  CHECK(c.reflection.exposure == 0.5);
  CHECK(to_json(c) == to_json(scene_config_from_json(to_json(c), ".", false)));
  nlohmann::json bad = j;
  bad["reflection"]["mode"] = "mirror";
  CHECK_THROWS_AS(scene_config_from_json(bad, ".", false), Error);
}
