// SPDX-License-Identifier: Apache-2.0
#include "glassforge/scene.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "glassforge/image_io.hpp"

namespace glassforge {

namespace fs = std::filesystem;

namespace {

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

Vec3 rotate(const Vec3& v, const Vec3& axis, double deg) {
  return Eigen::AngleAxisd(radians(deg), axis.normalized()) * v;
}

constexpr std::array<const char*, 4> kCornerNames = {"top-left", "top-right", "bottom-left",
                                                     "bottom-right"};

std::array<Eigen::Vector2d, 4> corner_pixels(const Camera& cam) {
  return {Eigen::Vector2d(0, 0), Eigen::Vector2d(cam.width, 0), Eigen::Vector2d(0, cam.height),
          Eigen::Vector2d(cam.width, cam.height)};
}

std::string format_vec(const Vec3& v) {
  return "(" + std::to_string(v.x()) + ", " + std::to_string(v.y()) + ", " +
         std::to_string(v.z()) + ")";
}

std::shared_ptr<const LinearImage> load_texture(const std::string& image, const fs::path& base) {
  if (image.empty()) return nullptr;
  fs::path p(image);
  if (p.is_relative()) p = base / p;
  return std::make_shared<const LinearImage>(load_image(p));
}

}  // namespace

double Camera::tan_half_x() const { return std::tan(radians(fov_x_deg) / 2.0); }

Rgb PlaneTarget::radiance(double u, double v) const {
  return bilinear_clamped(*texture, u * texture->width(), v * texture->height());
}

SceneConfig scene_config_from_json(const nlohmann::json& j, const fs::path& base_dir,
                                   bool load_images) {
  SceneConfig c;
  if (j.contains("camera")) {
    const auto& cam = j.at("camera");
    c.camera.width = cam.value("width", c.camera.width);
    c.camera.height = cam.value("height", c.camera.height);
    c.camera.fov_x = cam.value("fov_x", c.camera.fov_x);
    c.camera.tilt = cam.value("tilt", c.camera.tilt);
  }
  if (j.contains("glass")) {
    const auto& g = j.at("glass");
    c.glass.distance_m = g.value("distance_m", c.glass.distance_m);
    c.glass.tilt_deg = g.value("tilt_deg", c.glass.tilt_deg);
  }
  if (j.contains("background")) {
    const auto& b = j.at("background");
    c.background.distance_m = b.value("distance_m", c.background.distance_m);
    c.background.image = b.value("image", std::string());
  }
  if (j.contains("reflection")) {
    const auto& r = j.at("reflection");
    const std::string mode = r.value("mode", std::string("envmap"));
    if (mode == "envmap")
      c.reflection.mode = ReflectionMode::envmap;
    else if (mode == "plane")
      c.reflection.mode = ReflectionMode::plane;
    else
      throw Error("scene config: reflection.mode must be \"envmap\" or \"plane\", got \"" + mode +
                  "\"");
    c.reflection.image = r.value("image", std::string());
    c.reflection.distance_m = r.value("distance_m", c.reflection.distance_m);
    c.reflection.exposure = r.value("exposure", c.reflection.exposure);
  }
  if (load_images) {
    c.background.texture = load_texture(c.background.image, base_dir);
    c.reflection.texture = load_texture(c.reflection.image, base_dir);
  }
  return c;
}

nlohmann::json to_json(const SceneConfig& c) {
  return {
      {"camera",
       {{"width", c.camera.width},
        {"height", c.camera.height},
        {"fov_x", c.camera.fov_x},
        {"tilt", c.camera.tilt}}},
      {"glass", {{"distance_m", c.glass.distance_m}, {"tilt_deg", c.glass.tilt_deg}}},
      {"background", {{"distance_m", c.background.distance_m}, {"image", c.background.image}}},
      {"reflection",
       {{"mode", c.reflection.mode == ReflectionMode::envmap ? "envmap" : "plane"},
        {"image", c.reflection.image},
        {"distance_m", c.reflection.distance_m},
        {"exposure", c.reflection.exposure}}},
  };
}

Scene solve_geometry(const SceneConfig& config) {
  const auto& cc = config.camera;
  if (cc.width < 1 || cc.height < 1) throw Error("solve_geometry: image size must be >= 1x1");
  if (!(cc.fov_x > 10.0 && cc.fov_x < 120.0))
    throw Error("solve_geometry: fov_x must lie in (10, 120) degrees");
  if (!(config.glass.distance_m > 0.0))
    throw Error("solve_geometry: glass distance must be > 0, got " +
                std::to_string(config.glass.distance_m));
  if (!(config.background.distance_m > config.glass.distance_m))
    throw Error("solve_geometry: background must lie behind the glass");
  if (!config.background.texture || config.background.texture->empty())
    throw Error("solve_geometry: background texture missing");
  if (!config.reflection.texture || config.reflection.texture->empty())
    throw Error("solve_geometry: reflection source texture missing");
  if (!(config.reflection.exposure > 0.0))
    throw Error("solve_geometry: reflection exposure must be > 0");

  Scene scene;
  Camera& cam = scene.camera;
  cam.width = cc.width;
  cam.height = cc.height;
  cam.fov_x_deg = cc.fov_x;
  const Vec3 right0 = Vec3(0, 0, -1).cross(Vec3(0, 1, 0));
  cam.forward = rotate(Vec3(0, 0, -1), right0, cc.tilt);
  cam.up = rotate(Vec3(0, 1, 0), right0, cc.tilt);

  GlassPose& glass = scene.glass;
  glass.distance_m = config.glass.distance_m;
  glass.tilt_deg = config.glass.tilt_deg;
  glass.point = cam.position + glass.distance_m * cam.forward;
  glass.normal = rotate(-cam.forward, cam.up, glass.tilt_deg);

  // Every camera ray must hit the glass from the front.
  const auto corners = corner_pixels(cam);
  std::array<Ray, 4> corner_rays;
  std::array<Vec3, 4> glass_hits;
  for (std::size_t i = 0; i < 4; ++i) {
    corner_rays[i] = camera_ray(cam, corners[i].x(), corners[i].y());
    const auto t = intersect_glass(corner_rays[i], glass);
    if (!t)
      throw Error(std::string("solve_geometry: ") + kCornerNames[i] +
                  " frustum corner ray misses the glass (tilt too extreme)");
    glass_hits[i] = corner_rays[i].origin + *t * corner_rays[i].direction;
  }

  PlaneTarget& bg = scene.background;
  const double bg_dist = config.background.distance_m;
  bg.center = cam.position + bg_dist * cam.forward;
  bg.normal = -cam.forward;
  bg.axis_u = cam.right();
  bg.axis_v = -cam.up;
  bg.half_extent_u = bg_dist * cam.tan_half_x() * kCoverageMargin;
  bg.half_extent_v = bg_dist * cam.tan_half_y() * kCoverageMargin;
  bg.texture = config.background.texture;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec3 p = bg.center + bg.half_extent_u * (i % 2 ? 1.0 : -1.0) * bg.axis_u +
                   bg.half_extent_v * (i / 2 ? 1.0 : -1.0) * bg.axis_v;
    if ((p - glass.point).dot(glass.normal) >= 0.0)
      throw Error(std::string("solve_geometry: background ") + kCornerNames[i] +
                  " corner is not behind the glass");
  }

  if (config.reflection.mode == ReflectionMode::envmap) {
    scene.reflection_source = EnvMap{*config.reflection.texture, float(config.reflection.exposure)};
    return scene;
  }

  if (!(config.reflection.distance_m > 0.0))
    throw Error("solve_geometry: reflection source distance must be > 0");
  PlaneTarget src;
  const Vec3 mirrored_axis = reflect(cam.forward, glass.normal);
  src.center = glass.point + config.reflection.distance_m * mirrored_axis;
  src.normal = -mirrored_axis;
  src.axis_u = reflect(cam.right(), glass.normal);
  src.axis_v = reflect(-cam.up, glass.normal);
  double half_u = 0.0;
  double half_v = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec3 dir = reflect(corner_rays[i].direction, glass.normal);
    const double denom = dir.dot(src.normal);
    const double t = denom < -1e-12 ? (src.center - glass_hits[i]).dot(src.normal) / denom : -1.0;
    if (!(t > 0.0))
      throw Error(std::string("solve_geometry: mirrored ") + kCornerNames[i] +
                  " frustum corner never reaches the reflection source plane");
    const Vec3 hit = glass_hits[i] + t * dir;
    if ((hit - glass.point).dot(glass.normal) <= 0.0)
      throw Error(std::string("solve_geometry: mirrored ") + kCornerNames[i] +
                  " frustum corner lands behind the glass at " + format_vec(hit) +
                  "; reduce the tilt or the reflection distance");
    half_u = std::max(half_u, std::abs((hit - src.center).dot(src.axis_u)));
    half_v = std::max(half_v, std::abs((hit - src.center).dot(src.axis_v)));
  }
  src.half_extent_u = half_u * kCoverageMargin;
  src.half_extent_v = half_v * kCoverageMargin;
  auto tex = std::make_shared<LinearImage>(*config.reflection.texture);
  if (config.reflection.exposure != 1.0) tex->array() *= float(config.reflection.exposure);
  src.texture = std::move(tex);
  scene.reflection_source = std::move(src);
  return scene;
}

Ray camera_ray(const Camera& cam, double px, double py) {
  if (!(px >= 0.0 && px <= cam.width && py >= 0.0 && py <= cam.height))
    throw Error("camera_ray: pixel (" + std::to_string(px) + ", " + std::to_string(py) +
                ") outside the " + std::to_string(cam.width) + "x" + std::to_string(cam.height) +
                " image");
  const double sx = (2.0 * px / cam.width - 1.0) * cam.tan_half_x();
  const double sy = (1.0 - 2.0 * py / cam.height) * cam.tan_half_y();
  return {cam.position, (cam.forward + sx * cam.right() + sy * cam.up).normalized()};
}

Ray camera_ray(const Scene& scene, double px, double py) { return camera_ray(scene.camera, px, py); }

Eigen::Vector2d project(const Camera& cam, const Vec3& point) {
  const Vec3 d = point - cam.position;
  const double z = d.dot(cam.forward);
  const double sx = d.dot(cam.right()) / z / cam.tan_half_x();
  const double sy = d.dot(cam.up) / z / cam.tan_half_y();
  return {(sx + 1.0) * 0.5 * cam.width, (1.0 - sy) * 0.5 * cam.height};
}

std::optional<PlaneHit> intersect_plane(const Ray& ray, const PlaneTarget& plane) {
  const double denom = ray.direction.dot(plane.normal);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = (plane.center - ray.origin).dot(plane.normal) / denom;
  if (!(t > 0.0)) return std::nullopt;
  const Vec3 local = ray.origin + t * ray.direction - plane.center;
  const double u = 0.5 * (local.dot(plane.axis_u) / plane.half_extent_u + 1.0);
  const double v = 0.5 * (local.dot(plane.axis_v) / plane.half_extent_v + 1.0);
  if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0) return std::nullopt;
  return PlaneHit{t, u, v};
}

std::optional<double> intersect_glass(const Ray& ray, const GlassPose& glass) {
  const double denom = ray.direction.dot(glass.normal);
  if (denom > -1e-9) return std::nullopt;
  const double t = (glass.point - ray.origin).dot(glass.normal) / denom;
  if (!(t > 0.0)) return std::nullopt;
  return t;
}

}  // namespace glassforge
