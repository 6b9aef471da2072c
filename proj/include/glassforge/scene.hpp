// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <json.hpp>

#include "glassforge/image.hpp"

namespace glassforge {

using Vec3 = Eigen::Vector3d;

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3(0, 0, -1);
};

/// Pinhole camera. Pixel centers sit at half-integer coordinates.
struct Camera {
  int width = 256;
  int height = 256;
  double fov_x_deg = 60.0;
  Vec3 position = Vec3::Zero();
  Vec3 forward = Vec3(0, 0, -1);
  Vec3 up = Vec3(0, 1, 0);

  Vec3 right() const { return forward.cross(up); }
  double tan_half_x() const;
  double tan_half_y() const { return tan_half_x() * double(height) / double(width); }
};

/// Finite textured rectangle. u runs along axis_u, v along axis_v, both
/// mapped from [-half_extent, +half_extent] to [0, 1].
struct PlaneTarget {
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3(0, 0, 1);
  Vec3 axis_u = Vec3(1, 0, 0);
  Vec3 axis_v = Vec3(0, -1, 0);
  double half_extent_u = 1.0;
  double half_extent_v = 1.0;
  std::shared_ptr<const LinearImage> texture;

  /// Texture radiance at (u, v) in [0,1]^2, bilinear with clamped borders.
  Rgb radiance(double u, double v) const;
};

/// Infinite front surface of the glass plate. The normal faces the camera.
struct GlassPose {
  double distance_m = 0.5;
  double tilt_deg = 0.0;
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3(0, 0, 1);
};

using ReflectionSource = std::variant<EnvMap, PlaneTarget>;

struct Scene {
  Camera camera;
  GlassPose glass;
  PlaneTarget background;
  ReflectionSource reflection_source;

  bool planar_reflection() const { return std::holds_alternative<PlaneTarget>(reflection_source); }
};

enum class ReflectionMode { envmap, plane };

/// Inputs of solve_geometry. Textures are held as loaded images; the paths
/// are kept for provenance and digests.
struct SceneConfig {
  struct CameraConfig {
    int width = 256;
    int height = 256;
    double fov_x = 60.0;
    double tilt = 0.0;  // pitch in degrees about the camera right axis
  } camera;
  struct GlassConfig {
    double distance_m = 0.5;
    double tilt_deg = 0.0;  // rotation about the camera up axis
  } glass;
  struct BackgroundConfig {
    double distance_m = 2.0;
    std::string image;
    std::shared_ptr<const LinearImage> texture;
  } background;
  struct ReflectionConfig {
    ReflectionMode mode = ReflectionMode::envmap;
    std::string image;
    double distance_m = 1.5;  // from the glass along the mirrored principal ray
    double exposure = 1.0;
    std::shared_ptr<const LinearImage> texture;
  } reflection;
};

inline constexpr double kCoverageMargin = 1.05;

/// Parses the scene JSON. Image paths are resolved against base_dir and
/// loaded when load_images is set.
SceneConfig scene_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir,
                                   bool load_images = true);
/// Geometry fields and image paths only (no pixel data).
nlohmann::json to_json(const SceneConfig& config);

/// Places the glass, background and reflection source so the camera frustum
/// and its mirror image are covered with a 5% margin. Throws Error on invalid
/// or uncoverable configurations.
Scene solve_geometry(const SceneConfig& config);

Ray camera_ray(const Scene& scene, double px, double py);
Ray camera_ray(const Camera& camera, double px, double py);

/// Continuous pixel coordinates of a world point (pinhole projection).
Eigen::Vector2d project(const Camera& camera, const Vec3& point);

struct PlaneHit {
  double t = 0.0;
  double u = 0.0;
  double v = 0.0;
};

std::optional<PlaneHit> intersect_plane(const Ray& ray, const PlaneTarget& plane);

/// Distance along the ray to the infinite glass plane, or nullopt when the
/// ray does not hit its front side.
std::optional<double> intersect_glass(const Ray& ray, const GlassPose& glass);

/// Mirror `v` about the plane with unit normal `n`.
inline Vec3 reflect(const Vec3& v, const Vec3& n) { return v - 2.0 * v.dot(n) * n; }

}  // namespace glassforge
