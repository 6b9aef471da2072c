// SPDX-License-Identifier: Apache-2.0
#include "glassforge/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "glassforge/parallel.hpp"
#include "glassforge/rng.hpp"

namespace glassforge {

namespace {

struct SurfaceHit {
  bool valid = false;
  Vec3 point = Vec3::Zero();
  double cos_i = 1.0;
  Vec3 in_plane = Vec3::Zero();  // unit direction of the ray's tangential component
};

SurfaceHit hit_glass(const Ray& ray, const GlassPose& glass) {
  SurfaceHit h;
  const auto t = intersect_glass(ray, glass);
  if (!t) return h;
  h.valid = true;
  h.point = ray.origin + *t * ray.direction;
  h.cos_i = std::clamp(-ray.direction.dot(glass.normal), 0.0, 1.0);
  const Vec3 tangential = ray.direction + h.cos_i * glass.normal;
  const double len = tangential.norm();
  if (len > 1e-12) {
    h.in_plane = tangential / len;
  } else {
    h.in_plane = glass.normal.unitOrthogonal();
  }
  return h;
}

// Where the order-0 transmitted ray leaves the slab's back surface.
Vec3 exact_exit_point(const SurfaceHit& h, const Vec3& dir, const Vec3& normal,
                      const GlassMaterial& m) {
  const double eta = 1.0 / m.ior;
  const double cos_t = refract_cos(h.cos_i, m.ior);
  const Vec3 inside = (eta * dir + (eta * h.cos_i - cos_t) * normal).normalized();
  return h.point + inside * (m.thickness / cos_t);
}

struct Lookup {
  Rgb radiance = Rgb::Zero();
  bool hit = false;
};

Lookup plane_lookup(const PlaneTarget& plane, const Ray& ray) {
  const auto hit = intersect_plane(ray, plane);
  if (!hit) return {};
  return {plane.radiance(hit->u, hit->v), true};
}

// Background radiance through the slab for one camera ray.
Rgb transmitted_radiance(const Scene& scene, const Ray& ray, const SurfaceHit& h,
                         const std::vector<GhostTerm>& terms, const GlassMaterial& m,
                         RefractionMode mode, bool& order0_hit) {
  const Vec3 base = mode == RefractionMode::exact
                        ? exact_exit_point(h, ray.direction, scene.glass.normal, m)
                        : h.point;
  Rgb sum = Rgb::Zero();
  order0_hit = true;
  for (const GhostTerm& term : terms) {
    if (term.order > 0 && (term.weight == 0.0).all()) continue;
    const Lookup l =
        plane_lookup(scene.background, {base + term.lateral_offset * h.in_plane, ray.direction});
    if (term.order == 0) order0_hit = l.hit;
    sum += term.weight.cast<float>() * l.radiance;
  }
  return sum;
}

struct ShadingFrame {
  Vec3 tangent, bitangent, normal;
  Vec3 to_world(const Vec3& v) const { return v.x() * tangent + v.y() * bitangent + v.z() * normal; }
};

ShadingFrame make_frame(const Vec3& n) {
  const Vec3 t = n.unitOrthogonal();
  return {t, n.cross(t), n};
}

// Stratified on a sqrt(spp) grid when spp is a perfect square.
Eigen::Vector2d sample_uv(std::uint64_t seed, std::uint64_t pixel, int sample, int spp,
                          int grid) {
  const std::uint64_t h = hash_counter(seed, pixel, std::uint64_t(sample));
  double u1 = to_unit(h);
  double u2 = to_unit(mix64(h ^ 0xA5A5A5A5A5A5A5A5ULL));
  if (grid * grid == spp && grid > 1) {
    u1 = ((sample % grid) + u1) / grid;
    u2 = ((sample / grid) + u2) / grid;
  }
  constexpr double kBelowOne = 1.0 - 0x1.0p-53;
  return {std::min(u1, kBelowOne), std::min(u2, kBelowOne)};
}

}  // namespace

RefractionMode parse_refraction_mode(std::string_view name) {
  if (name == "aligned") return RefractionMode::aligned;
  if (name == "exact") return RefractionMode::exact;
  throw Error("unknown refraction mode '" + std::string(name) + "' (expected aligned|exact)");
}

std::string_view to_string(RefractionMode mode) {
  return mode == RefractionMode::aligned ? "aligned" : "exact";
}

RenderTriple render_triple(const Scene& scene, const GlassMaterial& material,
                           const RenderSettings& settings) {
  material.validate();
  if (settings.spp < 1) throw Error("render_triple: spp must be >= 1");
  if (settings.max_order < 0) throw Error("render_triple: max_order must be >= 0");

  const Camera& cam = scene.camera;
  const int w = cam.width;
  const int h = cam.height;
  const int spp = settings.spp;
  const int grid = int(std::lround(std::sqrt(double(spp))));
  const GlassMaterial gt = material.invisible();
  const Vec3& n = scene.glass.normal;
  const ShadingFrame frame = make_frame(n);
  const bool planar = scene.planar_reflection();

  RenderTriple out;
  out.blended = LinearImage(w, h);
  out.transmission = LinearImage(w, h);
  out.reflection = LinearImage(w, h);

  std::vector<std::uint64_t> trans_miss(std::size_t(h), 0);
  std::vector<std::uint64_t> refl_miss(std::size_t(h), 0);

  parallel_for(std::size_t(h), settings.jobs, [&](std::size_t row) {
    const int y = int(row);
    for (int x = 0; x < w; ++x) {
      const Ray ray = camera_ray(cam, x + 0.5, y + 0.5);
      const SurfaceHit hit = hit_glass(ray, scene.glass);
      if (!hit.valid) {
        const Lookup l = plane_lookup(scene.background, ray);
        trans_miss[row] += !l.hit;
        out.transmission.pixel(x, y) = l.radiance;
        out.blended.pixel(x, y) = l.radiance;
        continue;
      }

      bool gt_hit = true;
      const GhostSeries gt_series = ghost_series(hit.cos_i, gt, settings.max_order);
      out.transmission.pixel(x, y) = transmitted_radiance(
          scene, ray, hit, gt_series.transmitted, gt, settings.refraction_mode, gt_hit);

      const GhostSeries series = ghost_series(hit.cos_i, material, settings.max_order);
      bool order0_hit = true;
      const Rgb transmitted = transmitted_radiance(scene, ray, hit, series.transmitted, material,
                                                   settings.refraction_mode, order0_hit);
      trans_miss[row] += !order0_hit;

      Rgb reflected = Rgb::Zero();
      const Rgbd total = total_weight(series.reflected);
      if ((total > 0.0).any()) {
        const std::uint64_t pixel_index = std::uint64_t(y) * std::uint64_t(w) + std::uint64_t(x);
        Rgb acc = Rgb::Zero();
        for (int s = 0; s < spp; ++s) {
          Vec3 dir = reflect(ray.direction, n);
          if (material.roughness > 0.0) {
            const Eigen::Vector2d u = sample_uv(settings.seed, pixel_index, s, spp, grid);
            const Vec3 m = frame.to_world(ggx_sample(material.roughness, u.x(), u.y()));
            const Vec3 candidate = reflect(ray.direction, m);
            if (candidate.dot(n) > 0.0) dir = candidate.normalized();
          }
          if (!planar) {
            const EnvMap& env = std::get<EnvMap>(scene.reflection_source);
            acc += total.cast<float>() * envmap_sample(env, dir);
            continue;
          }
          const PlaneTarget& src = std::get<PlaneTarget>(scene.reflection_source);
          for (const GhostTerm& term : series.reflected) {
            if (term.order > 0 && (term.weight == 0.0).all()) continue;
            const Lookup l = plane_lookup(src, {hit.point + term.lateral_offset * hit.in_plane, dir});
            if (term.order == 0) refl_miss[row] += !l.hit;
            acc += term.weight.cast<float>() * l.radiance;
          }
        }
        reflected = acc / float(spp);
      }
      out.reflection.pixel(x, y) = reflected;
      out.blended.pixel(x, y) = transmitted + reflected;
    }
  });

  std::uint64_t tm = 0, rm = 0;
  for (int y = 0; y < h; ++y) {
    tm += trans_miss[std::size_t(y)];
    rm += refl_miss[std::size_t(y)];
  }
  const double pixels = double(w) * double(h);
  out.miss_fraction = std::max(double(tm) / pixels, double(rm) / (pixels * spp));
  if (out.miss_fraction > settings.max_miss_fraction)
    throw Error("render_triple: " + std::to_string(100.0 * out.miss_fraction) +
                "% of primary lookups miss the textured planes (limit " +
                std::to_string(100.0 * settings.max_miss_fraction) +
                "%); move the source planes or reduce the glass tilt");
  out.max_shift_px =
      settings.refraction_mode == RefractionMode::exact ? validate_alignment(scene, material) : 0.0;
  return out;
}

double transmitted_shift_px(const Scene& scene, const GlassMaterial& material, double px,
                            double py) {
  const Ray ray = camera_ray(scene, px, py);
  const SurfaceHit hit = hit_glass(ray, scene.glass);
  if (!hit.valid || material.thickness == 0.0 || material.ior == 1.0) return 0.0;
  const PlaneTarget& bg = scene.background;
  auto plane_point = [&](const Vec3& origin) {
    const double t = (bg.center - origin).dot(bg.normal) / ray.direction.dot(bg.normal);
    return Vec3(origin + t * ray.direction);
  };
  const Vec3 straight = plane_point(hit.point);
  const Vec3 shifted = plane_point(exact_exit_point(hit, ray.direction, scene.glass.normal, material));
  return (project(scene.camera, shifted) - project(scene.camera, straight)).norm();
}

double validate_alignment(const Scene& scene, const GlassMaterial& material) {
  const Camera& cam = scene.camera;
  double worst = 0.0;
  for (double py : {0.0, double(cam.height)})
    for (double px : {0.0, double(cam.width)})
      worst = std::max(worst, transmitted_shift_px(scene, material, px, py));
  return worst;
}

}  // namespace glassforge
