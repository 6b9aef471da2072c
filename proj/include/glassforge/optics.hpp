// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "glassforge/image.hpp"

namespace glassforge {

/// Principled-BSDF style parameters of a glass plate.
struct GlassMaterial {
  double ior = 1.5;
  double roughness = 0.0;
  double thickness = 0.0;  // meters
  Rgbd base_color = Rgbd::Ones();
  double metallic = 0.0;

  /// Throws Error describing the first violated invariant.
  void validate() const {
    if (!(ior >= 1.0) || !std::isfinite(ior)) throw Error("GlassMaterial: ior must be >= 1");
    if (!(roughness >= 0.0 && roughness <= 1.0))
      throw Error("GlassMaterial: roughness must be in [0,1]");
    if (!(thickness >= 0.0) || !std::isfinite(thickness))
      throw Error("GlassMaterial: thickness must be >= 0");
    if (!(metallic >= 0.0 && metallic <= 1.0))
      throw Error("GlassMaterial: metallic must be in [0,1]");
    for (int c = 0; c < 3; ++c)
      if (!(base_color[c] > 0.0 && base_color[c] <= 1.0))
        throw Error("GlassMaterial: base_color channels must be in (0,1]");
  }

  /// The reflection-free ground truth: glass that is optically absent.
  GlassMaterial invisible() const {
    GlassMaterial m = *this;
    m.ior = 1.0;
    m.metallic = 0.0;
    m.roughness = 0.0;
    m.base_color = Rgbd::Ones();
    return m;
  }
};

/// Base color is the tint after one traversal of this depth at normal incidence.
inline constexpr double kAbsorptionReferenceDepth = 0.005;
inline constexpr int kDefaultGhostOrder = 3;

/// Cosine of the refracted angle entering a medium of index n from air.
template <typename Scalar>
Scalar refract_cos(Scalar cos_i, Scalar n) {
  const Scalar sin2_t = (Scalar(1) - cos_i * cos_i) / (n * n);
  return std::sqrt(std::max(Scalar(0), Scalar(1) - sin2_t));
}

/// Unpolarized dielectric Fresnel reflectance, air to index n.
template <typename Scalar>
Scalar fresnel_unpolarized(Scalar cos_i, Scalar n) {
  if (n == Scalar(1)) return Scalar(0);  // also avoids 0/0 at grazing incidence
  const Scalar cos_t = refract_cos(cos_i, n);
  const Scalar rs = (cos_i - n * cos_t) / (cos_i + n * cos_t);
  const Scalar rp = (cos_t - n * cos_i) / (cos_t + n * cos_i);
  return Scalar(0.5) * (rs * rs + rp * rp);
}

/// Beer-Lambert transmittance along a path inside the glass.
inline Rgbd absorption_factor(const GlassMaterial& m, double path_length) {
  Rgbd out;
  for (int c = 0; c < 3; ++c) {
    const double sigma = -std::log(m.base_color[c]) / kAbsorptionReferenceDepth;
    out[c] = sigma == 0.0 ? 1.0 : std::exp(-sigma * path_length);
  }
  return out;
}

struct GhostTerm {
  Rgbd weight = Rgbd::Zero();
  double lateral_offset = 0.0;  // meters along the front surface
  int order = 0;
};

struct GhostSeries {
  std::vector<GhostTerm> reflected;
  std::vector<GhostTerm> transmitted;
};

/// Multiple-bounce series of a parallel slab seen at incidence cos_i.
///
/// Both interfaces share one unpolarized reflectance r. Reflected order k >= 1
/// and transmitted order k have crossed the slab 2k (resp. 2k+1) times and
/// emerge 2k * thickness * tan(theta_t) from the order-0 path. Metallic
/// raises the front reflection toward the base color and scales everything
/// that enters the glass by (1 - metallic).
inline GhostSeries ghost_series(double cos_i, const GlassMaterial& m,
                                int max_order = kDefaultGhostOrder) {
  cos_i = std::clamp(cos_i, 0.0, 1.0);
  const double r = fresnel_unpolarized(cos_i, m.ior);
  const double cos_t = refract_cos(cos_i, m.ior);
  const double tan_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t)) / cos_t;
  const Rgbd a = absorption_factor(m, m.thickness / cos_t);
  const double entering = (1.0 - m.metallic) * (1.0 - r) * (1.0 - r);

  GhostSeries s;
  s.reflected.reserve(std::size_t(max_order) + 1);
  s.transmitted.reserve(std::size_t(max_order) + 1);
  s.reflected.push_back({r + m.metallic * (1.0 - r) * m.base_color, 0.0, 0});

  // r_pow = r^(2k-1), a_pow = a^(2k) for the reflected term of order k.
  double r_pow = r;
  Rgbd a_pow = a * a;
  for (int k = 1; k <= max_order; ++k) {
    s.reflected.push_back({entering * r_pow * a_pow, 2.0 * k * m.thickness * tan_t, k});
    r_pow *= r * r;
    a_pow *= a * a;
  }
  double rt_pow = 1.0;
  Rgbd at_pow = a;
  for (int k = 0; k <= max_order; ++k) {
    s.transmitted.push_back({entering * rt_pow * at_pow, 2.0 * k * m.thickness * tan_t, k});
    rt_pow *= r * r;
    at_pow *= a * a;
  }
  return s;
}

inline Rgbd total_weight(const std::vector<GhostTerm>& terms) {
  Rgbd sum = Rgbd::Zero();
  for (const GhostTerm& t : terms) sum += t.weight;
  return sum;
}

/// GGX microfacet normal in the local frame (z = macro normal), alpha = roughness^2.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> ggx_sample(Scalar roughness, Scalar u1, Scalar u2) {
  const Scalar alpha = roughness * roughness;
  const Scalar tan_theta = alpha * std::sqrt(u1 / (Scalar(1) - u1));
  const Scalar cos_theta = Scalar(1) / std::sqrt(Scalar(1) + tan_theta * tan_theta);
  const Scalar sin_theta = tan_theta * cos_theta;
  const Scalar phi = Scalar(2) * std::numbers::pi_v<Scalar> * u2;
  return {sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta};
}

}  // namespace glassforge
