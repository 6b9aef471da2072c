// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>

#include "glassforge/image.hpp"
#include "glassforge/optics.hpp"
#include "glassforge/scene.hpp"

namespace glassforge {

/// `aligned` continues the order-0 transmitted ray unrefracted so T and B
/// share pixel geometry; `exact` applies the slab's lateral displacement.
enum class RefractionMode { aligned, exact };

RefractionMode parse_refraction_mode(std::string_view name);
std::string_view to_string(RefractionMode mode);

struct RenderSettings {
  int spp = 16;
  int max_order = kDefaultGhostOrder;
  std::uint64_t seed = 0;
  RefractionMode refraction_mode = RefractionMode::aligned;
  double max_miss_fraction = 0.05;
  int jobs = 0;  // 0 = hardware concurrency
};

struct RenderTriple {
  LinearImage blended;       // B
  LinearImage transmission;  // T
  LinearImage reflection;    // R
  double miss_fraction = 0.0;
  double max_shift_px = 0.0;
};

/// Renders B, T and R for one glass configuration. Per-sample randomness is
/// a counter hash of (seed, pixel, sample), so the result does not depend on
/// settings.jobs. Throws Error when the order-0 miss fraction exceeds
/// settings.max_miss_fraction.
RenderTriple render_triple(const Scene& scene, const GlassMaterial& material,
                           const RenderSettings& settings);

/// Pixel shift of the exact-mode transmitted ray at the background plane
/// for the ray through continuous pixel (px, py).
double transmitted_shift_px(const Scene& scene, const GlassMaterial& material, double px,
                            double py);

/// Maximum of transmitted_shift_px over the four image corners.
double validate_alignment(const Scene& scene, const GlassMaterial& material);

}  // namespace glassforge
