// SPDX-License-Identifier: Apache-2.0
#include "glassforge/alphablend.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace glassforge {

namespace {

LinearImage to_unit_range(const SrgbImage& img) {
  LinearImage out(img.width(), img.height());
  out.array() = img.array().cast<float>() / 255.0f;
  return out;
}

SrgbImage from_unit_range(const LinearImage& img) {
  SrgbImage out(img.width(), img.height());
  out.array() = (img.array().max(0.0f).min(1.0f) * 255.0f).round().cast<std::uint8_t>();
  return out;
}

}  // namespace

void BlendParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("blend: alpha must be in [0,1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("blend: beta must be in [0,1]");
  if (!(blur_sigma >= 0.0)) throw Error("blend: blur sigma must be >= 0");
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = int(std::ceil(3.0 * sigma));
  std::vector<double> w(std::size_t(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    w[std::size_t(i + radius)] = std::exp(-double(i * i) / (2.0 * sigma * sigma));
    sum += w[std::size_t(i + radius)];
  }
  for (double& v : w) v /= sum;
  return w;
}

BlendParams sample_blend_params(SplitMix64& rng, const BlendRanges& r) {
  BlendParams p;
  p.alpha = rng.uniform(r.alpha_lo, r.alpha_hi);
  p.beta = rng.uniform(r.beta_lo, r.beta_hi);
  p.blur_sigma = rng.uniform(r.sigma_lo, r.sigma_hi);
  return p;
}

BlendSpace parse_blend_space(std::string_view name) {
  if (name == "srgb") return BlendSpace::srgb;
  if (name == "linear") return BlendSpace::linear;
  throw Error("unknown blend space '" + std::string(name) + "' (expected srgb|linear)");
}

SrgbImage alpha_blend(const SrgbImage& t, const SrgbImage& r, const BlendParams& params,
                      BlendSpace space) {
  if (space == BlendSpace::linear)
    return srgb_encode(alpha_blend(srgb_decode(t), srgb_decode(r), params));
  return from_unit_range(alpha_blend(to_unit_range(t), to_unit_range(r), params));
}

}  // namespace glassforge
