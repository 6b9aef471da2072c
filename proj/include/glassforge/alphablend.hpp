// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "glassforge/image.hpp"
#include "glassforge/rng.hpp"

namespace glassforge {

struct BlendParams {
  double alpha = 0.8;
  double beta = 0.3;
  double blur_sigma = 0.0;  // pixels, applied to R before blending

  void validate() const;
};

/// Uniform ranges used when blend parameters are drawn at random.
struct BlendRanges {
  double alpha_lo = 0.6, alpha_hi = 1.0;
  double beta_lo = 0.1, beta_hi = 0.5;
  double sigma_lo = 0.0, sigma_hi = 5.0;
};

BlendParams sample_blend_params(SplitMix64& rng, const BlendRanges& ranges = {});

/// Normalized 1-D Gaussian taps, radius ceil(3 sigma); sigma must be > 0.
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian, radius ceil(3 sigma), normalized, clamp-to-edge.
/// sigma = 0 returns the input unchanged.
template <typename Scalar>
Image<Scalar> gaussian_blur(const Image<Scalar>& img, double sigma) {
  if (!(sigma >= 0.0)) throw Error("gaussian_blur: sigma must be >= 0");
  if (sigma == 0.0 || img.empty()) return img;
  const auto k = gaussian_kernel(sigma);
  const int radius = int(k.size() / 2);
  const int w = img.width();
  const int h = img.height();

  Image<Scalar> tmp(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Eigen::Array<Scalar, 3, 1> acc = Eigen::Array<Scalar, 3, 1>::Zero();
      for (int i = -radius; i <= radius; ++i)
        acc += Scalar(k[std::size_t(i + radius)]) * img.pixel(std::clamp(x + i, 0, w - 1), y);
      tmp.pixel(x, y) = acc;
    }

  Image<Scalar> out(w, h);
  for (int y = 0; y < h; ++y) {
    auto row = out.array().row(y);
    for (int i = -radius; i <= radius; ++i)
      row += Scalar(k[std::size_t(i + radius)]) * tmp.array().row(std::clamp(y + i, 0, h - 1));
  }
  return out;
}

/// B = alpha T + beta R - alpha beta T R for one sample.
template <typename Scalar>
Scalar blend_value(Scalar t, Scalar r, Scalar alpha, Scalar beta) {
  return alpha * t + beta * r - alpha * beta * t * r;
}

/// B = alpha T + beta R' - alpha beta T R', with R' = gaussian_blur(R, sigma),
/// clamped to [0, 1].
template <typename Scalar>
Image<Scalar> alpha_blend(const Image<Scalar>& t, const Image<Scalar>& r,
                          const BlendParams& params) {
  params.validate();
  if (!t.same_size(r))
    throw Error("alpha_blend: T is " + std::to_string(t.width()) + "x" +
                std::to_string(t.height()) + " but R is " + std::to_string(r.width()) + "x" +
                std::to_string(r.height()));
  const Image<Scalar> blurred = gaussian_blur(r, params.blur_sigma);
  const Scalar a = Scalar(params.alpha);
  const Scalar b = Scalar(params.beta);
  Image<Scalar> out(t.width(), t.height());
  out.array() = (a * t.array() + b * blurred.array() - a * b * t.array() * blurred.array())
                    .max(Scalar(0))
                    .min(Scalar(1));
  return out;
}

/// Which values the blend formula sees: the sRGB code values scaled to
/// [0,1] (the screen-space baseline) or decoded linear radiance.
enum class BlendSpace { srgb, linear };
BlendSpace parse_blend_space(std::string_view name);

SrgbImage alpha_blend(const SrgbImage& transmission, const SrgbImage& reflection,
                      const BlendParams& params, BlendSpace space);

}  // namespace glassforge
