// SPDX-License-Identifier: Apache-2.0
#include "glassforge/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace glassforge {

namespace {

const std::array<float, 256>& decode_table() {
  static const std::array<float, 256> table = [] {
    std::array<float, 256> t{};
    for (int i = 0; i < 256; ++i) {
      const double c = i / 255.0;
      t[i] = float(c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4));
    }
    return t;
  }();
  return table;
}

constexpr int kLanczosLobes = 3;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double lanczos(double x) {
  if (std::abs(x) >= kLanczosLobes) return 0.0;
  return sinc(x) * sinc(x / kLanczosLobes);
}

struct Contribution {
  int first = 0;
  std::vector<float> weights;
};

// Per-output-sample tap lists along one axis. Downsampling stretches the
// kernel by the scale factor so the filter also band-limits.
std::vector<Contribution> lanczos_taps(int src_len, int dst_len) {
  const double scale = double(src_len) / double(dst_len);
  const double stretch = std::max(1.0, scale);
  const double support = kLanczosLobes * stretch;
  std::vector<Contribution> taps(dst_len);
  for (int i = 0; i < dst_len; ++i) {
    const double center = (i + 0.5) * scale - 0.5;
    const int lo = int(std::floor(center - support)) + 1;
    const int hi = int(std::ceil(center + support)) - 1;
    Contribution& c = taps[i];
    c.first = lo;
    c.weights.resize(hi - lo + 1);
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) {
      const double w = lanczos((j - center) / stretch);
      c.weights[j - lo] = float(w);
      sum += w;
    }
    for (float& w : c.weights) w = float(w / sum);
  }
  return taps;
}

}  // namespace

float srgb_to_linear(std::uint8_t code) { return decode_table()[code]; }

std::uint8_t linear_to_srgb(float value) {
  const double c = std::clamp(double(value), 0.0, 1.0);
  const double e = c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
  return std::uint8_t(std::round(std::clamp(e, 0.0, 1.0) * 255.0));
}

LinearImage srgb_decode(const SrgbImage& img) {
  LinearImage out(img.width(), img.height());
  const auto src = img.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = srgb_to_linear(src[i]);
  return out;
}

SrgbImage srgb_encode(const LinearImage& img) {
  SrgbImage out(img.width(), img.height());
  const auto src = img.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!std::isfinite(src[i])) {
      const std::size_t pixel = i / 3;
      throw Error("srgb_encode: non-finite value at pixel " + std::to_string(pixel) + " (x=" +
                  std::to_string(pixel % std::size_t(img.width())) +
                  ", y=" + std::to_string(pixel / std::size_t(img.width())) + ")");
    }
    dst[i] = linear_to_srgb(src[i]);
  }
  return out;
}

LinearImage resample_lanczos(const LinearImage& img, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1)
    throw Error("resample_lanczos: target size must be at least 1x1, got " +
                std::to_string(new_width) + "x" + std::to_string(new_height));
  if (img.empty()) throw Error("resample_lanczos: empty source image");
  const int w = img.width();
  const int h = img.height();

  // Horizontal pass.
  const auto xtaps = lanczos_taps(w, new_width);
  LinearImage tmp(new_width, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < new_width; ++x) {
      const Contribution& c = xtaps[x];
      Rgb acc = Rgb::Zero();
      for (std::size_t k = 0; k < c.weights.size(); ++k) {
        const int sx = std::clamp(c.first + int(k), 0, w - 1);
        acc += c.weights[k] * img.pixel(sx, y);
      }
      tmp.pixel(x, y) = acc;
    }
  }

  // Vertical pass.
  const auto ytaps = lanczos_taps(h, new_height);
  LinearImage out(new_width, new_height);
  for (int y = 0; y < new_height; ++y) {
    const Contribution& c = ytaps[y];
    auto row = out.array().row(y);
    for (std::size_t k = 0; k < c.weights.size(); ++k) {
      const int sy = std::clamp(c.first + int(k), 0, h - 1);
      row += c.weights[k] * tmp.array().row(sy);
    }
  }
  return out;
}

Rgb bilinear_clamped(const LinearImage& img, double x, double y) {
  const double fx = std::clamp(x - 0.5, 0.0, double(img.width() - 1));
  const double fy = std::clamp(y - 0.5, 0.0, double(img.height() - 1));
  const int x0 = int(fx);
  const int y0 = int(fy);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const float tx = float(fx - x0);
  const float ty = float(fy - y0);
  const Rgb top = (1 - tx) * img.pixel(x0, y0) + tx * img.pixel(x1, y0);
  const Rgb bottom = (1 - tx) * img.pixel(x0, y1) + tx * img.pixel(x1, y1);
  return (1 - ty) * top + ty * bottom;
}

Rgb envmap_sample(const EnvMap& env, const Eigen::Vector3d& d) {
  if (std::abs(d.norm() - 1.0) > 1e-6)
    throw Error("envmap_sample: direction is not unit length (norm " + std::to_string(d.norm()) +
                ")");
  const LinearImage& img = env.image;
  const double u = (std::atan2(d.x(), -d.z()) + std::numbers::pi) / (2.0 * std::numbers::pi);
  const double v = std::acos(std::clamp(d.y(), -1.0, 1.0)) / std::numbers::pi;

  const int w = img.width();
  const int h = img.height();
  const double fx = u * w - 0.5;
  const double fy = std::clamp(v * h - 0.5, 0.0, double(h - 1));
  const int xf = int(std::floor(fx));
  const int y0 = int(fy);
  const int y1 = std::min(y0 + 1, h - 1);
  const float tx = float(fx - xf);
  const float ty = float(fy - y0);
  const int x0 = ((xf % w) + w) % w;
  const int x1 = (x0 + 1) % w;
  const Rgb top = (1 - tx) * img.pixel(x0, y0) + tx * img.pixel(x1, y0);
  const Rgb bottom = (1 - tx) * img.pixel(x0, y1) + tx * img.pixel(x1, y1);
  return env.exposure * ((1 - ty) * top + ty * bottom);
}

double mean_luminance(const LinearImage& img) {
  if (img.empty()) return 0.0;
  double sum = 0.0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      sum += 0.2126 * img(x, y, 0) + 0.7152 * img(x, y, 1) + 0.0722 * img(x, y, 2);
  return sum / double(img.pixel_count());
}

}  // namespace glassforge
