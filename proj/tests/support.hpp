// SPDX-License-Identifier: Apache-2.0
// Shared test fixtures and brute-force reference implementations. The
// oracles here deliberately avoid the library's own filtering code paths.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "glassforge/image.hpp"
#include "glassforge/image_io.hpp"
#include "glassforge/scene.hpp"

namespace glassforge::testing {

inline SrgbImage random_srgb(int w, int h, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  SrgbImage img(w, h);
  for (auto& v : img.values()) v = std::uint8_t(dist(gen));
  return img;
}

/// Structured pair: b is a noisy, shifted-intensity copy of a, so SSIM
/// lands well inside (0, 1) instead of near zero.
inline std::pair<SrgbImage, SrgbImage> correlated_pair(int w, int h, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> noise(0.0, 12.0);
  std::uniform_real_distribution<double> phase(0.0, 6.28);
  const double p0 = phase(gen), p1 = phase(gen);
  SrgbImage a(w, h), b(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const double base = 128 + 80 * std::sin(0.21 * x + p0 + c) * std::cos(0.17 * y + p1);
        const double va = base + noise(gen);
        const double vb = 0.9 * base + 10 + noise(gen);
        a(x, y, c) = std::uint8_t(std::clamp(std::lround(va), 0L, 255L));
        b(x, y, c) = std::uint8_t(std::clamp(std::lround(vb), 0L, 255L));
      }
  return {a, b};
}

/// Smooth random field: bilinear interpolation of a coarse random grid.
inline LinearImage smooth_random(int w, int h, std::uint32_t seed, int cells = 6) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<float> dist(0.05f, 0.95f);
  std::vector<float> grid(std::size_t((cells + 1) * (cells + 1) * 3));
  for (float& g : grid) g = dist(gen);
  LinearImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double gx = (x + 0.5) / w * cells;
      const double gy = (y + 0.5) / h * cells;
      const int ix = std::min(int(gx), cells - 1);
      const int iy = std::min(int(gy), cells - 1);
      const double tx = gx - ix, ty = gy - iy;
      for (int c = 0; c < 3; ++c) {
        auto at = [&](int i, int j) { return grid[std::size_t(((j * (cells + 1)) + i) * 3 + c)]; };
        img(x, y, c) = float((1 - ty) * ((1 - tx) * at(ix, iy) + tx * at(ix + 1, iy)) +
                             ty * ((1 - tx) * at(ix, iy + 1) + tx * at(ix + 1, iy + 1)));
      }
    }
  return img;
}

inline std::shared_ptr<const LinearImage> constant_texture(float v, int w = 16, int h = 16) {
  return std::make_shared<const LinearImage>(w, h, v);
}

inline std::shared_ptr<const LinearImage> checker_texture(int w, int h, int cell, float lo,
                                                          float hi) {
  auto img = std::make_shared<LinearImage>(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img->pixel(x, y) = Rgb::Constant(((x / cell + y / cell) % 2) ? hi : lo);
  return img;
}

inline SceneConfig basic_config(int size = 64) {
  SceneConfig c;
  c.camera.width = size;
  c.camera.height = size;
  c.camera.fov_x = 60.0;
  c.glass.distance_m = 0.5;
  c.background.distance_m = 2.0;
  c.background.texture = constant_texture(0.5f);
  c.reflection.mode = ReflectionMode::envmap;
  c.reflection.texture = constant_texture(1.0f, 32, 16);
  return c;
}

/// Flat (non-RLE) Radiance file; the encoder is written out independently of
/// the library's decoder.
inline void write_rgbe(const std::filesystem::path& path, const LinearImage& img) {
  std::ofstream out(path, std::ios::binary);
  out << "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " << img.height() << " +X " << img.width()
      << "\n";
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const float m = img.pixel(x, y).maxCoeff();
      unsigned char texel[4] = {0, 0, 0, 0};
      if (m > 1e-32f) {
        int e = 0;
        const float scale = std::frexp(m, &e) * 256.0f / m;
        for (int c = 0; c < 3; ++c) texel[c] = (unsigned char)(img(x, y, c) * scale);
        texel[3] = (unsigned char)(e + 128);
      }
      out.write(reinterpret_cast<const char*>(texel), 4);
    }
}

/// Small hdr/ and srgb/ pools of smooth random images under `root`.
inline void write_asset_pools(const std::filesystem::path& root, int n_srgb = 4, int n_hdr = 3) {
  std::filesystem::create_directories(root / "srgb");
  std::filesystem::create_directories(root / "hdr");
  for (int i = 0; i < n_srgb; ++i)
    write_png(root / "srgb" / ("img" + std::to_string(i) + ".png"),
              srgb_encode(smooth_random(48, 40, std::uint32_t(100 + i))));
  for (int i = 0; i < n_hdr; ++i) {
    LinearImage env = smooth_random(64, 32, std::uint32_t(200 + i), 4);
    env.array() *= 3.0f;
    write_rgbe(root / "hdr" / ("env" + std::to_string(i) + ".hdr"), env);
  }
}

// ---- brute-force SSIM ------------------------------------------------------

/// Direct per-window SSIM of one channel (two-pass moments per window).
struct BruteSsim {
  double ssim = 0.0;
  double cs = 0.0;
};

inline BruteSsim brute_ssim_plane(const std::vector<std::vector<double>>& a,
                                  const std::vector<std::vector<double>>& b, bool gaussian) {
  const int h = int(a.size());
  const int w = int(a[0].size());
  const int ws = gaussian ? 11 : 7;
  std::vector<double> k1d(static_cast<std::size_t>(ws));
  double ksum = 0.0;
  for (int i = 0; i < ws; ++i) {
    const double d = i - ws / 2;
    k1d[std::size_t(i)] = gaussian ? std::exp(-d * d / (2 * 1.5 * 1.5)) : 1.0;
    ksum += k1d[std::size_t(i)];
  }
  std::vector<double> win(std::size_t(ws * ws));
  for (int i = 0; i < ws; ++i)
    for (int j = 0; j < ws; ++j)
      win[std::size_t(i * ws + j)] = k1d[std::size_t(i)] * k1d[std::size_t(j)] / (ksum * ksum);
  const double n = double(ws * ws);
  const double norm = gaussian ? 1.0 : n / (n - 1.0);
  const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);

  double ssim_sum = 0.0, cs_sum = 0.0;
  int count = 0;
  for (int y0 = 0; y0 + ws <= h; ++y0)
    for (int x0 = 0; x0 + ws <= w; ++x0) {
      double ma = 0, mb = 0;
      for (int i = 0; i < ws; ++i)
        for (int j = 0; j < ws; ++j) {
          const double wt = win[std::size_t(i * ws + j)];
          ma += wt * a[std::size_t(y0 + i)][std::size_t(x0 + j)];
          mb += wt * b[std::size_t(y0 + i)][std::size_t(x0 + j)];
        }
      double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < ws; ++i)
        for (int j = 0; j < ws; ++j) {
          const double wt = win[std::size_t(i * ws + j)];
          const double da = a[std::size_t(y0 + i)][std::size_t(x0 + j)] - ma;
          const double db = b[std::size_t(y0 + i)][std::size_t(x0 + j)] - mb;
          va += wt * da * da;
          vb += wt * db * db;
          cov += wt * da * db;
        }
      va *= norm;
      vb *= norm;
      cov *= norm;
      const double cs = (2 * cov + c2) / (va + vb + c2);
      const double l = (2 * ma * mb + c1) / (ma * ma + mb * mb + c1);
      ssim_sum += l * cs;
      cs_sum += cs;
      ++count;
    }
  return {ssim_sum / count, cs_sum / count};
}

inline std::vector<std::vector<double>> plane_of(const SrgbImage& img, int c) {
  std::vector<std::vector<double>> p(std::size_t(img.height()),
                                     std::vector<double>(std::size_t(img.width())));
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) p[std::size_t(y)][std::size_t(x)] = img(x, y, c);
  return p;
}

inline double brute_ssim(const SrgbImage& a, const SrgbImage& b, bool gaussian) {
  double s = 0;
  for (int c = 0; c < 3; ++c) s += brute_ssim_plane(plane_of(a, c), plane_of(b, c), gaussian).ssim;
  return s / 3;
}

inline std::vector<std::vector<double>> halve(const std::vector<std::vector<double>>& p) {
  const std::size_t h = p.size() / 2, w = p[0].size() / 2;
  std::vector<std::vector<double>> out(h, std::vector<double>(w));
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      out[y][x] = (p[2 * y][2 * x] + p[2 * y + 1][2 * x] + p[2 * y][2 * x + 1] +
                   p[2 * y + 1][2 * x + 1]) / 4.0;
  return out;
}

inline double brute_ms_ssim(const SrgbImage& a, const SrgbImage& b) {
  const double w[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  const double wsum = w[0] + w[1] + w[2] + w[3] + w[4];
  double total = 0;
  for (int c = 0; c < 3; ++c) {
    auto pa = plane_of(a, c), pb = plane_of(b, c);
    double v = 1;
    for (int s = 0; s < 5; ++s) {
      const BruteSsim t = brute_ssim_plane(pa, pb, true);
      if (s < 4) {
        v *= std::pow(std::max(t.cs, 0.0), w[s] / wsum);
        pa = halve(pa);
        pb = halve(pb);
      } else {
        v *= std::pow(std::max(t.ssim, 0.0), w[s] / wsum);
      }
    }
    total += v;
  }
  return total / 3;
}

// ---- direct-kernel Lanczos (upsampling only) -------------------------------

inline double lanczos3(double x) {
  if (x == 0) return 1;
  if (std::abs(x) >= 3) return 0;
  const double px = std::numbers::pi * x;
  return 3 * std::sin(px) * std::sin(px / 3) / (px * px);
}

inline std::vector<double> lanczos_upsample_1d(const std::vector<double>& src, int dst_len) {
  const int n = int(src.size());
  std::vector<double> out(static_cast<std::size_t>(dst_len));
  for (int i = 0; i < dst_len; ++i) {
    const double center = (i + 0.5) * n / dst_len - 0.5;
    double acc = 0, wsum = 0;
    for (int j = int(std::floor(center)) - 3; j <= int(std::ceil(center)) + 3; ++j) {
      const double wt = lanczos3(j - center);
      acc += wt * src[std::size_t(std::clamp(j, 0, n - 1))];
      wsum += wt;
    }
    out[std::size_t(i)] = acc / wsum;
  }
  return out;
}

}  // namespace glassforge::testing
