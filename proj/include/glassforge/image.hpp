// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace glassforge {

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rgb = Eigen::Array3f;
using Rgbd = Eigen::Array3d;

/// Interleaved RGB image, row-major, templated on the channel scalar.
///
/// Storage is an Eigen row-major array with one row per scanline and
/// 3 * width columns, so whole-image arithmetic can be written as Eigen
/// array expressions on array().
template <typename Scalar>
class Image {
 public:
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using PixelMap = Eigen::Map<Eigen::Array<Scalar, 3, 1>>;
  using ConstPixelMap = Eigen::Map<const Eigen::Array<Scalar, 3, 1>>;

  Image() = default;
  Image(int width, int height, Scalar fill = Scalar(0)) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw Error("Image: negative dimensions");
    data_.setConstant(height, 3 * width, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return std::size_t(width_) * std::size_t(height_); }
  bool empty() const { return pixel_count() == 0; }
  bool same_size(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  Scalar& operator()(int x, int y, int c) { return data_(y, 3 * x + c); }
  Scalar operator()(int x, int y, int c) const { return data_(y, 3 * x + c); }

  PixelMap pixel(int x, int y) { return PixelMap(&data_(y, 3 * x)); }
  ConstPixelMap pixel(int x, int y) const { return ConstPixelMap(&data_(y, 3 * x)); }

  Storage& array() { return data_; }
  const Storage& array() const { return data_; }

  std::span<Scalar> values() { return {data_.data(), std::size_t(data_.size())}; }
  std::span<const Scalar> values() const { return {data_.data(), std::size_t(data_.size())}; }

  /// One channel as a height x width array (copy).
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> channel(int c) const {
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(height_, width_);
    for (int y = 0; y < height_; ++y)
      for (int x = 0; x < width_; ++x) out(y, x) = (*this)(x, y, c);
    return out;
  }

  bool operator==(const Image& other) const {
    return same_size(other) && (data_ == other.data_).all();
  }

 private:
  int width_ = 0;
  int height_ = 0;
  Storage data_;
};

using LinearImage = Image<float>;
using SrgbImage = Image<std::uint8_t>;

/// Equirectangular radiance map with a scalar exposure multiplier.
struct EnvMap {
  LinearImage image;
  float exposure = 1.0f;
};

/// sRGB EOTF for one 8-bit code value.
float srgb_to_linear(std::uint8_t code);
/// Clamp to [0,1], apply the sRGB OETF, round half away from zero.
std::uint8_t linear_to_srgb(float value);

LinearImage srgb_decode(const SrgbImage& img);
/// Throws Error naming the first non-finite sample.
SrgbImage srgb_encode(const LinearImage& img);

/// Separable Lanczos-3 resampling with clamp-to-edge borders.
LinearImage resample_lanczos(const LinearImage& img, int new_width, int new_height);

/// Equirectangular lookup, bilinear, wrapping in u and clamped in v.
Rgb envmap_sample(const EnvMap& env, const Eigen::Vector3d& direction);

/// Bilinear lookup at continuous pixel coordinates (pixel centers at +0.5),
/// clamp-to-edge on both axes.
Rgb bilinear_clamped(const LinearImage& img, double x, double y);

/// Mean of 0.2126 R + 0.7152 G + 0.0722 B over all pixels.
double mean_luminance(const LinearImage& img);

/// Mean over all samples of all channels.
template <typename Scalar>
double mean_value(const Image<Scalar>& img) {
  if (img.empty()) return 0.0;
  return img.array().template cast<double>().mean();
}

}  // namespace glassforge
