// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string_view>

#include <Eigen/Core>

#include "glassforge/image.hpp"

namespace glassforge {

enum class SsimWindow { uniform7, gaussian11 };

SsimWindow parse_ssim_window(std::string_view name);
std::string_view to_string(SsimWindow window);

struct SsimSettings {
  SsimWindow window = SsimWindow::uniform7;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;

  int window_size() const { return window == SsimWindow::uniform7 ? 7 : 11; }
};

struct LossWeights {
  double lambda_psnr = 0.1;
  double lambda_ssim = 20.0;
};

inline constexpr double kPsnrCap = 100.0;
inline constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
inline constexpr int kMsSsimMinSize = 11 * 16;

using Plane = Eigen::ArrayXXd;

/// Mean SSIM and mean contrast-structure term of one channel, over all
/// window positions that lie fully inside the image.
struct SsimTerms {
  double ssim = 1.0;
  double cs = 1.0;
};
SsimTerms ssim_plane(const Plane& a, const Plane& b, const SsimSettings& settings);

/// 10 log10(255^2 / MSE) over all channels, capped at 100 dB.
double psnr(const SrgbImage& a, const SrgbImage& b);
/// Mean over channels of the mean local SSIM.
double ssim(const SrgbImage& a, const SrgbImage& b, const SsimSettings& settings = {});
/// Five-scale MS-SSIM with the Gaussian 11x11 window and 2x2 average pooling.
/// Exponents are renormalized to sum to one.
double ms_ssim(const SrgbImage& a, const SrgbImage& b);

/// lambda_psnr * (-PSNR) + lambda_ssim * (1 - SSIM).
double composite_loss(const SrgbImage& pred, const SrgbImage& gt, const LossWeights& weights = {},
                      const SsimSettings& settings = {});
double composite_loss_from(double psnr_db, double ssim_value, const LossWeights& weights = {});

}  // namespace glassforge
