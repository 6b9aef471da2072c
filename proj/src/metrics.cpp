// SPDX-License-Identifier: Apache-2.0
#include "glassforge/metrics.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace glassforge {

namespace {

Eigen::ArrayXd window_weights(SsimWindow window) {
  if (window == SsimWindow::uniform7) return Eigen::ArrayXd::Constant(7, 1.0 / 7.0);
  Eigen::ArrayXd w(11);
  for (int i = 0; i < 11; ++i) w[i] = std::exp(-double((i - 5) * (i - 5)) / (2.0 * 1.5 * 1.5));
  return w / w.sum();
}

// Separable correlation keeping only fully interior windows.
Plane filter_valid(const Plane& x, const Eigen::ArrayXd& k) {
  const Eigen::Index n = k.size();
  const Eigen::Index rows = x.rows() - n + 1;
  const Eigen::Index cols = x.cols() - n + 1;
  Plane tmp = Plane::Zero(x.rows(), cols);
  for (Eigen::Index i = 0; i < n; ++i) tmp += k[i] * x.middleCols(i, cols);
  Plane out = Plane::Zero(rows, cols);
  for (Eigen::Index i = 0; i < n; ++i) out += k[i] * tmp.middleRows(i, rows);
  return out;
}

Plane channel_plane(const SrgbImage& img, int c) { return img.channel(c).cast<double>(); }

Plane downsample2(const Plane& x) {
  const Eigen::Index rows = x.rows() / 2;
  const Eigen::Index cols = x.cols() / 2;
  Plane out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      out(r, c) = 0.25 * (x(2 * r, 2 * c) + x(2 * r + 1, 2 * c) + x(2 * r, 2 * c + 1) +
                          x(2 * r + 1, 2 * c + 1));
  return out;
}

void require_same_size(const SrgbImage& a, const SrgbImage& b, const char* what) {
  if (!a.same_size(b))
    throw Error(std::string(what) + ": image sizes differ (" + std::to_string(a.width()) + "x" +
                std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                std::to_string(b.height()) + ")");
}

}  // namespace

SsimWindow parse_ssim_window(std::string_view name) {
  if (name == "uniform7") return SsimWindow::uniform7;
  if (name == "gaussian11") return SsimWindow::gaussian11;
  throw Error("unknown SSIM window '" + std::string(name) + "' (expected uniform7|gaussian11)");
}

std::string_view to_string(SsimWindow window) {
  return window == SsimWindow::uniform7 ? "uniform7" : "gaussian11";
}

SsimTerms ssim_plane(const Plane& a, const Plane& b, const SsimSettings& s) {
  const int ws = s.window_size();
  if (a.rows() < ws || a.cols() < ws)
    throw Error("ssim: image " + std::to_string(a.cols()) + "x" + std::to_string(a.rows()) +
                " is smaller than the " + std::to_string(ws) + "x" + std::to_string(ws) +
                " window");
  const Eigen::ArrayXd k = window_weights(s.window);
  const double c1 = (s.k1 * s.dynamic_range) * (s.k1 * s.dynamic_range);
  const double c2 = (s.k2 * s.dynamic_range) * (s.k2 * s.dynamic_range);
  // Uniform windows use the unbiased sample covariance.
  const double n = double(ws) * double(ws);
  const double cov_norm = s.window == SsimWindow::uniform7 ? n / (n - 1.0) : 1.0;

  const Plane mu_a = filter_valid(a, k);
  const Plane mu_b = filter_valid(b, k);
  const Plane var_a = cov_norm * (filter_valid(a * a, k) - mu_a * mu_a);
  const Plane var_b = cov_norm * (filter_valid(b * b, k) - mu_b * mu_b);
  const Plane cov = cov_norm * (filter_valid(a * b, k) - mu_a * mu_b);

  const Plane cs = (2.0 * cov + c2) / (var_a + var_b + c2);
  const Plane lum = (2.0 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1);
  return {(lum * cs).mean(), cs.mean()};
}

double psnr(const SrgbImage& a, const SrgbImage& b) {
  require_same_size(a, b, "psnr");
  if (a.empty()) throw Error("psnr: empty images");
  const double mse =
      (a.array().cast<double>() - b.array().cast<double>()).square().mean();
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double ssim(const SrgbImage& a, const SrgbImage& b, const SsimSettings& settings) {
  require_same_size(a, b, "ssim");
  double sum = 0.0;
  for (int c = 0; c < 3; ++c)
    sum += ssim_plane(channel_plane(a, c), channel_plane(b, c), settings).ssim;
  return sum / 3.0;
}

double ms_ssim(const SrgbImage& a, const SrgbImage& b) {
  require_same_size(a, b, "ms_ssim");
  if (std::min(a.width(), a.height()) < kMsSsimMinSize)
    throw Error("ms_ssim: images must be at least " + std::to_string(kMsSsimMinSize) + "x" +
                std::to_string(kMsSsimMinSize) + " pixels, got " + std::to_string(a.width()) +
                "x" + std::to_string(a.height()));
  double weight_sum = 0.0;
  for (double w : kMsSsimWeights) weight_sum += w;

  const SsimSettings gauss{SsimWindow::gaussian11};
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    Plane pa = channel_plane(a, c);
    Plane pb = channel_plane(b, c);
    double value = 1.0;
    for (std::size_t scale = 0; scale < kMsSsimWeights.size(); ++scale) {
      const SsimTerms t = ssim_plane(pa, pb, gauss);
      const double w = kMsSsimWeights[scale] / weight_sum;
      if (scale + 1 < kMsSsimWeights.size()) {
        value *= std::pow(std::max(t.cs, 0.0), w);
        pa = downsample2(pa);
        pb = downsample2(pb);
      } else {
        value *= std::pow(std::max(t.ssim, 0.0), w);
      }
    }
    total += value;
  }
  return total / 3.0;
}

double composite_loss_from(double psnr_db, double ssim_value, const LossWeights& w) {
  if (w.lambda_psnr < 0.0 || w.lambda_ssim < 0.0) throw Error("loss weights must be >= 0");
  return w.lambda_psnr * -psnr_db + w.lambda_ssim * (1.0 - ssim_value);
}

double composite_loss(const SrgbImage& pred, const SrgbImage& gt, const LossWeights& weights,
                      const SsimSettings& settings) {
  return composite_loss_from(psnr(pred, gt), ssim(pred, gt, settings), weights);
}

}  // namespace glassforge
