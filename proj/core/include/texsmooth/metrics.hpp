#pragma once

#include "texsmooth/image.hpp"

namespace texsmooth::metrics {

inline constexpr int kSsimWindow = 8;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;
/// Text output caps infinite PSNR here.
inline constexpr double kPsnrCapDb = 99.0;

struct MetricReport {
  double mse = 0.0;
  double psnr = 0.0;  // dB, +inf for identical images
  double ssim = 1.0;
};

/// Mean over pixels and channels of the squared difference.
double mse_metric(const Image& a, const Image& b);

/// 10 log10(1 / mse); +inf when mse is zero.
double psnr_from_mse(double mse);
double psnr(const Image& a, const Image& b);

/// PSNR clipped to kPsnrCapDb for printing.
double psnr_for_display(double db);

/// Mean SSIM over all 8x8 windows (stride 1, uniform weights, population
/// statistics) of the luma of both images.
double ssim(const Image& a, const Image& b);

/// SSIM of a single window given its statistics.
double ssim_window(double mu_a, double mu_b, double var_a, double var_b, double cov);

MetricReport evaluate(const Image& pred, const Image& gt);

}  // namespace texsmooth::metrics
