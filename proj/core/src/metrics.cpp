#include "texsmooth/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace texsmooth::metrics {

double mse_metric(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mse: image shapes differ");
  const auto& x = a.data();
  const auto& y = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x[i]) - y[i];
    sum += d * d;
  }
  return sum / static_cast<double>(x.size());
}

double psnr_from_mse(double mse) {
  if (mse < 0.0) throw std::invalid_argument("psnr: negative mse");
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double psnr(const Image& a, const Image& b) { return psnr_from_mse(mse_metric(a, b)); }

double psnr_for_display(double db) { return db > kPsnrCapDb ? kPsnrCapDb : db; }

double ssim_window(double mu_a, double mu_b, double var_a, double var_b, double cov) {
  return ((2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2)) /
         ((mu_a * mu_a + mu_b * mu_b + kSsimC1) * (var_a + var_b + kSsimC2));
}

double ssim(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("ssim: image shapes differ");
  if (a.height() < kSsimWindow || a.width() < kSsimWindow) {
    throw std::invalid_argument("ssim: image smaller than the 8x8 window");
  }
  const Image ga = to_grayscale(a);
  const Image gb = to_grayscale(b);
  const int h = ga.height();
  const int w = ga.width();
  const double n = kSsimWindow * kSsimWindow;

  // Direct per-window sums keep each window's result independent of its
  // neighbours, so a single-window image matches the closed form exactly.
  double total = 0.0;
  for (int y0 = 0; y0 + kSsimWindow <= h; ++y0) {
    for (int x0 = 0; x0 + kSsimWindow <= w; ++x0) {
      double sa = 0.0, sb = 0.0;
      for (int y = y0; y < y0 + kSsimWindow; ++y) {
        for (int x = x0; x < x0 + kSsimWindow; ++x) {
          sa += ga.at(y, x, 0);
          sb += gb.at(y, x, 0);
        }
      }
      const double mu_a = sa / n;
      const double mu_b = sb / n;
      double va = 0.0, vb = 0.0, cv = 0.0;
      for (int y = y0; y < y0 + kSsimWindow; ++y) {
        for (int x = x0; x < x0 + kSsimWindow; ++x) {
          const double da = ga.at(y, x, 0) - mu_a;
          const double db = gb.at(y, x, 0) - mu_b;
          va += da * da;
          vb += db * db;
          cv += da * db;
        }
      }
      total += ssim_window(mu_a, mu_b, va / n, vb / n, cv / n);
    }
  }
  const double windows = static_cast<double>(h - kSsimWindow + 1) * (w - kSsimWindow + 1);
  return total / windows;
}

MetricReport evaluate(const Image& pred, const Image& gt) {
  MetricReport r;
  r.mse = mse_metric(pred, gt);
  r.psnr = psnr_from_mse(r.mse);
  r.ssim = ssim(pred, gt);
  return r;
}

}  // namespace texsmooth::metrics
