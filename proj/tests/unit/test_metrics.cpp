#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "texsmooth/metrics.hpp"

namespace texsmooth::metrics {
namespace {

using testing::random_image;

// Straightforward window-by-window SSIM on single-channel images.
double ssim_oracle(const Image& a, const Image& b) {
  const int k = 8;
  double total = 0.0;
  int windows = 0;
  for (int y = 0; y + k <= a.height(); ++y) {
    for (int x = 0; x + k <= a.width(); ++x) {
      double ma = 0, mb = 0;
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) {
          ma += a.at(y + j, x + i);
          mb += b.at(y + j, x + i);
        }
      ma /= k * k;
      mb /= k * k;
      double va = 0, vb = 0, cv = 0;
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) {
          const double da = a.at(y + j, x + i) - ma, db = b.at(y + j, x + i) - mb;
          va += da * da;
          vb += db * db;
          cv += da * db;
        }
      va /= k * k;
      vb /= k * k;
      cv /= k * k;
      total += ((2 * ma * mb + 1e-4) * (2 * cv + 9e-4)) / ((ma * ma + mb * mb + 1e-4) * (va + vb + 9e-4));
      ++windows;
    }
  }
  return total / windows;
}

TEST(Mse, Basics) {
  const Image a = random_image(9, 7, 3, 1);
  const Image b = random_image(9, 7, 3, 2);
  EXPECT_EQ(mse_metric(a, a), 0.0);
  EXPECT_NEAR(mse_metric(Image(4, 4, 3, 0.0f), Image(4, 4, 3, 0.1f)), 0.01, 1e-9);
  EXPECT_EQ(mse_metric(a, b), mse_metric(b, a));
  EXPECT_THROW(mse_metric(a, Image(9, 7, 1)), std::invalid_argument);
}

TEST(Psnr, Values) {
  EXPECT_NEAR(psnr_from_mse(0.01), 20.0, 1e-12);
  EXPECT_EQ(psnr_from_mse(1.0), 0.0);
  EXPECT_EQ(psnr_from_mse(0.0), std::numeric_limits<double>::infinity());
  const Image a = random_image(5, 5, 3, 3);
  EXPECT_TRUE(std::isinf(psnr(a, a)));
  EXPECT_EQ(psnr_for_display(psnr(a, a)), 99.0);
  EXPECT_EQ(psnr_for_display(31.5), 31.5);
}

TEST(Psnr, StrictlyDecreasingInMse) {
  double prev = std::numeric_limits<double>::infinity();
  for (double m = 1e-6; m <= 1.0; m *= 1.7) {
    const double p = psnr_from_mse(m);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Ssim, IdenticalIsExactlyOne) {
  const Image a = random_image(20, 17, 3, 4);
  EXPECT_EQ(ssim(a, a), 1.0);
}

TEST(Ssim, Symmetric) {
  const Image a = random_image(16, 16, 3, 5);
  const Image b = random_image(16, 16, 3, 6);
  EXPECT_EQ(ssim(a, b), ssim(b, a));
}

TEST(Ssim, ConstantImagesSingleWindow) {
  const double expect = ((2 * 0.16 + 1e-4) * (2 * 0 + 9e-4)) / ((0.04 + 0.64 + 1e-4) * (0 + 0 + 9e-4));
  EXPECT_NEAR(ssim(Image(8, 8, 1, 0.2f), Image(8, 8, 1, 0.8f)), expect, 1e-6);
  EXPECT_NEAR(ssim(Image(12, 10, 1, 0.2f), Image(12, 10, 1, 0.8f)), expect, 1e-6);
  EXPECT_NEAR(ssim_window(0.2, 0.8, 0, 0, 0), expect, 1e-15);
}

TEST(Ssim, EightByEightMatchesClosedForm) {
  const Image a = random_image(8, 8, 1, 7);
  const Image b = random_image(8, 8, 1, 8);
  EXPECT_NEAR(ssim(a, b), ssim_oracle(a, b), 1e-12);
}

TEST(Ssim, MatchesWindowOracle) {
  const Image a = random_image(19, 23, 1, 9);
  Image b = a;
  Rng rng(10);
  for (float& v : b.data()) v = std::clamp(v + static_cast<float>(uniform_real(rng, -0.2, 0.2)), 0.0f, 1.0f);
  const double s = ssim(a, b);
  EXPECT_NEAR(s, ssim_oracle(a, b), 1e-9);
  EXPECT_LT(s, 1.0);
  EXPECT_GT(s, 0.0);
}

TEST(Ssim, RgbUsesLuma) {
  const Image a = random_image(10, 10, 3, 11);
  const Image b = random_image(10, 10, 3, 12);
  EXPECT_NEAR(ssim(a, b), ssim_oracle(to_grayscale(a), to_grayscale(b)), 1e-9);
}

TEST(Ssim, RangeOnAdversarialInputs) {
  // Anti-correlated windows push SSIM towards -1.
  Image a(8, 8, 1), b(8, 8, 1);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      a.at(y, x) = (x + y) % 2 ? 1.0f : 0.0f;
      b.at(y, x) = 1.0f - a.at(y, x);
    }
  const double s = ssim(a, b);
  EXPECT_GE(s, -1.0);
  EXPECT_LT(s, -0.9);
}

TEST(Ssim, Errors) {
  EXPECT_THROW(ssim(Image(7, 20, 1), Image(7, 20, 1)), std::invalid_argument);
  EXPECT_THROW(ssim(Image(8, 8, 1), Image(8, 9, 1)), std::invalid_argument);
}

TEST(Evaluate, BundlesAllThree) {
  const Image a = random_image(12, 12, 3, 13);
  const Image b = random_image(12, 12, 3, 14);
  const MetricReport r = evaluate(a, b);
  EXPECT_EQ(r.mse, mse_metric(a, b));
  EXPECT_EQ(r.psnr, psnr(a, b));
  EXPECT_EQ(r.ssim, ssim(a, b));
}

}  // namespace
}  // namespace texsmooth::metrics
