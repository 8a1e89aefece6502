#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "test_util.hpp"
#include "texsmooth/texgen.hpp"
#include "texsmooth/toy.hpp"

namespace texsmooth::texgen {
namespace {

using testing::random_image;

TexturePattern random_pattern(int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(static_cast<std::size_t>(h) * w);
  for (float& x : v) x = static_cast<float>(uniform01(rng));
  return TexturePattern(h, w, std::move(v));
}

std::vector<TexturePattern> toy_patterns(int n, std::uint64_t seed) {
  Rng rng(seed);
  return toy::make_pattern_pool(n, rng);
}

Image structure_image(int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  return toy::make_cartoon(h, w, rng);
}

// --- extraction -----------------------------------------------------------

TEST(ExtractPattern, UniformInputIsDegenerate) {
  EXPECT_THROW(extract_texture_pattern(Image(100, 100, 3, 0.4f)), DegeneratePatternError);
}

TEST(ExtractPattern, SinglePeakOnFlatBackground) {
  Image img(100, 100, 1, 0.5f);
  img.at(37, 61) = 1.0f;
  const TexturePattern p = extract_texture_pattern(img);
  for (int y = 0; y < 100; ++y) {
    for (int x = 0; x < 100; ++x) EXPECT_EQ(p.at(y, x), (y == 37 && x == 61) ? 1.0f : 0.0f);
  }
}

TEST(ExtractPattern, InvariantUnderInversion) {
  // Dyadic values keep 1 - x exact.
  Rng rng(3);
  Image img(100, 100, 1);
  for (float& v : img.data()) v = static_cast<float>(uniform_index(rng, 257)) / 256.0f;
  Image inv = img;
  for (float& v : inv.data()) v = 1.0f - v;
  EXPECT_EQ(extract_texture_pattern(img), extract_texture_pattern(inv));
}

TEST(ExtractPattern, ResizesToCanvasAndThresholds) {
  const TexturePattern p = extract_texture_pattern(random_image(40, 70, 3, 4));
  EXPECT_EQ(p.height(), kCanvasSize);
  EXPECT_EQ(p.width(), kCanvasSize);
  EXPECT_EQ(*std::max_element(p.values().begin(), p.values().end()), 1.0f);
  for (float v : p.values()) EXPECT_TRUE(v == 0.0f || v >= 0.1f);
}

// --- warps ----------------------------------------------------------------

TEST(Warp, IdentityMatrixIsIdentity) {
  const TexturePattern p = random_pattern(100, 100, 5);
  EXPECT_EQ(detail::warp_linear(p, {1, 0, 0, 1}, false), p);
  EXPECT_EQ(detail::warp_linear(p, {1, 0, 0, 1}, true), p);
}

TEST(Warp, ScaleMovesColumnTenToTwenty) {
  TexturePattern p = TexturePattern::filled(100, 100, 0.0f);
  for (int y = 0; y < 100; ++y) p.at(y, 10) = 1.0f;
  const TexturePattern out = transform_scale(p, 2.0, 1.0 + 1e-12);
  for (int y = 0; y < 100; ++y) {
    EXPECT_FLOAT_EQ(out.at(y, 20), 1.0f);
    EXPECT_NEAR(out.at(y, 19), 0.5f, 1e-6);
    EXPECT_NEAR(out.at(y, 21), 0.5f, 1e-6);
    EXPECT_NEAR(out.at(y, 10), 0.0f, 1e-6);
  }
}

TEST(Warp, ScaleRangeChecked) {
  const TexturePattern p = TexturePattern::filled(100, 100, 0.5f);
  EXPECT_THROW(transform_scale(p, 1.0, 2.0), std::invalid_argument);
  EXPECT_THROW(transform_scale(p, 2.0, 3.5), std::invalid_argument);
  EXPECT_NO_THROW(transform_scale(p, 3.0, 3.0));
}

TEST(Warp, ShearZeroIsIdentity) {
  const TexturePattern p = random_pattern(100, 100, 6);
  EXPECT_EQ(transform_shear(p, 0.0, ShearAxis::kX), p);
  EXPECT_EQ(transform_shear(p, 0.0, ShearAxis::kY), p);
}

TEST(Warp, ShearXMovesPointByY) {
  TexturePattern p = TexturePattern::filled(100, 100, 0.0f);
  p.at(4, 3) = 1.0f;  // (x=3, y=4)
  const TexturePattern out = transform_shear(p, 1.0, ShearAxis::kX);
  EXPECT_EQ(out.at(4, 7), 1.0f);  // x' = x + k*y = 7
  EXPECT_EQ(out.at(4, 3), 0.0f);
  const TexturePattern outy = transform_shear(p, 1.0, ShearAxis::kY);
  EXPECT_EQ(outy.at(7, 3), 1.0f);  // y' = k*x + y = 7
  EXPECT_THROW(transform_shear(p, 1.5, ShearAxis::kX), std::invalid_argument);
}

TEST(Warp, ConstantPatternsStayConstant) {
  const TexturePattern p = TexturePattern::filled(100, 100, 0.625f);
  for (const TexturePattern& out : {transform_scale(p, 2.3, 1.7), transform_shear(p, 0.4, ShearAxis::kY),
                                    transform_rotate(p, 0.7), freeform_distort(p, 7, 1)}) {
    for (float v : out.values()) EXPECT_NEAR(v, 0.625f, 1e-6);
  }
}

TEST(Warp, RotateZeroIsIdentity) {
  const TexturePattern p = random_pattern(100, 100, 7);
  EXPECT_EQ(transform_rotate(p, 0.0), p);
}

TEST(Warp, QuarterTurnOnTwoByTwo) {
  const TexturePattern p(2, 2, {0.1f, 0.2f, 0.3f, 0.4f});
  // Oracle: push each source pixel through the forward matrix
  // [[cos, sin], [-sin, cos]] at theta = pi/2 about the centre (0.5, 0.5).
  TexturePattern expect = TexturePattern::filled(2, 2, 0.0f);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) {
      const double dx = x - 0.5, dy = y - 0.5;
      const double nx = 0.0 * dx + 1.0 * dy, ny = -1.0 * dx + 0.0 * dy;
      expect.at(static_cast<int>(std::lround(ny + 0.5)), static_cast<int>(std::lround(nx + 0.5))) = p.at(y, x);
    }
  }
  EXPECT_EQ(transform_rotate(p, std::numbers::pi / 2), expect);
  EXPECT_THROW(transform_rotate(p, 4.0), std::invalid_argument);
}

// Mean |back - p| over the whole canvas and over the disc inscribed in it.
// Inside the disc a rotated sample never crosses the canvas edge, so the
// round trip only suffers interpolation loss; outside it the periodic wrap
// pulls in content from the opposite side, which -theta cannot undo.
std::pair<double, double> round_trip_error(const TexturePattern& p, double theta) {
  const TexturePattern back = transform_rotate(transform_rotate(p, theta), -theta);
  const double cy = (p.height() - 1) / 2.0;
  const double cx = (p.width() - 1) / 2.0;
  const double r2 = cx * cx;
  double full = 0.0;
  double disc = 0.0;
  int n_disc = 0;
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) {
      const double e = std::abs(back.at(y, x) - p.at(y, x));
      full += e;
      if ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= r2) {
        disc += e;
        ++n_disc;
      }
    }
  }
  return {full / (p.height() * p.width()), disc / n_disc};
}

TEST(Warp, RotationRoundTripSmoothPatterns) {
  // Band-limited periodic patterns: bilinear resampling is nearly lossless.
  Rng rng(12);
  for (int i = 0; i < 10; ++i) {
    const int fx = 1 + static_cast<int>(uniform_index(rng, 4));
    const int fy = 1 + static_cast<int>(uniform_index(rng, 4));
    std::vector<float> v(100 * 100);
    for (int y = 0; y < 100; ++y) {
      for (int x = 0; x < 100; ++x) {
        v[y * 100 + x] = static_cast<float>(0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * (fx * x + fy * y) / 100.0));
      }
    }
    const TexturePattern p(100, 100, v);
    const double theta = uniform_real(rng, -std::numbers::pi, std::numbers::pi);
    EXPECT_LE(round_trip_error(p, theta).second, 0.02) << "theta " << theta;
  }
}

TEST(Warp, RotationRoundTripExtractedPatterns) {
  // Binary extracted patterns lose edge detail twice over, and the corners
  // wrap. Bounds are the measured worst case over these seeds plus margin.
  const auto pool = toy_patterns(10, 11);
  ASSERT_EQ(pool.size(), 10u);
  Rng rng(12);
  for (const auto& p : pool) {
    const double theta = uniform_real(rng, -std::numbers::pi, std::numbers::pi);
    const auto [full, disc] = round_trip_error(p, theta);
    EXPECT_LE(disc, 0.15) << "theta " << theta;
    EXPECT_LE(full, 0.18) << "theta " << theta;
    EXPECT_LE(disc, full + 0.01);
  }
}

TEST(Warp, RotationByQuarterTurnsIsExact) {
  const TexturePattern p = random_pattern(100, 100, 77);
  for (double theta : {std::numbers::pi / 2, std::numbers::pi, -std::numbers::pi / 2}) {
    EXPECT_EQ(round_trip_error(p, theta).first, 0.0) << "theta " << theta;
  }
}

// --- freeform -------------------------------------------------------------

std::map<std::pair<int, int>, std::vector<float>> sorted_blocks(const TexturePattern& p, int f) {
  std::map<std::pair<int, int>, std::vector<float>> blocks;
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) blocks[{y / f, x / f}].push_back(p.at(y, x));
  }
  for (auto& [k, v] : blocks) std::sort(v.begin(), v.end());
  return blocks;
}

TEST(Freeform, ConservesBlockMultisets) {
  for (int f : {3, 5, 7, 9, 11}) {
    const TexturePattern p = random_pattern(100, 100, 20 + f);
    const TexturePattern q = freeform_distort(p, f, 99);
    EXPECT_EQ(sorted_blocks(p, f), sorted_blocks(q, f));
    EXPECT_NE(p, q);
  }
}

TEST(Freeform, DeterministicAndValidated) {
  const TexturePattern p = random_pattern(100, 100, 30);
  EXPECT_EQ(freeform_distort(p, 5, 1), freeform_distort(p, 5, 1));
  EXPECT_NE(freeform_distort(p, 5, 1), freeform_distort(p, 5, 2));
  const TexturePattern c = TexturePattern::filled(100, 100, 0.3f);
  EXPECT_EQ(freeform_distort(c, 9, 4), c);
  EXPECT_THROW(freeform_distort(p, 4, 1), std::invalid_argument);
}

// --- random transforms ----------------------------------------------------

TEST(RandomTransform, Deterministic) {
  const TexturePattern p = toy_patterns(1, 40).front();
  Rng a(5), b(5);
  const auto [pa, ta] = random_transform(p, a);
  const auto [pb, tb] = random_transform(p, b);
  EXPECT_EQ(pa, pb);
  EXPECT_EQ(ta, tb);
}

TEST(RandomTransform, KindsAreUniform) {
  Rng rng(41);
  std::map<TransformKind, int> counts;
  constexpr int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) {
    const TransformParams t = draw_transform_params(rng);
    ++counts[t.kind];
    switch (t.kind) {
      case TransformKind::kScale:
        EXPECT_TRUE(t.s1 > 1.0 && t.s1 <= 3.0 && t.s2 > 1.0 && t.s2 <= 3.0);
        break;
      case TransformKind::kShearX:
      case TransformKind::kShearY: EXPECT_TRUE(t.k >= 0.0 && t.k <= 1.0); break;
      case TransformKind::kRotate:
        EXPECT_TRUE(t.theta >= -std::numbers::pi && t.theta <= std::numbers::pi);
        break;
      case TransformKind::kFreeform: EXPECT_TRUE(t.f % 2 == 1 && t.f >= 3 && t.f <= 11); break;
    }
  }
  ASSERT_EQ(counts.size(), 5u);
  for (const auto& [kind, n] : counts) EXPECT_NEAR(n / static_cast<double>(kDraws), 0.2, 0.02) << to_string(kind);
}

TEST(RandomTransform, OutputIsAValidPattern) {
  const auto pool = toy_patterns(3, 42);
  Rng rng(43);
  for (int i = 0; i < 20; ++i) {
    const auto [out, params] = random_transform(pool[i % pool.size()], rng);
    EXPECT_EQ(out.height(), kCanvasSize);
    for (float v : out.values()) EXPECT_TRUE(v >= 0.0f && v <= 1.0f);
  }
}

TEST(RandomTransform, DegenerateInputPropagates) {
  Rng rng(1);
  EXPECT_THROW(random_transform(TexturePattern::filled(100, 100, 0.0f), rng), DegeneratePatternError);
}

TEST(TransformKind, StringRoundTrip) {
  for (TransformKind k : kAllTransformKinds) EXPECT_EQ(transform_kind_from_string(to_string(k)), k);
  EXPECT_THROW(transform_kind_from_string("warp"), std::invalid_argument);
}

// --- blending -------------------------------------------------------------

TEST(Blend, EmptyPatternLeavesImageUntouched) {
  const Image s = structure_image(120, 110, 50);
  Rng rng(1);
  const auto r = blend(s, TexturePattern::filled(100, 100, 0.0f), BlendConfig{}, rng);
  EXPECT_EQ(r.input, s);
  for (float v : r.mask.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Blend, BlackStructureGivesValuesInKappaToOne) {
  const Image s(100, 100, 3, 0.0f);
  Rng rng(2);
  const auto r = blend(s, TexturePattern::filled(100, 100, 1.0f), BlendConfig{}, rng);
  for (float v : r.input.data()) {
    EXPECT_GE(v, 0.75f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST(Blend, WhiteStructureCollapsesToZero) {
  const Image s(100, 100, 3, 1.0f);
  Rng rng(3);
  const auto r = blend(s, TexturePattern::filled(100, 100, 1.0f), BlendConfig{}, rng);
  for (float v : r.input.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Blend, TilesMaskWithTopLeftCropAtBorders) {
  TexturePattern p = TexturePattern::filled(100, 100, 0.0f);
  p.at(5, 7) = 0.1f;   // exactly at threshold: on
  p.at(6, 7) = 0.09f;  // below: off
  const Image m = tile_mask(p, 230, 150, 0.1);
  EXPECT_EQ(m.at(5, 7), 1.0f);
  EXPECT_EQ(m.at(105, 107), 1.0f);
  EXPECT_EQ(m.at(205, 7), 1.0f);
  EXPECT_EQ(m.at(6, 7), 0.0f);
  double on = 0;
  for (float v : m.data()) on += v;
  EXPECT_EQ(on, 6.0);  // 3 tile rows x 2 tile columns
}

TEST(Blend, Preconditions) {
  Rng rng(4);
  const TexturePattern p = TexturePattern::filled(100, 100, 1.0f);
  EXPECT_THROW(blend(Image(99, 200, 3), p, BlendConfig{}, rng), std::invalid_argument);
  EXPECT_THROW(blend(Image(100, 100, 1), p, BlendConfig{}, rng), std::invalid_argument);
  BlendConfig bad;
  bad.kappa = 1.0;
  EXPECT_THROW(blend(Image(100, 100, 3), p, bad, rng), std::invalid_argument);
}

// --- ground truths --------------------------------------------------------

TEST(TextureGt, ZeroDifference) {
  const Image s = random_image(6, 5, 3, 60);
  {
    const auto r = texture_gt(s, s, GtMode::kLiteral);
    for (float v : r.data()) EXPECT_EQ(v, 0.5f);
  }
  {
    const auto r = texture_gt(s, s, GtMode::kRemapped);
    for (float v : r.data()) EXPECT_EQ(v, 0.0f);
  }
}

TEST(TextureGt, UnitDifference) {
  const Image s(2, 2, 3, 0.0f);
  const Image i(2, 2, 3, 1.0f);
  const double sigma1 = 1.0 / (1.0 + std::exp(-1.0));
  EXPECT_NEAR(texture_gt(i, s, GtMode::kLiteral).at(0, 0), sigma1, 1e-7);
  EXPECT_NEAR(texture_gt(i, s, GtMode::kLiteral).at(0, 0), 0.731058, 1e-6);
  EXPECT_NEAR(texture_gt(i, s, GtMode::kRemapped).at(1, 1), 2.0 * (sigma1 - 0.5), 1e-7);
  EXPECT_NEAR(texture_gt(i, s, GtMode::kRemapped).at(1, 1), 0.462117, 1e-6);
}

TEST(TextureGt, MonotoneInDifference) {
  const Image s(1, 1, 3, 0.0f);
  for (GtMode mode : {GtMode::kLiteral, GtMode::kRemapped}) {
    float prev = -1.0f;
    for (int k = 0; k <= 100; ++k) {
      const float v = texture_gt(Image(1, 1, 3, k / 100.0f), s, mode).at(0, 0);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
  EXPECT_THROW(texture_gt(Image(2, 2, 3), Image(2, 3, 3)), std::invalid_argument);
}

TEST(StructureGt, ConstantHasNoEdges) {
  {
    const auto r = structure_gt(Image(10, 12, 3, 0.3f));
    for (float v : r.data()) EXPECT_EQ(v, 0.0f);
  }
}

TEST(StructureGt, VerticalStepMarksTwoColumns) {
  Image s(10, 10, 3, 0.0f);
  for (int y = 0; y < 10; ++y) {
    for (int x = 5; x < 10; ++x) {
      for (int c = 0; c < 3; ++c) s.at(y, x, c) = 1.0f;
    }
  }
  const Image e = structure_gt(s);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) EXPECT_EQ(e.at(y, x), (x == 4 || x == 5) ? 1.0f : 0.0f) << y << "," << x;
  }
}

TEST(StructureGt, IsBinary) {
  {
    const auto r = structure_gt(structure_image(64, 64, 61));
    for (float v : r.data()) EXPECT_TRUE(v == 0.0f || v == 1.0f);
  }
}

// --- sample generation ----------------------------------------------------

void expect_sample_laws(const GeneratedSample& g, double kappa) {
  for (int y = 0; y < g.input.height(); ++y) {
    for (int x = 0; x < g.input.width(); ++x) {
      const bool on = g.texture_mask.at(y, x) == 1.0f;
      ASSERT_TRUE(on || g.texture_mask.at(y, x) == 0.0f);
      for (int c = 0; c < 3; ++c) {
        const float i = g.input.at(y, x, c);
        const double s = g.structure_only.at(y, x, c);
        if (!on) {
          ASSERT_EQ(i, g.structure_only.at(y, x, c));
        } else {
          ASSERT_GE(i, static_cast<float>(kappa * (1.0 - s)));
          ASSERT_LE(i, static_cast<float>(1.0 - s));
        }
      }
      if (!on) ASSERT_EQ(g.texture_gt.at(y, x), 0.0f);
      ASSERT_TRUE(g.texture_gt.at(y, x) >= 0.0f && g.texture_gt.at(y, x) <= 1.0f);
    }
  }
}

TEST(GenerateSample, DeterministicAndLawful) {
  const auto pool = toy_patterns(4, 70);
  const Image s = structure_image(128, 128, 71);
  const GeneratedSample a = generate_sample(s, pool, 72);
  const GeneratedSample b = generate_sample(s, pool, 72);
  EXPECT_EQ(a.input, b.input);
  EXPECT_EQ(a.texture_gt, b.texture_gt);
  EXPECT_EQ(a.transforms, b.transforms);
  EXPECT_EQ(a.seed, 72u);
  EXPECT_EQ(a.transforms.size(), 1u);
  EXPECT_EQ(a.structure_map, structure_gt(s));
  expect_sample_laws(a, 0.75);
}

TEST(GenerateSample, PerTileTransformsAndCropKeepLaws) {
  const auto pool = toy_patterns(4, 73);
  BlendConfig cfg;
  cfg.per_tile_transform = true;
  cfg.kappa = 0.5;
  const GeneratedSample g = generate_sample(structure_image(230, 210, 74), pool, 75, cfg);
  EXPECT_EQ(g.transforms.size(), 9u);  // 3 x 3 tiles
  expect_sample_laws(g, 0.5);
  const GeneratedSample c = crop_sample(g, 17, 33, 64, 64);
  EXPECT_EQ(c.input.at(0, 0, 1), g.input.at(17, 33, 1));
  EXPECT_EQ(c.structure_map.at(63, 63), g.structure_map.at(80, 96));
  expect_sample_laws(c, 0.5);
}

TEST(GenerateSample, EmptyPoolThrows) {
  EXPECT_THROW(generate_sample(structure_image(100, 100, 1), {}, 1), std::invalid_argument);
}

}  // namespace
}  // namespace texsmooth::texgen
