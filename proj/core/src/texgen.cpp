#include "texsmooth/texgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace texsmooth::texgen {
namespace {

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Image tiled_mask_from(const std::vector<TexturePattern>& tiles, int tiles_x, int h, int w, double threshold) {
  Image mask(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto& tile = tiles[(y / kCanvasSize) * tiles_x + (x / kCanvasSize)];
      const float v = tile.at(y % tile.height(), x % tile.width());
      mask.at(y, x) = v >= threshold ? 1.0f : 0.0f;
    }
  }
  return mask;
}

}  // namespace

TexturePattern::TexturePattern(int height, int width, std::vector<float> values)
    : height_(height), width_(width), values_(std::move(values)) {
  require(height >= 1 && width >= 1, "pattern dimensions must be positive");
  require(values_.size() == static_cast<std::size_t>(height) * width, "pattern data length mismatch");
  for (float v : values_) require(v >= 0.0f && v <= 1.0f, "pattern value outside [0,1]");
}

TexturePattern TexturePattern::filled(int height, int width, float value) {
  return TexturePattern(height, width, std::vector<float>(static_cast<std::size_t>(height) * width, value));
}

bool TexturePattern::usable() const {
  return std::any_of(values_.begin(), values_.end(), [](float v) { return v > 0.0f; });
}

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::kScale: return "scale";
    case TransformKind::kShearX: return "shear_x";
    case TransformKind::kShearY: return "shear_y";
    case TransformKind::kRotate: return "rotate";
    case TransformKind::kFreeform: return "freeform";
  }
  return "unknown";
}

TransformKind transform_kind_from_string(std::string_view name) {
  for (TransformKind k : kAllTransformKinds) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown transform kind: " + std::string(name));
}

std::string_view to_string(GtMode mode) { return mode == GtMode::kLiteral ? "literal" : "remapped"; }

GtMode gt_mode_from_string(std::string_view name) {
  if (name == "literal") return GtMode::kLiteral;
  if (name == "remapped") return GtMode::kRemapped;
  throw std::invalid_argument("unknown gt mode: " + std::string(name));
}

TexturePattern extract_texture_pattern(const Image& texture_img, double mask_threshold) {
  const Image gray = to_grayscale(resize_bilinear(texture_img, kCanvasSize, kCanvasSize));
  std::vector<float> v(gray.data().begin(), gray.data().end());

  std::vector<float> sorted = v;
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  double median = sorted[mid];
  if (sorted.size() % 2 == 0) {
    const float lower = *std::max_element(sorted.begin(), sorted.begin() + mid);
    median = 0.5 * (static_cast<double>(lower) + median);
  }

  double peak = 0.0;
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    dev[i] = std::abs(v[i] - median);
    peak = std::max(peak, dev[i]);
  }
  if (peak <= 0.0) throw DegeneratePatternError("texture image is constant; no pattern to extract");

  for (std::size_t i = 0; i < v.size(); ++i) {
    const double n = dev[i] / peak;
    v[i] = n < mask_threshold ? 0.0f : static_cast<float>(std::min(n, 1.0));
  }
  return TexturePattern(kCanvasSize, kCanvasSize, std::move(v));
}

namespace detail {

TexturePattern warp_linear(const TexturePattern& p, const std::array<double, 4>& forward, bool about_center) {
  const double det = forward[0] * forward[3] - forward[1] * forward[2];
  require(std::abs(det) > 1e-12, "singular warp matrix");
  const std::array<double, 4> inv = {forward[3] / det, -forward[1] / det, -forward[2] / det, forward[0] / det};
  const int h = p.height();
  const int w = p.width();
  const double cx = about_center ? (w - 1) / 2.0 : 0.0;
  const double cy = about_center ? (h - 1) / 2.0 : 0.0;

  std::vector<float> out(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      const double sx = snap(inv[0] * dx + inv[1] * dy + cx);
      const double sy = snap(inv[2] * dx + inv[3] * dy + cy);
      const double fx = std::floor(sx);
      const double fy = std::floor(sy);
      const double ax = sx - fx;
      const double ay = sy - fy;
      const int x0 = wrap(static_cast<int>(fx), w);
      const int y0 = wrap(static_cast<int>(fy), h);
      const int x1 = wrap(x0 + 1, w);
      const int y1 = wrap(y0 + 1, h);
      const double top = p.at(y0, x0) * (1.0 - ax) + p.at(y0, x1) * ax;
      const double bot = p.at(y1, x0) * (1.0 - ax) + p.at(y1, x1) * ax;
      out[static_cast<std::size_t>(y) * w + x] =
          static_cast<float>(std::clamp(top * (1.0 - ay) + bot * ay, 0.0, 1.0));
    }
  }
  return TexturePattern(h, w, std::move(out));
}

}  // namespace detail

TexturePattern transform_scale(const TexturePattern& p, double s1, double s2) {
  require(s1 > 1.0 && s1 <= 3.0 && s2 > 1.0 && s2 <= 3.0, "scale factors must lie in (1,3]");
  return detail::warp_linear(p, {s1, 0.0, 0.0, s2}, false);
}

TexturePattern transform_shear(const TexturePattern& p, double k, ShearAxis axis) {
  require(k >= 0.0 && k <= 1.0, "shear factor must lie in [0,1]");
  if (axis == ShearAxis::kX) return detail::warp_linear(p, {1.0, k, 0.0, 1.0}, false);
  return detail::warp_linear(p, {1.0, 0.0, k, 1.0}, false);
}

TexturePattern transform_rotate(const TexturePattern& p, double theta) {
  require(theta >= -std::numbers::pi && theta <= std::numbers::pi, "rotation angle must lie in [-pi, pi]");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return detail::warp_linear(p, {c, s, -s, c}, true);
}

TexturePattern freeform_distort(const TexturePattern& p, int f, std::uint64_t seed) {
  require(f == 3 || f == 5 || f == 7 || f == 9 || f == 11, "freeform block size must be one of 3,5,7,9,11");
  Rng rng(seed);
  TexturePattern out = p;
  std::vector<float> block;
  for (int by = 0; by < p.height(); by += f) {
    for (int bx = 0; bx < p.width(); bx += f) {
      const int bh = std::min(f, p.height() - by);
      const int bw = std::min(f, p.width() - bx);
      block.clear();
      for (int y = 0; y < bh; ++y) {
        for (int x = 0; x < bw; ++x) block.push_back(p.at(by + y, bx + x));
      }
      // Fisher-Yates with the portable index draw.
      for (std::size_t i = block.size(); i > 1; --i) {
        std::swap(block[i - 1], block[uniform_index(rng, i)]);
      }
      std::size_t k = 0;
      for (int y = 0; y < bh; ++y) {
        for (int x = 0; x < bw; ++x) out.at(by + y, bx + x) = block[k++];
      }
    }
  }
  return out;
}

TransformParams draw_transform_params(Rng& rng) {
  static constexpr int kBlockSizes[] = {3, 5, 7, 9, 11};
  TransformParams params;
  params.kind = kAllTransformKinds[uniform_index(rng, kAllTransformKinds.size())];
  switch (params.kind) {
    case TransformKind::kScale:
      // 3 - 2u with u in [0,1) covers (1,3].
      params.s1 = 3.0 - 2.0 * uniform01(rng);
      params.s2 = 3.0 - 2.0 * uniform01(rng);
      break;
    case TransformKind::kShearX:
    case TransformKind::kShearY:
      params.k = uniform01(rng);
      break;
    case TransformKind::kRotate:
      params.theta = uniform_real(rng, -std::numbers::pi, std::numbers::pi);
      break;
    case TransformKind::kFreeform:
      params.f = kBlockSizes[uniform_index(rng, 5)];
      params.seed = rng();
      break;
  }
  return params;
}

TexturePattern apply_transform(const TexturePattern& p, const TransformParams& params) {
  switch (params.kind) {
    case TransformKind::kScale: return transform_scale(p, params.s1, params.s2);
    case TransformKind::kShearX: return transform_shear(p, params.k, ShearAxis::kX);
    case TransformKind::kShearY: return transform_shear(p, params.k, ShearAxis::kY);
    case TransformKind::kRotate: return transform_rotate(p, params.theta);
    case TransformKind::kFreeform: return freeform_distort(p, params.f, params.seed);
  }
  throw std::invalid_argument("unknown transform kind");
}

std::pair<TexturePattern, TransformParams> random_transform(const TexturePattern& p, Rng& rng) {
  if (!p.usable()) throw DegeneratePatternError("pattern has no positive values");
  const TransformParams params = draw_transform_params(rng);
  return {apply_transform(p, params), params};
}

Image tile_mask(const TexturePattern& p, int h, int w, double threshold) {
  Image mask(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) mask.at(y, x) = p.at(y % p.height(), x % p.width()) >= threshold ? 1.0f : 0.0f;
  }
  return mask;
}

BlendBounds blend_bounds(float s, double kappa) {
  // Both bounds are exact in double and rounded once to float.
  const double hi = 1.0 - static_cast<double>(s);
  return {static_cast<float>(kappa * hi), static_cast<float>(hi)};
}

BlendResult blend_with_mask(const Image& s, const Image& mask, double kappa, Rng& rng) {
  require(kappa > 0.0 && kappa < 1.0, "kappa must lie in (0,1)");
  require(mask.channels() == 1 && mask.height() == s.height() && mask.width() == s.width(),
          "mask must be single-channel and match the structure image");
  Image input = s;
  for (int y = 0; y < s.height(); ++y) {
    for (int x = 0; x < s.width(); ++x) {
      if (mask.at(y, x) < 0.5f) continue;
      for (int c = 0; c < s.channels(); ++c) {
        const BlendBounds b = blend_bounds(s.at(y, x, c), kappa);
        const auto v = static_cast<float>(uniform_real(rng, b.lo, b.hi));
        input.at(y, x, c) = std::clamp(v, b.lo, b.hi);
      }
    }
  }
  return {std::move(input), mask};
}

BlendResult blend(const Image& s, const TexturePattern& p, const BlendConfig& cfg, Rng& rng) {
  require(s.channels() == 3, "structure image must have 3 channels");
  require(s.height() >= p.height() && s.width() >= p.width(), "image is smaller than one texture tile");
  return blend_with_mask(s, tile_mask(p, s.height(), s.width(), cfg.mask_threshold), cfg.kappa, rng);
}

Image texture_gt(const Image& input, const Image& s, GtMode mode) {
  require(input.same_shape(s), "texture_gt: input and structure image shapes differ");
  Image gt(s.height(), s.width(), 1);
  const int ch = s.channels();
  for (int y = 0; y < s.height(); ++y) {
    for (int x = 0; x < s.width(); ++x) {
      double d = 0.0;
      for (int c = 0; c < ch; ++c) d += std::abs(static_cast<double>(input.at(y, x, c)) - s.at(y, x, c));
      d /= ch;
      const double sig = 1.0 / (1.0 + std::exp(-d));
      gt.at(y, x) = static_cast<float>(mode == GtMode::kLiteral ? sig : 2.0 * (sig - 0.5));
    }
  }
  return gt;
}

Image structure_gt(const Image& s) {
  const Image g = to_grayscale(s);
  const int h = g.height();
  const int w = g.width();
  auto px = [&](int y, int x) -> double {
    return g.at(std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1));
  };
  Image edges(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (px(y - 1, x + 1) + 2.0 * px(y, x + 1) + px(y + 1, x + 1)) -
                        (px(y - 1, x - 1) + 2.0 * px(y, x - 1) + px(y + 1, x - 1));
      const double gy = (px(y + 1, x - 1) + 2.0 * px(y + 1, x) + px(y + 1, x + 1)) -
                        (px(y - 1, x - 1) + 2.0 * px(y - 1, x) + px(y - 1, x + 1));
      edges.at(y, x) = std::sqrt(gx * gx + gy * gy) > 0.1 ? 1.0f : 0.0f;
    }
  }
  return edges;
}

GeneratedSample generate_sample(const Image& s, std::span<const TexturePattern> pool, std::uint64_t seed,
                                const BlendConfig& cfg) {
  require(!pool.empty(), "texture pattern pool is empty");
  require(s.channels() == 3, "structure image must have 3 channels");
  Rng rng(seed);
  GeneratedSample out;
  out.seed = seed;
  out.pattern_index = static_cast<int>(uniform_index(rng, pool.size()));
  const TexturePattern& base = pool[out.pattern_index];

  BlendResult blended;
  if (cfg.per_tile_transform) {
    require(s.height() >= base.height() && s.width() >= base.width(), "image is smaller than one texture tile");
    const int tiles_y = (s.height() + kCanvasSize - 1) / kCanvasSize;
    const int tiles_x = (s.width() + kCanvasSize - 1) / kCanvasSize;
    std::vector<TexturePattern> tiles;
    for (int t = 0; t < tiles_y * tiles_x; ++t) {
      auto [pattern, params] = random_transform(base, rng);
      tiles.push_back(std::move(pattern));
      out.transforms.push_back(params);
    }
    blended = blend_with_mask(s, tiled_mask_from(tiles, tiles_x, s.height(), s.width(), cfg.mask_threshold),
                              cfg.kappa, rng);
  } else {
    auto [pattern, params] = random_transform(base, rng);
    out.transforms.push_back(params);
    blended = blend(s, pattern, cfg, rng);
  }

  out.input = std::move(blended.input);
  out.texture_mask = std::move(blended.mask);
  out.structure_only = s;
  out.texture_gt = texture_gt(out.input, s, cfg.gt_mode);
  out.structure_map = structure_gt(s);
  return out;
}

GeneratedSample crop_sample(const GeneratedSample& sample, int y0, int x0, int h, int w) {
  GeneratedSample out;
  out.input = crop(sample.input, y0, x0, h, w);
  out.structure_only = crop(sample.structure_only, y0, x0, h, w);
  out.texture_gt = crop(sample.texture_gt, y0, x0, h, w);
  out.texture_mask = crop(sample.texture_mask, y0, x0, h, w);
  out.structure_map = crop(sample.structure_map, y0, x0, h, w);
  out.seed = sample.seed;
  out.pattern_index = sample.pattern_index;
  out.transforms = sample.transforms;
  return out;
}

}  // namespace texsmooth::texgen
