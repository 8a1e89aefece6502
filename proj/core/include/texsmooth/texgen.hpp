#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "texsmooth/image.hpp"
#include "texsmooth/rng.hpp"

namespace texsmooth::texgen {

/// Side length of the canvas texture patterns live on.
inline constexpr int kCanvasSize = 100;

class DegeneratePatternError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-channel texture magnitude map with values in [0,1].
class TexturePattern {
 public:
  TexturePattern() = default;
  TexturePattern(int height, int width, std::vector<float> values);
  static TexturePattern filled(int height, int width, float value);

  int height() const { return height_; }
  int width() const { return width_; }
  float at(int y, int x) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  float& at(int y, int x) { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  std::span<const float> values() const { return values_; }

  /// True when at least one value is positive.
  bool usable() const;

  friend bool operator==(const TexturePattern&, const TexturePattern&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<float> values_;
};

enum class TransformKind { kScale, kShearX, kShearY, kRotate, kFreeform };
inline constexpr std::array<TransformKind, 5> kAllTransformKinds = {
    TransformKind::kScale, TransformKind::kShearX, TransformKind::kShearY, TransformKind::kRotate,
    TransformKind::kFreeform};

std::string_view to_string(TransformKind kind);
TransformKind transform_kind_from_string(std::string_view name);

/// Parameters of one geometric transform; only the fields of `kind` matter.
struct TransformParams {
  TransformKind kind = TransformKind::kScale;
  double s1 = 1.0;     // x scale, (1,3]
  double s2 = 1.0;     // y scale, (1,3]
  double k = 0.0;      // shear factor, [0,1]
  double theta = 0.0;  // rotation, [-pi, pi]
  int f = 3;           // freeform block size, {3,5,7,9,11}
  std::uint64_t seed = 0;

  friend bool operator==(const TransformParams&, const TransformParams&) = default;
};

enum class GtMode { kLiteral, kRemapped };
std::string_view to_string(GtMode mode);
GtMode gt_mode_from_string(std::string_view name);

struct BlendConfig {
  double kappa = 0.75;
  double mask_threshold = 0.1;
  GtMode gt_mode = GtMode::kRemapped;
  // One transform per tile instead of one per image.
  bool per_tile_transform = false;
};

struct GeneratedSample {
  Image input;           // I
  Image structure_only;  // S
  Image texture_gt;      // T*, 1 channel
  Image texture_mask;    // M, 1 channel, {0,1}
  Image structure_map;   // E*, 1 channel, {0,1}
  std::uint64_t seed = 0;
  int pattern_index = -1;
  std::vector<TransformParams> transforms;
};

enum class ShearAxis { kX, kY };

/// Background-subtraction pattern extractor: resize to the canvas, luma,
/// |v - median|, normalize by max, zero values below `mask_threshold`.
/// Throws DegeneratePatternError for constant input.
TexturePattern extract_texture_pattern(const Image& texture_img, double mask_threshold = 0.1);

TexturePattern transform_scale(const TexturePattern& p, double s1, double s2);
TexturePattern transform_shear(const TexturePattern& p, double k, ShearAxis axis);
TexturePattern transform_rotate(const TexturePattern& p, double theta);

/// Shuffles pixel values inside each non-overlapping f x f block.
TexturePattern freeform_distort(const TexturePattern& p, int f, std::uint64_t seed);

/// Draws a uniformly chosen kind and in-range parameters.
TransformParams draw_transform_params(Rng& rng);

TexturePattern apply_transform(const TexturePattern& p, const TransformParams& params);

std::pair<TexturePattern, TransformParams> random_transform(const TexturePattern& p, Rng& rng);

/// Binarizes the pattern at `threshold` and tiles it over an h x w grid
/// (top-left crop for ragged border tiles).
Image tile_mask(const TexturePattern& p, int h, int w, double threshold);

/// Closed interval [kappa*(1-s), 1-s] a textured pixel channel is drawn from.
struct BlendBounds {
  float lo;
  float hi;
};
BlendBounds blend_bounds(float s, double kappa);

struct BlendResult {
  Image input;
  Image mask;
};

BlendResult blend(const Image& s, const TexturePattern& p, const BlendConfig& cfg, Rng& rng);

/// Color variation for an explicit binary mask.
BlendResult blend_with_mask(const Image& s, const Image& mask, double kappa, Rng& rng);

/// Per-pixel texture confidence from the mean absolute channel difference.
Image texture_gt(const Image& input, const Image& s, GtMode mode = GtMode::kRemapped);

/// Binary edge map: Sobel magnitude of luma above 0.1.
Image structure_gt(const Image& s);

GeneratedSample generate_sample(const Image& s, std::span<const TexturePattern> pool, std::uint64_t seed,
                                const BlendConfig& cfg = {});

GeneratedSample crop_sample(const GeneratedSample& sample, int y0, int x0, int h, int w);

namespace detail {

/// Inverse-mapped bilinear warp on the pattern canvas with periodic wrap.
/// `forward` is the row-major 2x2 matrix mapping source to destination
/// coordinates; with `about_center` coordinates are offsets from the canvas
/// center, otherwise from pixel (0,0).
TexturePattern warp_linear(const TexturePattern& p, const std::array<double, 4>& forward, bool about_center);

}  // namespace detail

}  // namespace texsmooth::texgen
