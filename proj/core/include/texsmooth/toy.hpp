#pragma once

#include <cstdint>
#include <vector>

#include "texsmooth/image.hpp"
#include "texsmooth/rng.hpp"
#include "texsmooth/texgen.hpp"

namespace texsmooth::toy {

/// Flat-filled random shapes on a flat background. Colors are multiples of
/// 1/255 so 8-bit PNG round trips are exact.
Image make_cartoon(int height, int width, Rng& rng);

/// Texture-only image: a repeated motif (stripes, dots, checker, hatching or
/// blobs) over a uniform background covering most of the canvas.
Image make_texture_image(int height, int width, Rng& rng);

struct ToyDatasetConfig {
  int count = 200;
  int sample_size = 64;    // side of the cropped samples
  int source_size = 128;   // side of the generated structure images (>= canvas)
  int pattern_count = 8;
  texgen::BlendConfig blend{};
  std::uint64_t seed = 1;
};

/// Generates full-size samples and crops a random sample_size window from
/// each, keeping the ground truths aligned.
std::vector<texgen::GeneratedSample> make_toy_dataset(const ToyDatasetConfig& cfg);

/// Extracts a pattern pool from procedural texture images, skipping
/// degenerate ones.
std::vector<texgen::TexturePattern> make_pattern_pool(int count, Rng& rng);

}  // namespace texsmooth::toy
