#include "texsmooth/toy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace texsmooth::toy {
namespace {

using Color = std::array<float, 3>;

Color random_color(Rng& rng) {
  Color c{};
  for (float& v : c) v = static_cast<float>(uniform_index(rng, 256)) / 255.0f;
  return c;
}

void paint(Image& img, int y, int x, const Color& c) {
  for (int k = 0; k < 3; ++k) img.at(y, x, k) = c[k];
}

}  // namespace

Image make_cartoon(int height, int width, Rng& rng) {
  Image img(height, width, 3);
  const Color bg = random_color(rng);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) paint(img, y, x, bg);
  }
  const int shapes = 3 + static_cast<int>(uniform_index(rng, 5));
  for (int s = 0; s < shapes; ++s) {
    const Color c = random_color(rng);
    const int kind = static_cast<int>(uniform_index(rng, 3));
    const double cx = uniform_real(rng, 0.1, 0.9) * width;
    const double cy = uniform_real(rng, 0.1, 0.9) * height;
    const double rx = uniform_real(rng, 0.1, 0.35) * width;
    const double ry = uniform_real(rng, 0.1, 0.35) * height;
    const double angle = uniform_real(rng, 0.0, std::numbers::pi);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double dx = x - cx;
        const double dy = y - cy;
        bool inside = false;
        if (kind == 0) {
          inside = std::abs(dx) <= rx && std::abs(dy) <= ry;
        } else if (kind == 1) {
          inside = (dx * dx) / (rx * rx) + (dy * dy) / (ry * ry) <= 1.0;
        } else {
          // Rotated triangle: three half-planes around the center.
          inside = true;
          for (int e = 0; e < 3; ++e) {
            const double a = angle + e * 2.0 * std::numbers::pi / 3.0;
            if (dx * std::cos(a) + dy * std::sin(a) > 0.5 * std::min(rx, ry)) inside = false;
          }
        }
        if (inside) paint(img, y, x, c);
      }
    }
  }
  return img;
}

Image make_texture_image(int height, int width, Rng& rng) {
  Image img(height, width, 3);
  const Color bg = random_color(rng);
  Color fg = random_color(rng);
  // Keep enough luma contrast for the extractor.
  auto luma = [](const Color& c) { return 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]; };
  if (std::abs(luma(fg) - luma(bg)) < 0.25) {
    for (int k = 0; k < 3; ++k) fg[k] = luma(bg) > 0.5 ? fg[k] * 0.3f : 1.0f - 0.3f * (1.0f - fg[k]);
  }
  const int motif = static_cast<int>(uniform_index(rng, 5));
  const double period = uniform_real(rng, 6.0, 16.0);
  const double duty = uniform_real(rng, 0.15, 0.35);
  const double angle = uniform_real(rng, 0.0, std::numbers::pi);
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);

  std::vector<std::array<double, 3>> blobs;
  if (motif == 4) {
    const int n = 10 + static_cast<int>(uniform_index(rng, 10));
    for (int i = 0; i < n; ++i) {
      blobs.push_back({uniform01(rng) * width, uniform01(rng) * height, uniform_real(rng, 2.0, 6.0)});
    }
  }

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = x * ca + y * sa;
      const double v = -x * sa + y * ca;
      const double pu = u / period - std::floor(u / period);
      const double pv = v / period - std::floor(v / period);
      bool on = false;
      switch (motif) {
        case 0: on = pu < duty; break;
        case 1: on = (pu - 0.5) * (pu - 0.5) + (pv - 0.5) * (pv - 0.5) < duty * duty; break;
        case 2: on = pu < 1.8 * duty && pv < 1.8 * duty; break;
        case 3: on = pu < duty * 0.5 || pv < duty * 0.5; break;
        default:
          for (const auto& b : blobs) {
            const double dx = x - b[0];
            const double dy = y - b[1];
            if (dx * dx + dy * dy < b[2] * b[2]) on = true;
          }
      }
      paint(img, y, x, on ? fg : bg);
    }
  }
  return img;
}

std::vector<texgen::TexturePattern> make_pattern_pool(int count, Rng& rng) {
  std::vector<texgen::TexturePattern> pool;
  int attempts = 0;
  while (static_cast<int>(pool.size()) < count && attempts < count * 20) {
    ++attempts;
    const Image tex = make_texture_image(texgen::kCanvasSize, texgen::kCanvasSize, rng);
    try {
      pool.push_back(texgen::extract_texture_pattern(tex));
    } catch (const texgen::DegeneratePatternError&) {
    }
  }
  return pool;
}

std::vector<texgen::GeneratedSample> make_toy_dataset(const ToyDatasetConfig& cfg) {
  Rng rng(cfg.seed);
  const auto pool = make_pattern_pool(cfg.pattern_count, rng);
  std::vector<texgen::GeneratedSample> samples;
  samples.reserve(cfg.count);
  for (int i = 0; i < cfg.count; ++i) {
    Rng shape_rng(mix_seed(cfg.seed, 2 * static_cast<std::uint64_t>(i)));
    const Image s = make_cartoon(cfg.source_size, cfg.source_size, shape_rng);
    const auto full = texgen::generate_sample(s, pool, mix_seed(cfg.seed, 2 * static_cast<std::uint64_t>(i) + 1),
                                              cfg.blend);
    const int span = cfg.source_size - cfg.sample_size;
    const int y0 = static_cast<int>(uniform_index(shape_rng, span + 1));
    const int x0 = static_cast<int>(uniform_index(shape_rng, span + 1));
    samples.push_back(texgen::crop_sample(full, y0, x0, cfg.sample_size, cfg.sample_size));
  }
  return samples;
}

}  // namespace texsmooth::toy
