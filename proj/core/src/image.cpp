#include "texsmooth/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace texsmooth {
namespace {

void check_dims(int height, int width, int channels) {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("image dimensions must be positive, got " + std::to_string(height) +
                                "x" + std::to_string(width));
  }
  if (channels != 1 && channels != 3) {
    throw std::invalid_argument("unsupported channel count " + std::to_string(channels));
  }
}

int mirror(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace

Image::Image(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels);
  if (!(fill >= 0.0f && fill <= 1.0f)) throw std::invalid_argument("fill value outside [0,1]");
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

Image::Image(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_dims(height, width, channels);
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw std::invalid_argument("image data length does not match dimensions");
  }
  for (float v : data_) {
    if (!(v >= 0.0f && v <= 1.0f)) throw std::invalid_argument("image value outside [0,1]");
  }
}

Image clamp01(int height, int width, int channels, std::vector<float> data) {
  for (float& v : data) v = std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 1.0f);
  return Image(height, width, channels, std::move(data));
}

namespace detail {

std::vector<BilinearTap> bilinear_taps(int in_size, int out_size) {
  std::vector<BilinearTap> taps(out_size);
  const double scale = static_cast<double>(in_size) / out_size;
  for (int o = 0; o < out_size; ++o) {
    double src = (o + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in_size - 1));
    const int i0 = static_cast<int>(std::floor(src));
    const int i1 = std::min(i0 + 1, in_size - 1);
    taps[o] = {i0, i1, src - i0};
  }
  return taps;
}

}  // namespace detail

Image resize_bilinear(const Image& img, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw std::invalid_argument("resize target must be at least 1x1");
  if (out_h == img.height() && out_w == img.width()) return img;

  const auto ty = detail::bilinear_taps(img.height(), out_h);
  const auto tx = detail::bilinear_taps(img.width(), out_w);
  const int ch = img.channels();
  std::vector<float> out(static_cast<std::size_t>(out_h) * out_w * ch);
  for (int y = 0; y < out_h; ++y) {
    const auto& a = ty[y];
    for (int x = 0; x < out_w; ++x) {
      const auto& b = tx[x];
      for (int c = 0; c < ch; ++c) {
        const double top = img.at(a.i0, b.i0, c) * (1.0 - b.w1) + img.at(a.i0, b.i1, c) * b.w1;
        const double bot = img.at(a.i1, b.i0, c) * (1.0 - b.w1) + img.at(a.i1, b.i1, c) * b.w1;
        out[(static_cast<std::size_t>(y) * out_w + x) * ch + c] =
            static_cast<float>(top * (1.0 - a.w1) + bot * a.w1);
      }
    }
  }
  // Convex combinations stay in range; clamp01 only absorbs rounding.
  return clamp01(out_h, out_w, ch, std::move(out));
}

Image to_grayscale(const Image& img) {
  if (img.channels() == 1) return img;
  if (img.channels() != 3) throw std::invalid_argument("to_grayscale expects 1 or 3 channels");
  std::vector<float> out(img.pixel_count());
  const auto src = img.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>(0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2]);
  }
  return clamp01(img.height(), img.width(), 1, std::move(out));
}

Image to_rgb(const Image& img) {
  if (img.channels() == 3) return img;
  std::vector<float> out(img.pixel_count() * 3);
  const auto src = img.data();
  for (std::size_t i = 0; i < src.size(); ++i) out[3 * i] = out[3 * i + 1] = out[3 * i + 2] = src[i];
  return Image(img.height(), img.width(), 3, std::move(out));
}

Image crop(const Image& img, int y0, int x0, int h, int w) {
  if (y0 < 0 || x0 < 0 || h < 1 || w < 1 || y0 + h > img.height() || x0 + w > img.width()) {
    throw std::invalid_argument("crop window outside image");
  }
  Image out(h, w, img.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(y0 + y, x0 + x, c);
    }
  }
  return out;
}

Image reflect_pad(const Image& img, int h, int w) {
  h = std::max(h, img.height());
  w = std::max(w, img.width());
  if (h == img.height() && w == img.width()) return img;
  Image out(h, w, img.channels());
  for (int y = 0; y < h; ++y) {
    const int sy = mirror(y, img.height());
    for (int x = 0; x < w; ++x) {
      const int sx = mirror(x, img.width());
      for (int c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(sy, sx, c);
    }
  }
  return out;
}

}  // namespace texsmooth
