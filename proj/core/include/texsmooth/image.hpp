#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace texsmooth {

/// Single-precision raster with interleaved channels (row-major, HWC).
///
/// Values are kept in [0,1]. Constructors that take pixel data validate the
/// range; arithmetic that may leave it must go through clamp01() explicitly.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, float fill = 0.0f);
  Image(int height, int width, int channels, std::vector<float> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float at(int y, int x, int c = 0) const { return data_[index(y, x, c)]; }
  float& at(int y, int x, int c = 0) { return data_[index(y, x, c)]; }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  bool same_shape(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Builds an image from values that may fall outside [0,1], clamping them.
Image clamp01(int height, int width, int channels, std::vector<float> data);

/// Bilinear resampling, half-pixel-center convention, edge samples clamped.
Image resize_bilinear(const Image& img, int out_h, int out_w);

/// Rec.601 luma for RGB; single-channel images pass through.
Image to_grayscale(const Image& img);

/// Replicates a single-channel image into three channels.
Image to_rgb(const Image& img);

/// Copies a rectangular window.
Image crop(const Image& img, int y0, int x0, int h, int w);

/// Pads with mirror reflection (edge pixel not repeated) to at least (h, w).
Image reflect_pad(const Image& img, int h, int w);

namespace detail {

/// Source taps for one output coordinate of a half-pixel-center bilinear resize.
struct BilinearTap {
  int i0;
  int i1;
  double w1;  // weight of i1; i0 gets 1 - w1
};

/// Taps for every output coordinate along one axis.
std::vector<BilinearTap> bilinear_taps(int in_size, int out_size);

}  // namespace detail

}  // namespace texsmooth
