#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "texsmooth/image.hpp"
#include "texsmooth/tensor.hpp"

namespace texsmooth {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads an 8- or 16-bit PNG. Palette images are expanded, alpha is dropped,
/// gray+alpha becomes gray. Values map to [0,1] by v/255 or v/65535.
Image read_png(const std::filesystem::path& path);

/// Writes 1- or 3-channel images. bit_depth is 8 or 16.
void write_png(const std::filesystem::path& path, const Image& img, int bit_depth = 8);

/// Raw tensor file: "TXS1", four little-endian u32 dims (n,c,h,w), then
/// n*c*h*w little-endian float32 values.
void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace texsmooth
