#include "texsmooth/image_io.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

#include "texsmooth/byte_io.hpp"

namespace texsmooth {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  if (err) *err = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

}  // namespace

Image read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw IoError("not a PNG file: " + path.string());
  }

  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }

  // Everything touched after setjmp lives outside the jump scope.
  std::vector<unsigned char> raw;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0, height = 0;
  int channels = 0, depth = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode " + path.string() + ": " + err);
  }

  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png), png_set_strip_alpha(png);
  png_read_update_info(png, info);

  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  channels = png_get_channels(png, info);
  depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  raw.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = raw.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3) {
    throw IoError("unsupported PNG channel layout in " + path.string());
  }
  std::vector<float> data(static_cast<std::size_t>(width) * height * channels);
  if (depth == 16) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
      data[i] = static_cast<float>(v / 65535.0);
    }
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(raw[i] / 255.0);
  }
  return Image(static_cast<int>(height), static_cast<int>(width), channels, std::move(data));
}

void write_png(const std::filesystem::path& path, const Image& img, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw std::invalid_argument("PNG bit depth must be 8 or 16");
  if (img.empty()) throw std::invalid_argument("cannot write an empty image");

  const int ch = img.channels();
  const std::size_t bytes_per_sample = bit_depth / 8;
  const std::size_t rowbytes = static_cast<std::size_t>(img.width()) * ch * bytes_per_sample;
  std::vector<unsigned char> raw(rowbytes * img.height());
  const auto src = img.data();
  const double maxv = bit_depth == 16 ? 65535.0 : 255.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto q = static_cast<unsigned>(std::lround(static_cast<double>(src[i]) * maxv));
    if (bit_depth == 16) {
      raw[2 * i] = static_cast<unsigned char>(q >> 8);
      raw[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
    } else {
      raw[i] = static_cast<unsigned char>(q);
    }
  }
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y) rows[y] = raw.data() + y * rowbytes;

  FilePtr file = open_file(path, "wb");
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode " + path.string() + ": " + err);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, img.width(), img.height(), bit_depth,
               ch == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string());
  os.write("TXS1", 4);
  for (int d : t.shape()) detail::put_u32(os, static_cast<std::uint32_t>(d));
  for (float v : t.values()) detail::put_f32(os, v);
  if (!os) throw IoError("write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "TXS1") throw IoError("bad tensor magic in " + path.string());
  try {
    int dims[4];
    for (int& d : dims) {
      const std::uint32_t v = detail::get_u32(is);
      if (v > (1u << 30)) throw IoError("implausible tensor dimension in " + path.string());
      d = static_cast<int>(v);
    }
    Tensor t(dims[0], dims[1], dims[2], dims[3]);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = detail::get_f32(is);
    return t;
  } catch (const std::runtime_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace texsmooth
