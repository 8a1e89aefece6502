#include "texsmooth/nn/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "texsmooth/byte_io.hpp"
#include "texsmooth/image_io.hpp"

namespace texsmooth::nn {
namespace {

void write_record(std::ostream& os, const std::string& name, const Tensor& t) {
  detail::put_u32(os, static_cast<std::uint32_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  for (int d : t.shape()) detail::put_u32(os, static_cast<std::uint32_t>(d));
  for (float v : t.values()) detail::put_f32(os, v);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string());
  os.write("TXSW", 4);
  os.put(static_cast<char>(kCheckpointVersion));
  for (const auto& p : params) write_record(os, p.name, p.value);
  for (const auto& p : params) write_record(os, p.name + ".m", p.momentum);
  if (!os) throw IoError("write failed: " + path.string());
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "TXSW") throw IoError("bad checkpoint magic in " + path.string());
  const int version = is.get();
  if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version in " + path.string());

  std::vector<NamedTensor> out;
  try {
    while (is.peek() != std::char_traits<char>::eof()) {
      const std::uint32_t len = detail::get_u32(is);
      if (len > 4096) throw IoError("implausible parameter name length");
      std::string name(len, '\0');
      if (!is.read(name.data(), len)) throw IoError("truncated parameter name");
      int dims[4];
      for (int& d : dims) {
        const std::uint32_t v = detail::get_u32(is);
        if (v > (1u << 24)) throw IoError("implausible dimension for " + name);
        d = static_cast<int>(v);
      }
      Tensor t(dims[0], dims[1], dims[2], dims[3]);
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = detail::get_f32(is);
      out.push_back({std::move(name), std::move(t)});
    }
  } catch (const std::runtime_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return out;
}

void load_checkpoint(const std::filesystem::path& path, ModelParams<float>& params) {
  const auto records = read_checkpoint(path);
  auto lookup = [&](const std::string& name) -> const Tensor* {
    for (const auto& r : records) {
      if (r.name == name) return &r.value;
    }
    return nullptr;
  };
  for (auto& p : params) {
    const Tensor* v = lookup(p.name);
    if (!v) throw IoError(path.string() + ": missing parameter " + p.name);
    if (!v->same_shape(p.value)) {
      throw IoError(path.string() + ": parameter " + p.name + " has shape " + shape_string(v->shape()) +
                    ", expected " + shape_string(p.value.shape()));
    }
    p.value = *v;
    const Tensor* m = lookup(p.name + ".m");
    if (m && m->same_shape(p.value)) {
      p.momentum = *m;
    } else {
      p.momentum.fill(0.0f);
    }
    p.grad.fill(0.0f);
  }
}

}  // namespace texsmooth::nn
