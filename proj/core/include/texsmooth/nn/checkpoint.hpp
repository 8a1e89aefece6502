#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "texsmooth/nn/params.hpp"

namespace texsmooth::nn {

inline constexpr unsigned char kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor value;
};

/// Layout: "TXSW", version byte, then one record per parameter (u32 name
/// length, UTF-8 name, four u32 dims, float32 values, all little-endian),
/// followed by the momentum buffers under "<name>.m".
void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params);

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

/// Loads values and momentum into `params`, requiring every parameter to be
/// present with a matching shape.
void load_checkpoint(const std::filesystem::path& path, ModelParams<float>& params);

}  // namespace texsmooth::nn
