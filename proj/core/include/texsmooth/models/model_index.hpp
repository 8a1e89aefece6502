#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "texsmooth/models/pipeline.hpp"

namespace texsmooth::models {

/// A models directory holds one checkpoint per role plus `models.json`, which
/// maps each role to its checkpoint file and architecture so that shapes are
/// validated before weights are read.
inline constexpr std::string_view kModelIndexFile = "models.json";

void save_tpn(const std::filesystem::path& dir, const Tpn<float>& model);
void save_spn(const std::filesystem::path& dir, const Spn<float>& model);
void save_tsafn(const std::filesystem::path& dir, const Tsafn<float>& model);

/// Throws IoError("missing checkpoint: <role>") when the role is absent.
Tpn<float> load_tpn(const std::filesystem::path& dir);
Spn<float> load_spn(const std::filesystem::path& dir);
Tsafn<float> load_tsafn(const std::filesystem::path& dir);

bool has_model(const std::filesystem::path& dir, std::string_view role);

void save_model_set(const std::filesystem::path& dir, const ModelSet& models);
ModelSet load_model_set(const std::filesystem::path& dir);

}  // namespace texsmooth::models
