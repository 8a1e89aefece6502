#include "texsmooth/models/model_index.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

#include "texsmooth/image_io.hpp"
#include "texsmooth/nn/checkpoint.hpp"

namespace texsmooth::models {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_index(const fs::path& dir) {
  const fs::path path = dir / kModelIndexFile;
  if (!fs::exists(path)) return json::object();
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": invalid model index: " + e.what());
  }
}

void write_index(const fs::path& dir, const json& index) {
  const fs::path path = dir / kModelIndexFile;
  std::ofstream out(path);
  out << index.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

void save_role(const fs::path& dir, const std::string& role, json arch, const nn::ModelParams<float>& params) {
  fs::create_directories(dir);
  const std::string file = role + ".txsw";
  nn::save_checkpoint(dir / file, params);
  json index = read_index(dir);
  index[role] = {{"checkpoint", file}, {"arch", std::move(arch)}};
  write_index(dir, index);
}

const json& role_entry(const fs::path& dir, const json& index, const std::string& role) {
  if (!index.contains(role)) throw IoError("missing checkpoint: " + role);
  const json& entry = index[role];
  if (!entry.contains("checkpoint") || !entry.contains("arch")) {
    throw IoError((dir / kModelIndexFile).string() + ": malformed entry for " + role);
  }
  if (!fs::exists(dir / entry["checkpoint"].get<std::string>())) throw IoError("missing checkpoint: " + role);
  return entry;
}

template <typename Model>
Model load_role(const fs::path& dir, Model model, const json& entry) {
  nn::load_checkpoint(dir / entry["checkpoint"].get<std::string>(), model.params());
  return model;
}

template <std::size_t N>
std::array<int, N> int_array(const json& j, const fs::path& dir, const std::string& role, const char* key) {
  try {
    return j.at(key).get<std::array<int, N>>();
  } catch (const json::exception&) {
    throw IoError((dir / kModelIndexFile).string() + ": bad '" + key + "' for " + role);
  }
}

}  // namespace

void save_tpn(const fs::path& dir, const Tpn<float>& model) {
  save_role(dir, "tpn", {{"branch_widths", model.config().branch_widths}}, model.params());
}

void save_spn(const fs::path& dir, const Spn<float>& model) {
  save_role(dir, "spn", {{"widths", model.config().widths}}, model.params());
}

void save_tsafn(const fs::path& dir, const Tsafn<float>& model) {
  save_role(dir, "tsafn", {{"widths", model.config().widths}}, model.params());
}

Tpn<float> load_tpn(const fs::path& dir) {
  const json index = read_index(dir);
  const json& entry = role_entry(dir, index, "tpn");
  TpnConfig cfg;
  cfg.branch_widths = int_array<3>(entry["arch"], dir, "tpn", "branch_widths");
  return load_role(dir, Tpn<float>(cfg), entry);
}

Spn<float> load_spn(const fs::path& dir) {
  const json index = read_index(dir);
  const json& entry = role_entry(dir, index, "spn");
  SpnConfig cfg;
  cfg.widths = int_array<3>(entry["arch"], dir, "spn", "widths");
  return load_role(dir, Spn<float>(cfg), entry);
}

Tsafn<float> load_tsafn(const fs::path& dir) {
  const json index = read_index(dir);
  const json& entry = role_entry(dir, index, "tsafn");
  TsafnConfig cfg;
  cfg.widths = int_array<3>(entry["arch"], dir, "tsafn", "widths");
  return load_role(dir, Tsafn<float>(cfg), entry);
}

bool has_model(const fs::path& dir, std::string_view role) {
  const json index = read_index(dir);
  const std::string key(role);
  return index.contains(key) && index[key].contains("checkpoint") &&
         fs::exists(dir / index[key]["checkpoint"].get<std::string>());
}

void save_model_set(const fs::path& dir, const ModelSet& models) {
  save_tpn(dir, models.tpn);
  save_spn(dir, models.spn);
  save_tsafn(dir, models.tsafn);
}

ModelSet load_model_set(const fs::path& dir) { return {load_tpn(dir), load_spn(dir), load_tsafn(dir)}; }

}  // namespace texsmooth::models
