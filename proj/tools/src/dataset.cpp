#include "texsmooth_cli/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "texsmooth/image_io.hpp"
#include "texsmooth/toy.hpp"

namespace texsmooth::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kLayoutDirs[] = {"input", "structure", "texture_gt", "mask", "edge_gt"};

std::vector<fs::path> list_pngs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no PNG files in " + dir.string());
  return files;
}

json transform_json(const texgen::TransformParams& p) {
  json j = {{"kind", std::string(texgen::to_string(p.kind))}};
  switch (p.kind) {
    case texgen::TransformKind::kScale: j["s1"] = p.s1; j["s2"] = p.s2; break;
    case texgen::TransformKind::kShearX:
    case texgen::TransformKind::kShearY: j["k"] = p.k; break;
    case texgen::TransformKind::kRotate: j["theta"] = p.theta; break;
    case texgen::TransformKind::kFreeform: j["f"] = p.f; j["seed"] = p.seed; break;
  }
  return j;
}

json read_manifest(const fs::path& dir) {
  const fs::path path = dir / kManifest;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace

SplitCounts split_counts(int n) {
  if (n < 0) throw std::invalid_argument("split_counts: negative count");
  SplitCounts s;
  s.val = n * 10 / 100;
  s.test = n * 25 / 100;
  s.train = n - s.val - s.test;
  return s;
}

std::string sample_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", index);
  return buf;
}

unsigned generation_threads(unsigned requested) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TEXSMOOTH_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) {
      throw std::invalid_argument("TEXSMOOTH_THREADS must be a positive integer");
    }
    n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

GenReport generate_dataset(const GenOptions& opts, std::ostream& log) {
  if (opts.count < 1) throw std::invalid_argument("count must be >= 1");
  if (opts.out_dir.empty()) throw std::invalid_argument("an output directory is required");
  GenReport report;

  // Pattern pool.
  std::vector<texgen::TexturePattern> pool;
  std::vector<std::string> pool_sources;
  if (opts.textures_dir.empty()) {
    Rng rng(mix_seed(opts.seed, 0x7e7u));
    pool = toy::make_pattern_pool(opts.toy_patterns, rng);
    for (std::size_t i = 0; i < pool.size(); ++i) pool_sources.push_back("procedural:" + std::to_string(i));
  } else {
    for (const fs::path& file : list_pngs(opts.textures_dir)) {
      try {
        pool.push_back(texgen::extract_texture_pattern(read_png(file), opts.blend.mask_threshold));
        pool_sources.push_back(file.filename().string());
      } catch (const texgen::DegeneratePatternError&) {
        log << "warning: skipping degenerate texture pattern " << file.string() << '\n';
        ++report.warnings;
      }
    }
  }
  if (pool.empty()) throw std::invalid_argument("no usable texture patterns");

  // Structure sources.
  std::vector<fs::path> structure_files;
  if (!opts.structures_dir.empty()) structure_files = list_pngs(opts.structures_dir);
  if (structure_files.empty() && opts.toy_size < texgen::kCanvasSize) {
    throw std::invalid_argument("procedural structure size must be >= 100");
  }

  for (const char* d : kLayoutDirs) fs::create_directories(opts.out_dir / d);

  std::vector<texgen::GeneratedSample> samples(opts.count);
  std::vector<std::string> sources(opts.count);
  const unsigned workers = std::min<unsigned>(generation_threads(opts.threads), opts.count);
  std::mutex error_mutex;
  std::exception_ptr error;

  auto work = [&](unsigned worker) {
    try {
      for (int i = static_cast<int>(worker); i < opts.count; i += static_cast<int>(workers)) {
        Image s;
        if (structure_files.empty()) {
          Rng rng(mix_seed(opts.seed, 2 * static_cast<std::uint64_t>(i)));
          s = toy::make_cartoon(opts.toy_size, opts.toy_size, rng);
          sources[i] = "procedural";
        } else {
          const fs::path& file = structure_files[i % structure_files.size()];
          s = read_png(file);
          if (s.channels() == 1) s = to_rgb(s);
          sources[i] = file.filename().string();
        }
        auto sample = texgen::generate_sample(s, pool, mix_seed(opts.seed, 2 * static_cast<std::uint64_t>(i) + 1),
                                              opts.blend);
        const std::string name = sample_id(i) + ".png";
        write_png(opts.out_dir / "input" / name, sample.input, 16);
        write_png(opts.out_dir / "structure" / name, sample.structure_only, 16);
        write_png(opts.out_dir / "texture_gt" / name, sample.texture_gt, 16);
        write_png(opts.out_dir / "mask" / name, sample.texture_mask, 8);
        write_png(opts.out_dir / "edge_gt" / name, sample.structure_map, 8);
        samples[i] = std::move(sample);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
  }
  if (error) std::rethrow_exception(error);

  // Seeded split assignment.
  std::vector<int> order(opts.count);
  for (int i = 0; i < opts.count; ++i) order[i] = i;
  Rng split_rng(mix_seed(opts.seed, 0x5b17u));
  for (int i = opts.count - 1; i > 0; --i) {
    std::swap(order[i], order[uniform_index(split_rng, static_cast<std::uint64_t>(i) + 1)]);
  }
  report.splits = split_counts(opts.count);
  json splits = {{"train", json::array()}, {"val", json::array()}, {"test", json::array()}};
  for (int r = 0; r < opts.count; ++r) {
    const char* key = r < report.splits.train ? "train" : r < report.splits.train + report.splits.val ? "val" : "test";
    splits[key].push_back(sample_id(order[r]));
  }
  for (auto& [key, ids] : splits.items()) std::sort(ids.begin(), ids.end());

  json manifest;
  manifest["count"] = opts.count;
  manifest["seed"] = opts.seed;
  manifest["kappa"] = opts.blend.kappa;
  manifest["mask_threshold"] = opts.blend.mask_threshold;
  manifest["gt_mode"] = std::string(texgen::to_string(opts.blend.gt_mode));
  manifest["per_tile_transform"] = opts.blend.per_tile_transform;
  manifest["patterns"] = pool_sources;
  json list = json::array();
  for (int i = 0; i < opts.count; ++i) {
    const auto& s = samples[i];
    json transforms = json::array();
    for (const auto& t : s.transforms) transforms.push_back(transform_json(t));
    list.push_back({{"id", sample_id(i)},
                    {"seed", s.seed},
                    {"structure_source", sources[i]},
                    {"pattern_id", s.pattern_index},
                    {"transforms", transforms}});
  }
  manifest["samples"] = list;
  manifest["splits"] = splits;
  std::ofstream out(opts.out_dir / kManifest);
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + (opts.out_dir / kManifest).string());
  report.written = opts.count;
  return report;
}

std::vector<std::string> split_ids(const fs::path& dataset_dir, std::string_view split) {
  const json manifest = read_manifest(dataset_dir);
  std::vector<std::string> ids;
  if (split == "all") {
    for (const auto& s : manifest.at("samples")) ids.push_back(s.at("id").get<std::string>());
    return ids;
  }
  const std::string key(split);
  if (!manifest.at("splits").contains(key)) throw std::invalid_argument("unknown split: " + key);
  return manifest["splits"][key].get<std::vector<std::string>>();
}

std::vector<texgen::GeneratedSample> load_samples(const fs::path& dataset_dir, const std::vector<std::string>& ids) {
  std::vector<texgen::GeneratedSample> out;
  out.reserve(ids.size());
  for (const std::string& id : ids) {
    const std::string name = id + ".png";
    texgen::GeneratedSample s;
    s.input = read_png(dataset_dir / "input" / name);
    s.structure_only = read_png(dataset_dir / "structure" / name);
    s.texture_gt = read_png(dataset_dir / "texture_gt" / name);
    s.texture_mask = read_png(dataset_dir / "mask" / name);
    s.structure_map = read_png(dataset_dir / "edge_gt" / name);
    if (s.input.channels() != 3 || s.structure_only.channels() != 3 || !s.input.same_shape(s.structure_only)) {
      throw IoError("sample " + id + ": input/structure must be matching RGB images");
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace texsmooth::cli
