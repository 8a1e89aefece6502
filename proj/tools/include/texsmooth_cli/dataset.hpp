#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "texsmooth/texgen.hpp"

namespace texsmooth::cli {

/// 65/10/25 proportions: val and test are floored, train takes the rest.
struct SplitCounts {
  int train = 0;
  int val = 0;
  int test = 0;
};
SplitCounts split_counts(int n);

/// Zero-padded six-digit sample name.
std::string sample_id(int index);

struct GenOptions {
  std::filesystem::path structures_dir;  // empty: procedural cartoons
  std::filesystem::path textures_dir;    // empty: procedural texture images
  std::filesystem::path out_dir;
  int count = 12;
  std::uint64_t seed = 1;
  texgen::BlendConfig blend{};
  int toy_size = 128;      // side of procedural structure images
  int toy_patterns = 8;    // procedural pattern pool size
  unsigned threads = 0;    // 0: hardware concurrency, capped by TEXSMOOTH_THREADS
};

struct GenReport {
  int written = 0;
  int warnings = 0;
  SplitCounts splits;
};

/// Writes input/, structure/, texture_gt/ (16-bit), mask/, edge_gt/ and
/// manifest.json. Warnings (skipped degenerate patterns) go to `log`.
GenReport generate_dataset(const GenOptions& opts, std::ostream& log);

/// Sample ids listed under `split` ("train", "val", "test" or "all").
std::vector<std::string> split_ids(const std::filesystem::path& dataset_dir, std::string_view split);

std::vector<texgen::GeneratedSample> load_samples(const std::filesystem::path& dataset_dir,
                                                  const std::vector<std::string>& ids);

/// Worker count for generation: `requested` (or hardware concurrency when 0),
/// capped by TEXSMOOTH_THREADS when set.
unsigned generation_threads(unsigned requested);

}  // namespace texsmooth::cli
