#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "texsmooth/metrics.hpp"
#include "texsmooth/models/gradcheck_suite.hpp"
#include "texsmooth/models/training.hpp"
#include "texsmooth_cli/dataset.hpp"

namespace texsmooth::cli {

inline constexpr const char* kEffectiveConfig = "effective_config.json";

/// Every command returns its exit code: 0 on success, 1 on failed checks.
/// Errors are thrown.
int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err);

enum class TrainTarget { kTpn, kSpn, kTsafn, kJoint };
TrainTarget train_target_from_string(std::string_view name);
std::string_view to_string(TrainTarget t);

struct TrainOptions {
  std::filesystem::path dataset_dir;
  TrainTarget which = TrainTarget::kTpn;
  std::filesystem::path out_dir;     // checkpoint, loss CSV and effective config
  std::filesystem::path models_dir;  // prerequisites; defaults to out_dir
  std::string split = "train";
  models::TrainConfig train{};
  nn::LossWeights weights{};
  models::Ablation ablation = models::Ablation::kDouble;  // tsafn guidance
};
int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err);

struct SmoothOptions {
  std::filesystem::path input;
  std::filesystem::path models_dir;
  std::filesystem::path output;
  models::Ablation ablation = models::Ablation::kDouble;
  bool emit_guidance = false;
  std::uint64_t seed = 1;
};
int cmd_smooth(const SmoothOptions& opts, std::ostream& out, std::ostream& err);

struct EvalRow {
  std::string sample_id;
  metrics::MetricReport report;
};
struct EvalResult {
  std::vector<EvalRow> rows;
  metrics::MetricReport mean;
  int warnings = 0;
};

struct EvalOptions {
  std::filesystem::path pred_dir;
  std::filesystem::path gt_dir;
  std::filesystem::path output;  // CSV; empty prints to `out`
  std::uint64_t seed = 1;
};
EvalResult evaluate_dirs(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                         std::ostream& err);
void write_eval_csv(std::ostream& os, const EvalResult& result);
int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);

struct EnhanceOptions {
  std::filesystem::path input;
  std::filesystem::path models_dir;
  std::filesystem::path output;
  double alpha = 2.0;
  models::Ablation ablation = models::Ablation::kDouble;
  std::uint64_t seed = 1;
};
int cmd_enhance(const EnhanceOptions& opts, std::ostream& out, std::ostream& err);

struct GradcheckCmdOptions {
  models::GradcheckOptions suite{};
  std::filesystem::path out_dir;  // effective config location; empty: current directory
};
int cmd_gradcheck(const GradcheckCmdOptions& opts, std::ostream& out, std::ostream& err);

/// Directory that receives effective_config.json for an output path: the
/// path itself when it names a directory, otherwise its parent.
std::filesystem::path config_dir_for(const std::filesystem::path& output, bool output_is_dir);

}  // namespace texsmooth::cli
