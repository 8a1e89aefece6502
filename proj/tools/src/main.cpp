// texsmooth command-line entry point.
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "texsmooth_cli/commands.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace texsmooth;

namespace {

/// Fills options that were not given on the command line from a JSON config
/// object whose keys are long option names (dashes or underscores).
void apply_config(CLI::App& sub, const json& cfg) {
  for (const auto& [key, value] : cfg.items()) {
    std::string name = key;
    for (char& ch : name) {
      if (ch == '_') ch = '-';
    }
    CLI::Option* opt = nullptr;
    try {
      opt = sub.get_option("--" + name);
    } catch (const CLI::OptionNotFound&) {
      try {
        opt = sub.get_parent()->get_option("--" + name);
      } catch (const CLI::OptionNotFound&) {
        throw std::invalid_argument("config key '" + key + "' is not an option of '" + sub.get_name() + "'");
      }
    }
    if (opt->count() > 0) continue;  // flags win over the file
    const std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    opt->add_result(text);
    opt->run_callback();
  }
}

json load_config(const fs::path& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  json j = json::parse(in);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  // A config may be flat or keyed by subcommand.
  if (j.contains(command) && j[command].is_object()) return j[command];
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Texture and structure aware image smoothing"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1;
  std::string config_path;
  std::string out_path;
  app.add_option("--seed", seed, "Global seed");
  app.add_option("--config", config_path, "JSON file with option values (flags take precedence)");
  app.add_option("--out", out_path, "Output path (directory or file, per command)");

  // gen
  cli::GenOptions gen;
  std::string gt_mode = "remapped";
  auto* gen_cmd = app.add_subcommand("gen", "Generate a blended dataset with ground truths");
  gen_cmd->add_option("--structures", gen.structures_dir, "Directory of structure-only PNGs (default: procedural)");
  gen_cmd->add_option("--textures", gen.textures_dir, "Directory of texture PNGs (default: procedural)");
  gen_cmd->add_option("--count", gen.count, "Number of samples")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--kappa", gen.blend.kappa, "Blend range coefficient")->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--mask-threshold", gen.blend.mask_threshold, "Pattern binarization threshold");
  gen_cmd->add_option("--gt-mode", gt_mode, "literal or remapped")->check(CLI::IsMember({"literal", "remapped"}));
  gen_cmd->add_flag("--per-tile", gen.blend.per_tile_transform, "One random transform per tile");
  gen_cmd->add_option("--toy-size", gen.toy_size, "Side of procedural structure images");
  gen_cmd->add_option("--toy-patterns", gen.toy_patterns, "Procedural pattern pool size");
  gen_cmd->add_option("--threads", gen.threads, "Worker threads (capped by TEXSMOOTH_THREADS)");

  // train
  cli::TrainOptions train;
  std::string which = "tpn", train_ablation = "double", edge_reduction = "mean_per_pixel";
  auto* train_cmd = app.add_subcommand("train", "Train one network or fine-tune all three");
  train_cmd->add_option("dataset", train.dataset_dir, "Dataset directory")->required();
  train_cmd->add_option("--which", which, "tpn, spn, tsafn or joint")
      ->check(CLI::IsMember({"tpn", "spn", "tsafn", "joint"}));
  train_cmd->add_option("--models", train.models_dir, "Directory with prerequisite checkpoints (default: --out)");
  train_cmd->add_option("--split", train.split, "Manifest split to train on");
  train_cmd->add_option("--steps", train.train.steps, "Optimizer steps");
  train_cmd->add_option("--learning-rate", train.train.learning_rate, "Learning rate");
  train_cmd->add_option("--finetune-learning-rate", train.train.finetune_learning_rate, "Joint fine-tuning rate");
  train_cmd->add_option("--momentum", train.train.momentum, "Momentum");
  train_cmd->add_option("--batch-size", train.train.batch_size, "Patches per step");
  train_cmd->add_option("--patch-size", train.train.patch_size, "Patch side (multiple of 8)");
  train_cmd->add_option("--gamma", train.weights.gamma, "Filter loss weight");
  train_cmd->add_option("--lambda", train.weights.lambda, "Guidance loss weight");
  train_cmd->add_option("--ablation", train_ablation, "Guidance for tsafn: none, structure_only, texture_only, double")
      ->check(CLI::IsMember({"none", "structure_only", "texture_only", "double"}));
  train_cmd->add_option("--edge-reduction", edge_reduction, "sum or mean_per_pixel")
      ->check(CLI::IsMember({"sum", "mean_per_pixel"}));

  // smooth
  cli::SmoothOptions smooth;
  std::string smooth_ablation = "double";
  auto* smooth_cmd = app.add_subcommand("smooth", "Smooth one image");
  smooth_cmd->add_option("input", smooth.input, "Input PNG")->required()->check(CLI::ExistingFile);
  smooth_cmd->add_option("--models", smooth.models_dir, "Models directory")->required();
  smooth_cmd->add_option("--ablation", smooth_ablation, "none, structure_only, texture_only, double")
      ->check(CLI::IsMember({"none", "structure_only", "texture_only", "double"}));
  smooth_cmd->add_flag("--emit-guidance", smooth.emit_guidance, "Also write *_texture.png and *_structure.png");

  // eval
  cli::EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "MSE/PSNR/SSIM of predictions against ground truth");
  eval_cmd->add_option("pred_dir", eval.pred_dir, "Predictions")->required();
  eval_cmd->add_option("gt_dir", eval.gt_dir, "Ground truth")->required();

  // enhance
  cli::EnhanceOptions enhance;
  std::string enhance_ablation = "double";
  auto* enhance_cmd = app.add_subcommand("enhance", "Detail enhancement S + alpha (I - S)");
  enhance_cmd->add_option("input", enhance.input, "Input PNG")->required()->check(CLI::ExistingFile);
  enhance_cmd->add_option("--models", enhance.models_dir, "Models directory")->required();
  enhance_cmd->add_option("--alpha", enhance.alpha, "Detail gain (>= 1)");
  enhance_cmd->add_option("--ablation", enhance_ablation, "none, structure_only, texture_only, double")
      ->check(CLI::IsMember({"none", "structure_only", "texture_only", "double"}));

  // gradcheck
  cli::GradcheckCmdOptions grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of every op and network");
  grad_cmd->add_option("--tolerance", grad.suite.tolerance, "Maximum relative error");
  grad_cmd->add_option("--inject-fault", grad.suite.inject_fault, "Perturb one component's gradient (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!config_path.empty()) apply_config(*sub, load_config(config_path, sub->get_name()));

    if (sub == gen_cmd) {
      if (out_path.empty()) throw std::invalid_argument("gen requires --out <dir>");
      gen.out_dir = out_path;
      gen.seed = seed;
      gen.blend.gt_mode = texgen::gt_mode_from_string(gt_mode);
      return cli::cmd_gen(gen, std::cout, std::cerr);
    }
    if (sub == train_cmd) {
      if (out_path.empty()) throw std::invalid_argument("train requires --out <dir>");
      train.out_dir = out_path;
      train.which = cli::train_target_from_string(which);
      train.ablation = models::ablation_from_string(train_ablation);
      train.train.seed = seed;
      train.train.edge_reduction = edge_reduction == "sum" ? nn::Reduction::kSum : nn::Reduction::kMeanPerPixel;
      return cli::cmd_train(train, std::cout, std::cerr);
    }
    if (sub == smooth_cmd) {
      if (out_path.empty()) throw std::invalid_argument("smooth requires --out <file.png>");
      smooth.output = out_path;
      smooth.seed = seed;
      smooth.ablation = models::ablation_from_string(smooth_ablation);
      return cli::cmd_smooth(smooth, std::cout, std::cerr);
    }
    if (sub == eval_cmd) {
      eval.output = out_path;
      eval.seed = seed;
      return cli::cmd_eval(eval, std::cout, std::cerr);
    }
    if (sub == enhance_cmd) {
      if (out_path.empty()) throw std::invalid_argument("enhance requires --out <file.png>");
      enhance.output = out_path;
      enhance.seed = seed;
      enhance.ablation = models::ablation_from_string(enhance_ablation);
      return cli::cmd_enhance(enhance, std::cout, std::cerr);
    }
    if (sub == grad_cmd) {
      grad.out_dir = out_path;
      grad.suite.seed = seed;
      return cli::cmd_gradcheck(grad, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
