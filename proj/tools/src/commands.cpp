#include "texsmooth_cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "texsmooth/image_io.hpp"
#include "texsmooth/models/model_index.hpp"
#include "texsmooth/models/pipeline.hpp"

namespace texsmooth::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_effective_config(const fs::path& dir, const json& cfg) {
  const fs::path d = dir.empty() ? fs::path(".") : dir;
  fs::create_directories(d);
  std::ofstream os(d / kEffectiveConfig);
  os << cfg.dump(2) << '\n';
  if (!os) throw IoError("cannot write " + (d / kEffectiveConfig).string());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

json train_config_json(const models::TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"momentum", c.momentum},
          {"finetune_learning_rate", c.finetune_learning_rate},
          {"patch_size", c.patch_size},
          {"batch_size", c.batch_size},
          {"steps", c.steps},
          {"seed", c.seed},
          {"edge_reduction", c.edge_reduction == nn::Reduction::kSum ? "sum" : "mean_per_pixel"}};
}

void require_model(const fs::path& dir, const char* role) {
  if (!models::has_model(dir, role)) throw IoError(std::string("missing checkpoint: ") + role);
}

Image read_rgb(const fs::path& path) {
  Image img = read_png(path);
  return img.channels() == 3 ? img : to_rgb(img);
}

fs::path sibling(const fs::path& output, const std::string& suffix) {
  return output.parent_path() / (output.stem().string() + suffix + ".png");
}

}  // namespace

fs::path config_dir_for(const fs::path& output, bool output_is_dir) {
  if (output_is_dir) return output;
  return output.has_parent_path() ? output.parent_path() : fs::path(".");
}

int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err) {
  const GenReport r = generate_dataset(opts, err);
  write_effective_config(opts.out_dir, {{"command", "gen"},
                                        {"seed", opts.seed},
                                        {"structures_dir", opts.structures_dir.string()},
                                        {"textures_dir", opts.textures_dir.string()},
                                        {"out", opts.out_dir.string()},
                                        {"count", opts.count},
                                        {"kappa", opts.blend.kappa},
                                        {"mask_threshold", opts.blend.mask_threshold},
                                        {"gt_mode", std::string(texgen::to_string(opts.blend.gt_mode))},
                                        {"per_tile_transform", opts.blend.per_tile_transform},
                                        {"toy_size", opts.toy_size},
                                        {"toy_patterns", opts.toy_patterns},
                                        {"threads", generation_threads(opts.threads)}});
  out << "wrote " << r.written << " samples (train " << r.splits.train << ", val " << r.splits.val << ", test "
      << r.splits.test << ") to " << opts.out_dir.string() << '\n';
  if (r.warnings) err << "warnings: " << r.warnings << '\n';
  return 0;
}

TrainTarget train_target_from_string(std::string_view name) {
  for (TrainTarget t : {TrainTarget::kTpn, TrainTarget::kSpn, TrainTarget::kTsafn, TrainTarget::kJoint}) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown training target: " + std::string(name));
}

std::string_view to_string(TrainTarget t) {
  switch (t) {
    case TrainTarget::kTpn: return "tpn";
    case TrainTarget::kSpn: return "spn";
    case TrainTarget::kTsafn: return "tsafn";
    case TrainTarget::kJoint: return "joint";
  }
  return "unknown";
}

int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err) {
  (void)err;
  opts.train.validate();
  if (opts.out_dir.empty()) throw std::invalid_argument("an output directory is required");
  const fs::path models_dir = opts.models_dir.empty() ? opts.out_dir : opts.models_dir;

  // Prerequisites are checked before any data is read.
  std::optional<models::Tpn<float>> tpn;
  std::optional<models::Spn<float>> spn;
  std::optional<models::Tsafn<float>> tsafn;
  if (opts.which == TrainTarget::kJoint) {
    for (const char* role : {"tpn", "spn", "tsafn"}) require_model(models_dir, role);
  }
  if (opts.which == TrainTarget::kTsafn) {
    if (models::uses_texture(opts.ablation)) require_model(models_dir, "tpn");
    if (models::uses_structure(opts.ablation)) require_model(models_dir, "spn");
  }
  const bool need_tpn = opts.which == TrainTarget::kJoint ||
                        (opts.which == TrainTarget::kTsafn && models::uses_texture(opts.ablation));
  const bool need_spn = opts.which == TrainTarget::kJoint ||
                        (opts.which == TrainTarget::kTsafn && models::uses_structure(opts.ablation));
  if (need_tpn) tpn = models::load_tpn(models_dir);
  if (need_spn) spn = models::load_spn(models_dir);
  if (opts.which == TrainTarget::kJoint) tsafn = models::load_tsafn(models_dir);

  const auto data = load_samples(opts.dataset_dir, split_ids(opts.dataset_dir, opts.split));
  fs::create_directories(opts.out_dir);
  const fs::path csv_path = opts.out_dir / (std::string(to_string(opts.which)) + "_loss.csv");
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write " + csv_path.string());

  const auto write_history = [&](const std::vector<double>& h) {
    csv << "step,loss\n";
    for (std::size_t i = 0; i < h.size(); ++i) csv << i << ',' << fmt(h[i]) << '\n';
  };

  double last = 0.0;
  switch (opts.which) {
    case TrainTarget::kTpn: {
      auto r = models::train_tpn(data, opts.train);
      write_history(r.history);
      if (!r.history.empty()) last = r.history.back();
      models::save_tpn(opts.out_dir, r.model);
      break;
    }
    case TrainTarget::kSpn: {
      auto r = models::train_spn(data, opts.train);
      write_history(r.history);
      if (!r.history.empty()) last = r.history.back();
      models::save_spn(opts.out_dir, r.model);
      break;
    }
    case TrainTarget::kTsafn: {
      auto r = models::train_tsafn(data, opts.train, tpn ? &*tpn : nullptr, spn ? &*spn : nullptr, opts.ablation);
      write_history(r.history);
      if (!r.history.empty()) last = r.history.back();
      models::save_tsafn(opts.out_dir, r.model);
      break;
    }
    case TrainTarget::kJoint: {
      const auto h = models::finetune_joint(data, opts.train, *tpn, *spn, *tsafn, opts.weights);
      csv << "step,total,filter,texture,edge\n";
      for (std::size_t i = 0; i < h.size(); ++i) {
        csv << i << ',' << fmt(h[i].total) << ',' << fmt(h[i].filter) << ',' << fmt(h[i].texture) << ','
            << fmt(h[i].edge) << '\n';
      }
      if (!h.empty()) last = h.back().total;
      models::save_model_set(opts.out_dir, {std::move(*tpn), std::move(*spn), std::move(*tsafn)});
      break;
    }
  }
  csv.close();
  if (!csv) throw IoError("cannot write " + csv_path.string());

  write_effective_config(opts.out_dir, {{"command", "train"},
                                        {"which", std::string(to_string(opts.which))},
                                        {"dataset", opts.dataset_dir.string()},
                                        {"split", opts.split},
                                        {"out", opts.out_dir.string()},
                                        {"models", models_dir.string()},
                                        {"seed", opts.train.seed},
                                        {"train", train_config_json(opts.train)},
                                        {"gamma", opts.weights.gamma},
                                        {"lambda", opts.weights.lambda},
                                        {"ablation", std::string(models::to_string(opts.ablation))},
                                        {"samples", data.size()}});
  out << "trained " << to_string(opts.which) << " for " << opts.train.steps << " steps";
  if (opts.train.steps > 0) out << ", final loss " << fmt(last);
  out << '\n';
  return 0;
}

int cmd_smooth(const SmoothOptions& opts, std::ostream& out, std::ostream&) {
  const Image img = read_rgb(opts.input);
  const models::ModelSet set = models::load_model_set(opts.models_dir);
  const auto r = models::smooth(img, set, opts.ablation);
  if (opts.output.has_parent_path()) fs::create_directories(opts.output.parent_path());
  write_png(opts.output, r.output, 8);
  if (opts.emit_guidance) {
    write_png(sibling(opts.output, "_texture"), r.texture_guidance, 8);
    write_png(sibling(opts.output, "_structure"), r.structure_guidance, 8);
  }
  write_effective_config(config_dir_for(opts.output, false),
                         {{"command", "smooth"},
                          {"seed", opts.seed},
                          {"input", opts.input.string()},
                          {"models", opts.models_dir.string()},
                          {"out", opts.output.string()},
                          {"ablation", std::string(models::to_string(opts.ablation))},
                          {"emit_guidance", opts.emit_guidance}});
  out << "wrote " << opts.output.string() << '\n';
  return 0;
}

EvalResult evaluate_dirs(const fs::path& pred_dir, const fs::path& gt_dir, std::ostream& err) {
  const auto names = [](const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::set<std::string> s;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".png") s.insert(e.path().filename().string());
    }
    return s;
  };
  const auto pred = names(pred_dir);
  const auto gt = names(gt_dir);
  EvalResult result;
  for (const auto& n : pred) {
    if (!gt.count(n)) {
      err << "warning: unmatched prediction " << (pred_dir / n).string() << '\n';
      ++result.warnings;
    }
  }
  for (const auto& n : gt) {
    if (!pred.count(n)) {
      err << "warning: unmatched ground truth " << (gt_dir / n).string() << '\n';
      ++result.warnings;
      continue;
    }
    const Image p = read_png(pred_dir / n);
    const Image g = read_png(gt_dir / n);
    if (!p.same_shape(g)) {
      throw std::invalid_argument("shape mismatch between " + (pred_dir / n).string() + " and " +
                                  (gt_dir / n).string());
    }
    result.rows.push_back({fs::path(n).stem().string(), metrics::evaluate(p, g)});
  }
  if (!result.rows.empty()) {
    metrics::MetricReport m{0.0, 0.0, 0.0};
    for (const auto& r : result.rows) {
      m.mse += r.report.mse;
      m.psnr += metrics::psnr_for_display(r.report.psnr);
      m.ssim += r.report.ssim;
    }
    const double n = static_cast<double>(result.rows.size());
    result.mean = {m.mse / n, m.psnr / n, m.ssim / n};
  }
  return result;
}

void write_eval_csv(std::ostream& os, const EvalResult& result) {
  os << "sample_id,mse,psnr_db,ssim\n";
  const auto row = [&](const std::string& id, const metrics::MetricReport& r) {
    os << id << ',' << fmt(r.mse) << ',' << fmt(metrics::psnr_for_display(r.psnr)) << ',' << fmt(r.ssim) << '\n';
  };
  for (const auto& r : result.rows) row(r.sample_id, r.report);
  row("mean", result.mean);
}

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  const EvalResult result = evaluate_dirs(opts.pred_dir, opts.gt_dir, err);
  if (opts.output.empty()) {
    write_eval_csv(out, result);
  } else {
    if (opts.output.has_parent_path()) fs::create_directories(opts.output.parent_path());
    std::ofstream os(opts.output);
    write_eval_csv(os, result);
    if (!os) throw IoError("cannot write " + opts.output.string());
  }
  write_effective_config(config_dir_for(opts.output, false), {{"command", "eval"},
                                                               {"seed", opts.seed},
                                                               {"pred_dir", opts.pred_dir.string()},
                                                               {"gt_dir", opts.gt_dir.string()},
                                                               {"out", opts.output.string()}});
  err << "matched " << result.rows.size() << " pairs, warnings: " << result.warnings << '\n';
  return 0;
}

int cmd_enhance(const EnhanceOptions& opts, std::ostream& out, std::ostream&) {
  if (!(opts.alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
  const Image img = read_rgb(opts.input);
  const models::ModelSet set = models::load_model_set(opts.models_dir);
  const Image s = models::smooth(img, set, opts.ablation).output;
  const Image de = models::detail_enhance(img, s, opts.alpha);
  if (opts.output.has_parent_path()) fs::create_directories(opts.output.parent_path());
  write_png(opts.output, de, 8);
  write_effective_config(config_dir_for(opts.output, false),
                         {{"command", "enhance"},
                          {"seed", opts.seed},
                          {"input", opts.input.string()},
                          {"models", opts.models_dir.string()},
                          {"out", opts.output.string()},
                          {"alpha", opts.alpha},
                          {"ablation", std::string(models::to_string(opts.ablation))}});
  out << "wrote " << opts.output.string() << '\n';
  return 0;
}

int cmd_gradcheck(const GradcheckCmdOptions& opts, std::ostream& out, std::ostream&) {
  const auto start = std::chrono::steady_clock::now();
  const auto report = models::run_gradcheck_suite(opts.suite);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool ok = true;
  char line[256];
  for (const auto& c : report) {
    std::snprintf(line, sizeof line, "%-18s max_rel_error=%.3e checked=%zu kink_retries=%zu worst=%s  %s\n",
                  c.component.c_str(), c.max_rel_error, c.checked, c.kink_retries, c.worst.c_str(),
                  c.passed ? "PASS" : "FAIL");
    out << line;
    ok = ok && c.passed;
  }
  std::snprintf(line, sizeof line, "gradcheck %s in %.1f s (tolerance %.0e)\n", ok ? "passed" : "FAILED", secs,
                opts.suite.tolerance);
  out << line;
  write_effective_config(opts.out_dir, {{"command", "gradcheck"},
                                        {"seed", opts.suite.seed},
                                        {"tolerance", opts.suite.tolerance},
                                        {"inject_fault", opts.suite.inject_fault}});
  return ok ? 0 : 1;
}

}  // namespace texsmooth::cli
