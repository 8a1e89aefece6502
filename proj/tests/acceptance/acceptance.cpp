// Acceptance gate: runs every criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Arguments select a subset ("A1 A4 ...").
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "texsmooth/metrics.hpp"
#include "texsmooth/models/gradcheck_suite.hpp"
#include "texsmooth/models/pipeline.hpp"
#include "texsmooth/models/training.hpp"
#include "texsmooth/nn/loss.hpp"
#include "texsmooth/texgen.hpp"
#include "texsmooth/toy.hpp"

namespace {

using namespace texsmooth;
using Samples = std::vector<texgen::GeneratedSample>;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

double mean_of(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  return std::accumulate(v.begin() + begin, v.begin() + end, 0.0) / static_cast<double>(end - begin);
}

// Mann-Whitney AUC with midranks for ties.
double auc(const std::vector<float>& score, const std::vector<bool>& positive) {
  std::vector<std::size_t> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  double rank_sum = 0.0;
  double pos = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && score[idx[j]] == score[idx[i]]) ++j;
    const double midrank = (static_cast<double>(i) + static_cast<double>(j) + 1.0) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (positive[idx[k]]) {
        rank_sum += midrank;
        pos += 1.0;
      }
    }
    i = j;
  }
  const double neg = static_cast<double>(score.size()) - pos;
  if (pos == 0.0 || neg == 0.0) return 0.5;
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

Samples toy_set(int count, std::uint64_t seed) {
  toy::ToyDatasetConfig cfg;
  cfg.count = count;
  cfg.seed = seed;
  return toy::make_toy_dataset(cfg);
}

// Training and held-out toy sets are drawn from disjoint seeds.
Samples train_set(std::uint64_t seed) { return toy_set(200, seed); }
Samples held_out_set(std::uint64_t seed) { return toy_set(20, 1000 + seed); }

models::TrainConfig base_train_config(std::uint64_t seed) {
  models::TrainConfig cfg;
  cfg.learning_rate = 1e-4;
  cfg.momentum = 0.9;
  cfg.batch_size = 16;
  cfg.patch_size = 64;
  cfg.steps = 500;
  cfg.seed = seed;
  return cfg;
}

// --- A1 -------------------------------------------------------------------

Outcome a1_gradient_integrity() {
  const auto start = std::chrono::steady_clock::now();
  const auto report = models::run_gradcheck_suite();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::set<std::string> required = {"conv2d", "relu", "sigmoid", "concat_channels", "resize_bilinear",
                                          "mse_loss", "weighted_bce_loss", "tpn", "spn", "tsafn"};
  std::set<std::string> seen;
  double worst = 0.0;
  std::string worst_name;
  bool ok = true;
  for (const auto& c : report) {
    seen.insert(c.component);
    ok = ok && c.max_rel_error < 1e-4 && c.checked > 0;
    if (c.max_rel_error >= worst) {
      worst = c.max_rel_error;
      worst_name = c.component;
    }
  }
  ok = ok && seen == required && secs < 60.0;
  return {ok, format("%zu components, worst %s %.2e, %.1f s", report.size(), worst_name.c_str(), worst, secs)};
}

// --- A2 -------------------------------------------------------------------

Outcome a2_dataset_laws() {
  const auto start = std::chrono::steady_clock::now();
  toy::ToyDatasetConfig cfg;
  cfg.count = 100;
  cfg.sample_size = 64;
  cfg.seed = 2024;
  const Samples a = toy::make_toy_dataset(cfg);
  const Samples b = toy::make_toy_dataset(cfg);
  const double kappa = cfg.blend.kappa;

  long off_mask_mismatch = 0, range_violations = 0, gt_nonzero = 0, on_pixels = 0;
  bool identical = a.size() == b.size();
  for (std::size_t n = 0; n < a.size(); ++n) {
    const auto& s = a[n];
    if (s.input.height() != 64 || s.input.width() != 64) return {false, "sample is not 64x64"};
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        const bool on = s.texture_mask.at(y, x) == 1.0f;
        on_pixels += on;
        if (!on && s.texture_gt.at(y, x) != 0.0f) ++gt_nonzero;
        for (int c = 0; c < 3; ++c) {
          const float i = s.input.at(y, x, c);
          const float st = s.structure_only.at(y, x, c);
          if (!on) {
            if (std::memcmp(&i, &st, sizeof(float)) != 0) ++off_mask_mismatch;
          } else {
            // Interval ends evaluated exactly, rounded once to float.
            const double hi = 1.0 - static_cast<double>(st);
            if (i < static_cast<float>(kappa * hi) || i > static_cast<float>(hi)) ++range_violations;
          }
        }
      }
    }
    const auto same = [](const Image& p, const Image& q) {
      return p.same_shape(q) && std::memcmp(p.data().data(), q.data().data(), p.data().size() * sizeof(float)) == 0;
    };
    identical = identical && same(s.input, b[n].input) && same(s.texture_gt, b[n].texture_gt) &&
                same(s.texture_mask, b[n].texture_mask) && same(s.structure_map, b[n].structure_map) &&
                same(s.structure_only, b[n].structure_only);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = off_mask_mismatch == 0 && range_violations == 0 && gt_nonzero == 0 && identical && on_pixels > 0 &&
                  secs < 30.0;
  return {ok, format("off-mask mismatches %ld, range violations %ld, off-mask T* nonzero %ld, identical %s, "
                     "on-mask pixels %ld, %.1f s",
                     off_mask_mismatch, range_violations, gt_nonzero, identical ? "yes" : "no", on_pixels, secs)};
}

// --- A3 -------------------------------------------------------------------

Outcome a3_freeform_conservation() {
  Rng rng(33);
  const auto pool = toy::make_pattern_pool(10, rng);
  constexpr int kBlocks[] = {3, 5, 7, 9, 11};
  int failures = 0;
  for (int n = 0; n < 50; ++n) {
    const auto& p = pool[n % pool.size()];
    const int f = kBlocks[n % 5];
    const auto q = texgen::freeform_distort(p, f, 5000 + n);
    std::map<std::pair<int, int>, std::vector<float>> before, after;
    for (int y = 0; y < p.height(); ++y) {
      for (int x = 0; x < p.width(); ++x) {
        before[{y / f, x / f}].push_back(p.at(y, x));
        after[{y / f, x / f}].push_back(q.at(y, x));
      }
    }
    for (auto& [k, v] : before) std::sort(v.begin(), v.end());
    for (auto& [k, v] : after) std::sort(v.begin(), v.end());
    failures += before != after;
  }
  return {failures == 0, format("50 cases, %d mismatching", failures)};
}

// --- A4 -------------------------------------------------------------------

double ssim_single_window(const Image& a, const Image& b) {
  const double n = static_cast<double>(a.height()) * a.width();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    ma += a.data()[i];
    mb += b.data()[i];
  }
  ma /= n;
  mb /= n;
  double va = 0, vb = 0, cv = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double da = a.data()[i] - ma, db = b.data()[i] - mb;
    va += da * da;
    vb += db * db;
    cv += da * db;
  }
  va /= n;
  vb /= n;
  cv /= n;
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  return ((2 * ma * mb + c1) * (2 * cv + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
}

Outcome a4_metric_oracles() {
  Rng rng(44);
  auto random_image = [&](int h, int w, int c) {
    Image img(h, w, c);
    for (float& v : img.data()) v = static_cast<float>(uniform01(rng));
    return img;
  };
  const double psnr_err = std::abs(metrics::psnr_from_mse(0.01) - 20.0);
  const Image x = random_image(32, 40, 3);
  const Image y = random_image(32, 40, 3);
  const double self_err = std::abs(metrics::ssim(x, x) - 1.0);
  const double sym_err = std::abs(metrics::ssim(x, y) - metrics::ssim(y, x));
  const Image p = random_image(8, 8, 1);
  const Image q = random_image(8, 8, 1);
  const double window_err = std::abs(metrics::ssim(p, q) - ssim_single_window(p, q));
  const bool ok = psnr_err <= 1e-9 && self_err <= 1e-9 && sym_err <= 1e-12 && window_err <= 1e-9;
  return {ok, format("psnr %.1e, ssim(x,x) %.1e, symmetry %.1e, 8x8 window %.1e", psnr_err, self_err, sym_err,
                     window_err)};
}

// --- A5 -------------------------------------------------------------------

struct TpnRun {
  double ratio = 0.0;
  double auc = 0.0;
  models::Tpn<float> model;
};

TpnRun train_tpn_for_seed(std::uint64_t seed) {
  const Samples data = train_set(seed);
  auto r = models::train_tpn(data, base_train_config(seed));
  const auto& h = r.history;
  TpnRun out{mean_of(h, h.size() - 50, h.size()) / mean_of(h, 0, 50), 0.0, std::move(r.model)};
  std::vector<float> score;
  std::vector<bool> positive;
  for (const auto& s : held_out_set(seed)) {
    const Tensor t = out.model.forward(image_to_tensor(s.input));
    for (std::size_t i = 0; i < t.size(); ++i) {
      score.push_back(t[i]);
      positive.push_back(s.texture_mask.data()[i] == 1.0f);
    }
  }
  out.auc = auc(score, positive);
  return out;
}

std::map<std::uint64_t, models::Tpn<float>> g_tpn_by_seed;  // reused by A6

Outcome a5_tpn_training() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> ratios, aucs;
  std::string per_seed;
  for (std::uint64_t seed : {1, 2, 3}) {
    TpnRun r = train_tpn_for_seed(seed);
    ratios.push_back(r.ratio);
    aucs.push_back(r.auc);
    per_seed += format(" s%llu(ratio %.3f, auc %.3f)", static_cast<unsigned long long>(seed), r.ratio, r.auc);
    g_tpn_by_seed.insert_or_assign(seed, std::move(r.model));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double ratio = median3(ratios), a = median3(aucs);
  const bool ok = ratio <= 0.5 && a > 0.7 && secs < 600.0;
  return {ok, format("median loss ratio %.3f (<= 0.5), median AUC %.3f (> 0.7), %.0f s;", ratio, a, secs) + per_seed};
}

// --- A6 -------------------------------------------------------------------

constexpr int kA6Steps = 2000;

models::TrainConfig tsafn_config(std::uint64_t seed) {
  models::TrainConfig cfg = base_train_config(seed);
  cfg.steps = kA6Steps;
  cfg.patch_size = 32;
  cfg.batch_size = 4;
  // At 1e-4 the filter barely leaves its init in 2,000 steps and both arms tie.
  cfg.learning_rate = 1e-3;
  return cfg;
}

Outcome a6_ablation_direction() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> with_guidance, without;
  std::string per_seed;
  for (std::uint64_t seed : {1, 2, 3}) {
    const Samples data = train_set(seed);
    const Samples val = held_out_set(seed);
    auto it = g_tpn_by_seed.find(seed);
    models::Tpn<float> tpn = it != g_tpn_by_seed.end() ? it->second
                                                        : models::train_tpn(data, base_train_config(seed)).model;
    const models::Spn<float> spn = models::train_spn(data, base_train_config(seed)).model;
    const auto guided = models::train_tsafn(data, tsafn_config(seed), &tpn, &spn, models::Ablation::kDouble);
    const auto plain = models::train_tsafn(data, tsafn_config(seed), nullptr, nullptr, models::Ablation::kNone);
    with_guidance.push_back(models::evaluate_filter_loss(val, &tpn, &spn, guided.model, models::Ablation::kDouble));
    without.push_back(models::evaluate_filter_loss(val, nullptr, nullptr, plain.model, models::Ablation::kNone));
    per_seed += format(" s%llu(double %.5f, none %.5f)", static_cast<unsigned long long>(seed), with_guidance.back(),
                       without.back());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double d = median3(with_guidance), n = median3(without);
  return {d <= n, format("median val MSE double %.5f <= none %.5f, %.0f s;", d, n, secs) + per_seed};
}

// --- A7 -------------------------------------------------------------------

Outcome a7_joint_loss_arithmetic() {
  const nn::LossWeights w{0.6, 0.2};
  const double v = nn::combined_finetune_loss(1.0, 1.0, 1.0, w);
  return {v == 1.0, format("combined(1,1,1) = %.17g", v)};
}

// --- A8 -------------------------------------------------------------------

Outcome a8_detail_enhancement() {
  Rng rng(88);
  Image input(24, 24, 3), smoothed(24, 24, 3);
  for (float& v : input.data()) v = static_cast<float>(uniform01(rng));
  for (float& v : smoothed.data()) v = static_cast<float>(uniform01(rng));
  const auto raw = models::detail_enhance_raw(input, smoothed, 1.0);
  long identity_mismatch = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) identity_mismatch += raw[i] != input.data()[i];

  // A texture-free constant image: the ideal smoother returns it unchanged.
  const Image flat(24, 24, 3, 0.3f);
  const Image de = models::detail_enhance(flat, flat, 2.0);
  long flat_mismatch = 0;
  for (std::size_t i = 0; i < de.data().size(); ++i) flat_mismatch += de.data()[i] != flat.data()[i];
  return {identity_mismatch == 0 && flat_mismatch == 0,
          format("alpha=1 mismatches %ld, constant image alpha=2 mismatches %ld", identity_mismatch, flat_mismatch)};
}

// --- A9 -------------------------------------------------------------------

Outcome a9_overfit() {
  const Samples one = toy_set(1, 99);
  models::TrainConfig cfg;
  cfg.steps = 2000;
  cfg.batch_size = 1;
  cfg.patch_size = 64;
  // Largest rate that stayed stable on this sample; 2e-2 diverges.
  cfg.learning_rate = 5e-3;
  cfg.seed = 9;
  const auto r = models::train_tsafn(one, cfg, nullptr, nullptr, models::Ablation::kNone);
  const double best = *std::min_element(r.history.begin(), r.history.end());
  const double last = r.history.back();
  return {last < 1e-3, format("l_D first %.5f, final %.6f (< 1e-3), best %.6f", r.history.front(), last, best)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::pair<std::string, std::function<Outcome()>>>> criteria = {
      {"A1", {"gradient integrity", a1_gradient_integrity}},
      {"A2", {"dataset laws", a2_dataset_laws}},
      {"A3", {"freeform conservation", a3_freeform_conservation}},
      {"A4", {"metric oracles", a4_metric_oracles}},
      {"A5", {"TPN training smoke", a5_tpn_training}},
      {"A6", {"ablation direction", a6_ablation_direction}},
      {"A7", {"joint loss arithmetic", a7_joint_loss_arithmetic}},
      {"A8", {"detail enhancement identity", a8_detail_enhancement}},
      {"A9", {"TSAFN overfit capability", a9_overfit}},
  };
  std::set<std::string> selected(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [id, entry] : criteria) {
    if (!selected.empty() && !selected.contains(id)) continue;
    Outcome o;
    try {
      o = entry.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %-28s %s  %s\n", id.c_str(), entry.first.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
