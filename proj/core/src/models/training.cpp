#include "texsmooth/models/training.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "texsmooth/nn/ops.hpp"

namespace texsmooth::models {
namespace {

void check_data(std::span<const texgen::GeneratedSample> data) {
  if (data.empty()) throw std::invalid_argument("training dataset is empty");
}

void check_loss(double v, const char* what) {
  if (!std::isfinite(v)) throw std::runtime_error(std::string(what) + " training diverged (non-finite loss)");
}

Tensor filled_like(const Tensor& ref, int channels, float value) {
  return Tensor(ref.n(), channels, ref.h(), ref.w(), value);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !(finetune_learning_rate >= 0.0)) {
    throw std::invalid_argument("learning rates must be non-negative");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0,1)");
  if (patch_size < 8 || patch_size % 8 != 0) throw std::invalid_argument("patch_size must be a positive multiple of 8");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
}

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::kNone: return "none";
    case Ablation::kStructureOnly: return "structure_only";
    case Ablation::kTextureOnly: return "texture_only";
    case Ablation::kDouble: return "double";
  }
  return "unknown";
}

Ablation ablation_from_string(std::string_view name) {
  for (Ablation a : {Ablation::kNone, Ablation::kStructureOnly, Ablation::kTextureOnly, Ablation::kDouble}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown ablation mode: " + std::string(name));
}

std::uint64_t init_seed(std::uint64_t seed, int role) { return mix_seed(seed, 1000 + role); }

Batch make_batch(std::span<const texgen::GeneratedSample> data, std::span<const std::size_t> indices) {
  std::vector<Image> in, s, t, m, e;
  for (std::size_t i : indices) {
    const auto& smp = data[i];
    in.push_back(smp.input);
    s.push_back(smp.structure_only);
    t.push_back(smp.texture_gt);
    m.push_back(smp.texture_mask);
    e.push_back(smp.structure_map);
  }
  return {image_to_tensor(in), image_to_tensor(s), image_to_tensor(t), image_to_tensor(m), image_to_tensor(e)};
}

PatchSampler::PatchSampler(std::span<const texgen::GeneratedSample> data, int patch_size, std::uint64_t seed)
    : data_(data), patch_(patch_size), rng_(mix_seed(seed, 7)) {
  check_data(data);
  for (const auto& s : data) {
    if (s.input.height() < patch_size || s.input.width() < patch_size) {
      throw std::invalid_argument("sample smaller than the training patch size");
    }
  }
}

Batch PatchSampler::next(int batch_size) {
  std::vector<texgen::GeneratedSample> patches;
  patches.reserve(batch_size);
  for (int b = 0; b < batch_size; ++b) {
    const auto& s = data_[uniform_index(rng_, data_.size())];
    const int y0 = static_cast<int>(uniform_index(rng_, s.input.height() - patch_ + 1));
    const int x0 = static_cast<int>(uniform_index(rng_, s.input.width() - patch_ + 1));
    patches.push_back(texgen::crop_sample(s, y0, x0, patch_, patch_));
  }
  std::vector<std::size_t> idx(patches.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return make_batch(patches, idx);
}

Guidance compute_guidance(const Tensor& rgb, const Tpn<float>* tpn, const Spn<float>* spn, Ablation ablation) {
  Guidance g;
  if (uses_texture(ablation)) {
    if (!tpn) throw std::invalid_argument("texture guidance requested without a texture network");
    g.texture = tpn->forward(rgb);
  } else {
    g.texture = filled_like(rgb, 1, kNeutralGuidance);
  }
  if (uses_structure(ablation)) {
    if (!spn) throw std::invalid_argument("structure guidance requested without a structure network");
    g.structure = spn->forward(rgb).fused;
  } else {
    g.structure = filled_like(rgb, 1, kNeutralGuidance);
  }
  return g;
}

EdgeLoss edge_loss(const SpnOutput<float>& out, const Tensor& edges, nn::Reduction reduction) {
  EdgeLoss loss;
  auto fused = nn::weighted_bce_loss(out.fused, edges, reduction);
  loss.value = fused.value;
  loss.grad_fused = std::move(fused.grad);
  for (int m = 0; m < SpnConfig::kStages; ++m) {
    auto side = nn::weighted_bce_loss(out.sides[m], edges, reduction);
    loss.value += side.value;
    loss.grad_sides[m] = std::move(side.grad);
  }
  return loss;
}

TpnTraining train_tpn(std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg, const TpnConfig& arch) {
  TpnTraining out{Tpn<float>(arch, init_seed(cfg.seed, 1)), {}};
  train_tpn(out.model, data, cfg, out.history);
  return out;
}

void train_tpn(Tpn<float>& model, std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg,
               std::vector<double>& history) {
  cfg.validate();
  check_data(data);
  PatchSampler sampler(data, cfg.patch_size, cfg.seed);
  Tpn<float>::Cache cache;
  for (int step = 0; step < cfg.steps; ++step) {
    const Batch batch = sampler.next(cfg.batch_size);
    model.params().zero_grad();
    const Tensor pred = model.forward(batch.input, &cache);
    const auto loss = nn::mse_loss(pred, batch.texture_gt);
    check_loss(loss.value, "tpn");
    model.backward(cache, loss.grad);
    nn::sgd_momentum_step(model.params(), cfg.learning_rate, cfg.momentum);
    history.push_back(loss.value);
  }
}

SpnTraining train_spn(std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg, const SpnConfig& arch) {
  SpnTraining out{Spn<float>(arch, init_seed(cfg.seed, 2)), {}};
  train_spn(out.model, data, cfg, out.history);
  return out;
}

void train_spn(Spn<float>& model, std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg,
               std::vector<double>& history) {
  cfg.validate();
  check_data(data);
  PatchSampler sampler(data, cfg.patch_size, cfg.seed);
  Spn<float>::Cache cache;
  for (int step = 0; step < cfg.steps; ++step) {
    const Batch batch = sampler.next(cfg.batch_size);
    model.params().zero_grad();
    const auto out = model.forward(batch.input, &cache);
    const EdgeLoss loss = edge_loss(out, batch.edges, cfg.edge_reduction);
    check_loss(loss.value, "spn");
    model.backward(cache, loss.grad_fused, loss.grad_sides);
    nn::sgd_momentum_step(model.params(), cfg.learning_rate, cfg.momentum);
    history.push_back(loss.value);
  }
}

TsafnTraining train_tsafn(std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg,
                          const Tpn<float>* tpn, const Spn<float>* spn, Ablation ablation,
                          const TsafnConfig& arch) {
  TsafnTraining out{Tsafn<float>(arch, init_seed(cfg.seed, 3)), {}};
  train_tsafn(out.model, data, cfg, tpn, spn, ablation, out.history);
  return out;
}

void train_tsafn(Tsafn<float>& model, std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg,
                 const Tpn<float>* tpn, const Spn<float>* spn, Ablation ablation, std::vector<double>& history) {
  cfg.validate();
  check_data(data);
  PatchSampler sampler(data, cfg.patch_size, cfg.seed);
  Tsafn<float>::Cache cache;
  for (int step = 0; step < cfg.steps; ++step) {
    const Batch batch = sampler.next(cfg.batch_size);
    const Guidance g = compute_guidance(batch.input, tpn, spn, ablation);
    model.params().zero_grad();
    const Tensor pred = model.forward(batch.input, g.structure, g.texture, &cache);
    const auto loss = nn::mse_loss(pred, batch.structure);
    check_loss(loss.value, "tsafn");
    model.backward(cache, loss.grad);
    nn::sgd_momentum_step(model.params(), cfg.learning_rate, cfg.momentum);
    history.push_back(loss.value);
  }
}

JointLoss joint_loss_and_grads(const Batch& batch, Tpn<float>& tpn, Spn<float>& spn, Tsafn<float>& tsafn,
                               const nn::LossWeights& weights, nn::Reduction edge_reduction) {
  Tpn<float>::Cache tpn_cache;
  Spn<float>::Cache spn_cache;
  Tsafn<float>::Cache tsafn_cache;
  const Tensor texture = tpn.forward(batch.input, &tpn_cache);
  const SpnOutput<float> edges = spn.forward(batch.input, &spn_cache);
  const Tensor pred = tsafn.forward(batch.input, edges.fused, texture, &tsafn_cache);

  const auto l_d = nn::mse_loss(pred, batch.structure);
  const auto l_t = nn::mse_loss(texture, batch.texture_gt);
  const EdgeLoss l_e = edge_loss(edges, batch.edges, edge_reduction);

  JointLoss loss;
  loss.filter = l_d.value;
  loss.texture = l_t.value;
  loss.edge = l_e.value;
  loss.total = nn::combined_finetune_loss(l_d.value, l_t.value, l_e.value, weights);

  // The filter loss reaches the guidance networks through the guidance inputs.
  const TsafnGrads<float> g = tsafn.backward(tsafn_cache, nn::scaled(l_d.grad, weights.gamma));
  Tensor g_texture = nn::scaled(l_t.grad, weights.lambda);
  nn::add_into(g_texture, g.texture);
  tpn.backward(tpn_cache, g_texture);

  Tensor g_fused = nn::scaled(l_e.grad_fused, weights.lambda);
  nn::add_into(g_fused, g.structure);
  std::array<Tensor, SpnConfig::kStages> g_sides;
  for (int m = 0; m < SpnConfig::kStages; ++m) g_sides[m] = nn::scaled(l_e.grad_sides[m], weights.lambda);
  spn.backward(spn_cache, g_fused, g_sides);
  return loss;
}

std::vector<JointLoss> finetune_joint(std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg,
                                      Tpn<float>& tpn, Spn<float>& spn, Tsafn<float>& tsafn,
                                      const nn::LossWeights& weights) {
  cfg.validate();
  check_data(data);
  if (weights.gamma < 0.0 || weights.lambda < 0.0) throw std::invalid_argument("loss weights must be non-negative");
  PatchSampler sampler(data, cfg.patch_size, cfg.seed);
  std::vector<JointLoss> history;
  for (int step = 0; step < cfg.steps; ++step) {
    const Batch batch = sampler.next(cfg.batch_size);
    tpn.params().zero_grad();
    spn.params().zero_grad();
    tsafn.params().zero_grad();
    const JointLoss loss = joint_loss_and_grads(batch, tpn, spn, tsafn, weights, cfg.edge_reduction);
    check_loss(loss.total, "joint");
    nn::sgd_momentum_step(tpn.params(), cfg.finetune_learning_rate, cfg.momentum);
    nn::sgd_momentum_step(spn.params(), cfg.finetune_learning_rate, cfg.momentum);
    nn::sgd_momentum_step(tsafn.params(), cfg.finetune_learning_rate, cfg.momentum);
    history.push_back(loss);
  }
  return history;
}

double evaluate_filter_loss(std::span<const texgen::GeneratedSample> data, const Tpn<float>* tpn,
                            const Spn<float>* spn, const Tsafn<float>& tsafn, Ablation ablation) {
  check_data(data);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t idx[] = {i};
    const Batch b = make_batch(data, idx);
    const Guidance g = compute_guidance(b.input, tpn, spn, ablation);
    total += nn::mse_loss(tsafn.forward(b.input, g.structure, g.texture), b.structure).value;
  }
  return total / data.size();
}

}  // namespace texsmooth::models
