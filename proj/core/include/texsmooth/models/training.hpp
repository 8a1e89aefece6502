#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "texsmooth/models/spn.hpp"
#include "texsmooth/models/tpn.hpp"
#include "texsmooth/models/tsafn.hpp"
#include "texsmooth/nn/loss.hpp"
#include "texsmooth/rng.hpp"
#include "texsmooth/texgen.hpp"

namespace texsmooth::models {

struct TrainConfig {
  double learning_rate = 1e-4;
  double momentum = 0.9;
  double finetune_learning_rate = 1e-5;
  int patch_size = 64;
  int batch_size = 16;
  int steps = 1000;
  std::uint64_t seed = 1;
  // Edge losses are averaged per pixel so the 1e-4 step size stays stable.
  nn::Reduction edge_reduction = nn::Reduction::kMeanPerPixel;

  void validate() const;
};

enum class Ablation { kNone, kStructureOnly, kTextureOnly, kDouble };
std::string_view to_string(Ablation a);
Ablation ablation_from_string(std::string_view name);
inline bool uses_texture(Ablation a) { return a == Ablation::kTextureOnly || a == Ablation::kDouble; }
inline bool uses_structure(Ablation a) { return a == Ablation::kStructureOnly || a == Ablation::kDouble; }

/// Value fed in place of a disabled guidance map (sigmoid of zero).
inline constexpr float kNeutralGuidance = 0.5f;

struct Batch {
  Tensor input;       // I
  Tensor structure;   // S
  Tensor texture_gt;  // T*
  Tensor mask;        // M
  Tensor edges;       // E*
};

/// Whole samples stacked into a batch; they must share one size.
Batch make_batch(std::span<const texgen::GeneratedSample> data, std::span<const std::size_t> indices);

/// Draws random square patches from random samples.
class PatchSampler {
 public:
  PatchSampler(std::span<const texgen::GeneratedSample> data, int patch_size, std::uint64_t seed);
  Batch next(int batch_size);

 private:
  std::span<const texgen::GeneratedSample> data_;
  int patch_;
  Rng rng_;
};

struct Guidance {
  Tensor structure;
  Tensor texture;
};

/// Runs the enabled guidance networks; disabled maps are filled with 0.5.
Guidance compute_guidance(const Tensor& rgb, const Tpn<float>* tpn, const Spn<float>* spn, Ablation ablation);

/// Side and fusion edge losses summed, with their gradients.
struct EdgeLoss {
  double value = 0.0;
  Tensor grad_fused;
  std::array<Tensor, SpnConfig::kStages> grad_sides;
};
EdgeLoss edge_loss(const SpnOutput<float>& out, const Tensor& edges, nn::Reduction reduction);

struct TpnTraining {
  Tpn<float> model;
  std::vector<double> history;
};
struct SpnTraining {
  Spn<float> model;
  std::vector<double> history;
};
struct TsafnTraining {
  Tsafn<float> model;
  std::vector<double> history;
};

/// Seeds used for fresh models derived from TrainConfig::seed.
std::uint64_t init_seed(std::uint64_t seed, int role);

/// SGD-momentum on the texture MSE against T*.
TpnTraining train_tpn(std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg,
                      const TpnConfig& arch = {});
void train_tpn(Tpn<float>& model, std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg,
               std::vector<double>& history);

/// Side plus fused class-balanced cross entropy against E*.
SpnTraining train_spn(std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg,
                      const SpnConfig& arch = {});
void train_spn(Spn<float>& model, std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg,
               std::vector<double>& history);

/// Filtering MSE against S with guidance from frozen networks. tpn/spn may be
/// null when the ablation does not use them.
TsafnTraining train_tsafn(std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg,
                          const Tpn<float>* tpn, const Spn<float>* spn, Ablation ablation = Ablation::kDouble,
                          const TsafnConfig& arch = {});
void train_tsafn(Tsafn<float>& model, std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg,
                 const Tpn<float>* tpn, const Spn<float>* spn, Ablation ablation, std::vector<double>& history);

struct JointLoss {
  double total = 0.0;
  double filter = 0.0;   // l_D
  double texture = 0.0;  // l_T
  double edge = 0.0;     // l_E
};

/// One joint forward/backward pass over a batch; parameter gradients are
/// accumulated into all three models (they are not zeroed here).
JointLoss joint_loss_and_grads(const Batch& batch, Tpn<float>& tpn, Spn<float>& spn, Tsafn<float>& tsafn,
                               const nn::LossWeights& weights, nn::Reduction edge_reduction);

/// End-to-end fine-tuning with gamma*l_D + lambda*(l_T + l_E) at
/// cfg.finetune_learning_rate.
std::vector<JointLoss> finetune_joint(std::span<const texgen::GeneratedSample> data, const TrainConfig& cfg,
                                      Tpn<float>& tpn, Spn<float>& spn, Tsafn<float>& tsafn,
                                      const nn::LossWeights& weights = {});

/// Mean filtering loss l_D over whole samples, evaluated one at a time.
double evaluate_filter_loss(std::span<const texgen::GeneratedSample> data, const Tpn<float>* tpn,
                            const Spn<float>* spn, const Tsafn<float>& tsafn, Ablation ablation);

}  // namespace texsmooth::models
