#pragma once

#include "texsmooth/image.hpp"
#include "texsmooth/models/spn.hpp"
#include "texsmooth/models/tpn.hpp"
#include "texsmooth/models/training.hpp"
#include "texsmooth/models/tsafn.hpp"

namespace texsmooth::models {

struct ModelSet {
  Tpn<float> tpn;
  Spn<float> spn;
  Tsafn<float> tsafn;
};

struct SmoothResult {
  Image output;              // 3 channels, clamped
  Image texture_guidance;    // 1 channel
  Image structure_guidance;  // 1 channel
};

/// Full inference: pads by reflection to a multiple of 8, runs the guidance
/// networks the ablation enables, filters, crops back and clamps.
SmoothResult smooth(const Image& img, const ModelSet& models, Ablation ablation = Ablation::kDouble);

/// S + alpha * (I - S) before clamping, in double precision.
std::vector<float> detail_enhance_raw(const Image& input, const Image& smoothed, double alpha);

/// clamp01(S + alpha * (I - S)); alpha must be >= 1.
Image detail_enhance(const Image& input, const Image& smoothed, double alpha);

}  // namespace texsmooth::models
