#include "texsmooth/models/pipeline.hpp"

#include <stdexcept>

namespace texsmooth::models {
namespace {

int round_up8(int v) { return (v + 7) / 8 * 8; }

}  // namespace

SmoothResult smooth(const Image& img, const ModelSet& models, Ablation ablation) {
  const Image rgb = img.channels() == 3 ? img : to_rgb(img);
  const int h = rgb.height();
  const int w = rgb.width();
  const Image padded = reflect_pad(rgb, round_up8(h), round_up8(w));

  const Tensor x = image_to_tensor(padded);
  const Guidance g = compute_guidance(x, &models.tpn, &models.spn, ablation);
  const Tensor raw = models.tsafn.forward(x, g.structure, g.texture);

  SmoothResult out;
  out.output = crop(tensor_to_image_clamped(raw, 0), 0, 0, h, w);
  out.texture_guidance = crop(tensor_to_image_clamped(g.texture, 0), 0, 0, h, w);
  out.structure_guidance = crop(tensor_to_image_clamped(g.structure, 0), 0, 0, h, w);
  return out;
}

std::vector<float> detail_enhance_raw(const Image& input, const Image& smoothed, double alpha) {
  if (!input.same_shape(smoothed)) throw std::invalid_argument("detail_enhance: image shapes differ");
  if (!(alpha >= 1.0)) throw std::invalid_argument("detail_enhance: alpha must be >= 1");
  const auto& in = input.data();
  const auto& s = smoothed.data();
  std::vector<float> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double sv = s[i];
    out[i] = static_cast<float>(sv + alpha * (static_cast<double>(in[i]) - sv));
  }
  return out;
}

Image detail_enhance(const Image& input, const Image& smoothed, double alpha) {
  return clamp01(input.height(), input.width(), input.channels(), detail_enhance_raw(input, smoothed, alpha));
}

}  // namespace texsmooth::models
