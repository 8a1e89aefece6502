// Microbenchmarks for the hot paths: convolution, network passes, data
// generation and metrics.
#include <benchmark/benchmark.h>

#include "texsmooth/metrics.hpp"
#include "texsmooth/models/spn.hpp"
#include "texsmooth/models/tpn.hpp"
#include "texsmooth/models/tsafn.hpp"
#include "texsmooth/nn/ops.hpp"
#include "texsmooth/texgen.hpp"
#include "texsmooth/toy.hpp"

namespace {

using namespace texsmooth;

Tensor random_tensor(int n, int c, int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  Tensor t(n, c, h, w);
  for (float& v : t.values()) v = static_cast<float>(uniform01(rng));
  return t;
}

Image random_image(int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  Image img(h, w, 3);
  for (float& v : img.data()) v = static_cast<float>(uniform01(rng));
  return img;
}

void BM_Conv2dForward(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int ch = static_cast<int>(state.range(1));
  const nn::ConvSpec spec{k, ch, ch, 1};
  const Tensor x = random_tensor(4, ch, 64, 64, 1);
  const Tensor w = random_tensor(ch, ch, k, k, 2);
  const Tensor b(1, ch, 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv2d_forward(x, spec, w, b));
  state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_Conv2dForward)->Args({3, 8})->Args({3, 32})->Args({7, 16})->Unit(benchmark::kMillisecond);

void BM_Conv2dBackward(benchmark::State& state) {
  const int ch = static_cast<int>(state.range(0));
  const nn::ConvSpec spec{3, ch, ch, 1};
  const Tensor x = random_tensor(4, ch, 64, 64, 3);
  const Tensor w = random_tensor(ch, ch, 3, 3, 4);
  const Tensor g = random_tensor(4, ch, 64, 64, 5);
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv2d_backward(x, spec, w, g));
}
BENCHMARK(BM_Conv2dBackward)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_TpnForwardBackward(benchmark::State& state) {
  models::Tpn<float> net;
  const Tensor x = random_tensor(16, 3, 64, 64, 6);
  const Tensor g = random_tensor(16, 1, 64, 64, 7);
  models::Tpn<float>::Cache cache;
  for (auto _ : state) {
    net.forward(x, &cache);
    benchmark::DoNotOptimize(net.backward(cache, g));
  }
}
BENCHMARK(BM_TpnForwardBackward)->Unit(benchmark::kMillisecond);

void BM_SpnForward(benchmark::State& state) {
  const models::Spn<float> net;
  const Tensor x = random_tensor(16, 3, 64, 64, 8);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_SpnForward)->Unit(benchmark::kMillisecond);

void BM_TsafnForward(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const models::Tsafn<float> net;
  const Tensor x = random_tensor(1, 3, side, side, 9);
  const Tensor g(1, 1, side, side, 0.5f);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x, g, g));
}
BENCHMARK(BM_TsafnForward)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_GenerateSample(benchmark::State& state) {
  Rng rng(10);
  const auto pool = toy::make_pattern_pool(4, rng);
  const Image s = toy::make_cartoon(128, 128, rng);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(texgen::generate_sample(s, pool, ++seed));
}
BENCHMARK(BM_GenerateSample)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const Image a = random_image(side, side, 11);
  const Image b = random_image(side, side, 12);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
