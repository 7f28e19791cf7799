#include "wabe/adversarial/discriminator.hpp"
#include "wabe/adversarial/pairs.hpp"
#include "wabe/autodiff/backward.hpp"
#include "wabe/fixtures/fixtures.hpp"
#include "wabe/losses/losses.hpp"
#include "wabe/rasterizer/rasterizer.hpp"
#include "wabe/trainer/trainer.hpp"

#include <benchmark/benchmark.h>

using namespace wabe;

namespace {

BlendMode mode_for(int wabe) { return wabe ? BlendMode::wabe(6.0) : BlendMode::standard(); }

void BM_Render(benchmark::State& state) {
  const Scene scene = random_scene(1, static_cast<int>(state.range(0)), 128, 128);
  const auto world = scene.world_gaussians_at(0);
  const BlendMode mode = mode_for(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto out = render_gaussians(world, scene.cameras[0], mode, {1, true});
    benchmark::DoNotOptimize(out.image.data().data());
  }
  state.SetItemsProcessed(state.iterations() * 128 * 128);
}
BENCHMARK(BM_Render)->ArgsProduct({{50, 500}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_Backward(benchmark::State& state) {
  const Scene scene = random_scene(2, static_cast<int>(state.range(0)), 128, 128);
  const auto world = scene.world_gaussians_at(0);
  const BlendMode mode = mode_for(static_cast<int>(state.range(1)));
  const auto out = render_gaussians(world, scene.cameras[0], mode, {1, true});
  const ImageBuffer upstream(128, 128, 1e-3);
  for (auto _ : state) {
    auto grads = backward(out, upstream, mode, {WeightGradient::Detached, AccumulateOrder::Deterministic, 1});
    benchmark::DoNotOptimize(grads.entries.data());
  }
}
BENCHMARK(BM_Backward)->ArgsProduct({{50, 500}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_Dssim(benchmark::State& state) {
  const ImageBuffer a(64, 64, 0.3), b(64, 64, 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(dssim_loss(a, b).value);
}
BENCHMARK(BM_Dssim)->Unit(benchmark::kMicrosecond);

void BM_DiscriminatorStep(benchmark::State& state) {
  const Discriminator disc(3);
  const PairSet pairs = make_pairs(ImageBuffer(32, 32, 0.4), ImageBuffer(32, 32, 0.5), ImageBuffer(32, 32, 0.6));
  for (auto _ : state) {
    benchmark::DoNotOptimize(d_loss(disc, pairs.real, pairs.fake).value);
    benchmark::DoNotOptimize(g_loss(disc, pairs.fake).value);
  }
}
BENCHMARK(BM_DiscriminatorStep)->Unit(benchmark::kMicrosecond);

void BM_TrainStep(benchmark::State& state) {
  const FlapFixture fx = flap_fixture();
  TrainConfig config = flap_edit_config().config;
  config.threads = 1;
  config.adversarial_enabled = state.range(0) != 0;
  TrainState train = TrainState::initialize(fx.scene, config);
  for (auto _ : state) benchmark::DoNotOptimize(train_step(train, config).total);
}
BENCHMARK(BM_TrainStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
