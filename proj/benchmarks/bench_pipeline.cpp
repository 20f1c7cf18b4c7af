#include <benchmark/benchmark.h>

#include <random>

#include "palmroi/contour.hpp"
#include "palmroi/features.hpp"
#include "palmroi/image.hpp"
#include "palmroi/pipeline.hpp"
#include "palmroi/polyline.hpp"
#include "palmroi/synth.hpp"

using namespace palmroi;

namespace {

const synth::SynthHand& sample_hand() {
  static const synth::SynthHand hand = [] {
    std::mt19937_64 rng(11);
    synth::HandParams p = synth::random_gesture(synth::Gesture::Open, rng);
    synth::randomize_pose(p, rng, 640, 480);
    return synth::generate_hand(p, 640, 480);
  }();
  return hand;
}

void BM_Binarize(benchmark::State& state) {
  const GrayImage& img = sample_hand().image;
  for (auto _ : state) benchmark::DoNotOptimize(binarize(img));
}
BENCHMARK(BM_Binarize)->Unit(benchmark::kMillisecond);

void BM_TraceBoundary(benchmark::State& state) {
  const BinaryImage mask = binarize(sample_hand().image);
  for (auto _ : state) benchmark::DoNotOptimize(trace_boundary(mask));
}
BENCHMARK(BM_TraceBoundary)->Unit(benchmark::kMicrosecond);

void BM_FitAndConnect(benchmark::State& state) {
  const ContourChain chain = trace_boundary(binarize(sample_hand().image));
  for (auto _ : state) {
    auto segs = fit_polyline(chain, 2.0);
    benchmark::DoNotOptimize(connect_broken(std::move(segs), ConnectParams{}, chain.size()));
  }
}
BENCHMARK(BM_FitAndConnect)->Unit(benchmark::kMicrosecond);

void BM_LineFeatures(benchmark::State& state) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> v(0, 255);
  const int side = static_cast<int>(state.range(0));
  GrayImage img(side, side);
  for (auto& p : img.data()) p = static_cast<std::uint8_t>(v(rng));
  const ThresholdSpec spec{};
  for (auto _ : state) {
    const LineResponse r = line_response(smooth(img));
    benchmark::DoNotOptimize(thin(threshold_map(r, spec)));
  }
}
BENCHMARK(BM_LineFeatures)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_FullPipeline(benchmark::State& state) {
  const GrayImage& img = sample_hand().image;
  const PipelineConfig cfg{};
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(img, cfg));
}
BENCHMARK(BM_FullPipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
