#include <benchmark/benchmark.h>

#include <vector>

#include "cwvo/consistency.hpp"
#include "cwvo/pipeline.hpp"
#include "cwvo/synth.hpp"
#include "cwvo/tracker.hpp"

using namespace cwvo;

namespace {

SceneSpec bench_scene(int frames) {
  SceneSpec s;
  s.frame_count = frames;
  s.seed = 1;
  s.planes.push_back({});
  s.planes.push_back({});
  s.planes[1].depth = 1.8;
  s.planes[1].x_max = 0.0;
  s.trajectory.kind = TrajectoryKind::kLinear;
  Vec6 v;
  v << 0.01, 0.004, 0.006, 0.002, 0.003, 0.001;
  s.trajectory.velocity = Twist::from_vector(v);
  return s;
}

const SyntheticSequence& pair() {
  static const SyntheticSequence seq = render_sequence(bench_scene(2));
  return seq;
}

Keyframe host_keyframe(int budget) {
  Keyframe kf;
  kf.frame = pair().frames[0];
  const int w = kf.frame.intensity.width();
  const int h = kf.frame.intensity.height();
  kf.prior = unit_prior(w, h, 0);
  SelectorConfig sc;
  sc.budget = budget;
  kf.support = select_support(kf.frame.intensity, kf.frame.depth, kf.prior.photo, sc);
  kf.pyramid = ImagePyramid(kf.frame.intensity, 4);
  return kf;
}

void BM_LinearizeAccumulate(benchmark::State& state) {
  const Keyframe kf = host_keyframe(static_cast<int>(state.range(0)));
  const ImageD& target = pair().frames[1].intensity;
  const WeightMaps w = weights_from_prior(kf.prior);
  std::vector<PixelLinearization> lins(kf.support.size());
  for (auto _ : state) {
    for (std::size_t i = 0; i < kf.support.size(); ++i) {
      lins[i] = linearize_pixel(kf.frame.intensity, target, kf.frame.intrinsics, Se3Pose{},
                                kf.support[i], 0);
    }
    benchmark::DoNotOptimize(accumulate_weighted(lins, &w, true, 9.0 / 255.0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(kf.support.size()));
}
BENCHMARK(BM_LinearizeAccumulate)->Arg(250)->Arg(800);

void BM_TrackFrame(benchmark::State& state) {
  const Keyframe kf = host_keyframe(800);
  const ImagePyramid target(pair().frames[1].intensity, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(track_frame(kf, target, Se3Pose{}, nullptr, TrackingConfig{}));
  }
}
BENCHMARK(BM_TrackFrame)->Unit(benchmark::kMillisecond);

void BM_SelectSupport(benchmark::State& state) {
  const RgbdFrame& f = pair().frames[0];
  const QualityMap q{ImageD(f.intensity.width(), f.intensity.height(), 1.0), Branch::kPhoto};
  SelectorConfig sc;
  sc.budget = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(select_support(f.intensity, f.depth, q, sc));
}
BENCHMARK(BM_SelectSupport)->Arg(250)->Arg(2000);

void BM_ErrorMaps(benchmark::State& state) {
  const SyntheticSequence& seq = pair();
  const Se3Pose rel = seq.truth.poses[1].inverse() * seq.truth.poses[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(photometric_error_map(seq.frames[0].intensity, seq.frames[1].intensity,
                                                   seq.truth.flow_into[1]));
    benchmark::DoNotOptimize(
        geometric_error_map(seq.frames[0].depth, seq.frames[1].depth, rel, seq.intrinsics));
  }
}
BENCHMARK(BM_ErrorMaps);

void BM_RenderFrame(benchmark::State& state) {
  const SceneSpec spec = bench_scene(1);
  for (auto _ : state) benchmark::DoNotOptimize(render_sequence(spec));
}
BENCHMARK(BM_RenderFrame)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
