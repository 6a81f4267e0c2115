// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <benchmark/benchmark.h>

#include "wmlab/audio.hpp"
#include "wmlab/stft.hpp"

namespace {

wmlab::AudioClip bench_clip() {
  return wmlab::synth_clip(1, 0, 3.0, 16000);
}

void BM_Stft256(benchmark::State& state) {
  const wmlab::AudioClip clip = bench_clip();
  for (auto _ : state) {
    auto spec = wmlab::stft(clip, 256, 64, 256);
    benchmark::DoNotOptimize(spec.coeffs.data());
  }
}
BENCHMARK(BM_Stft256);

void BM_StftIstftRoundTrip(benchmark::State& state) {
  const wmlab::AudioClip clip = bench_clip();
  for (auto _ : state) {
    auto back = wmlab::istft(wmlab::stft(clip, 256, 64, 256));
    benchmark::DoNotOptimize(back.samples.data());
  }
}
BENCHMARK(BM_StftIstftRoundTrip);

void BM_SynthClip(benchmark::State& state) {
  uint64_t i = 0;
  for (auto _ : state) {
    auto clip = wmlab::synth_clip(42, i++, 3.0, 16000);
    benchmark::DoNotOptimize(clip.samples.data());
  }
}
BENCHMARK(BM_SynthClip);

}  // namespace
