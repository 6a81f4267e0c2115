// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <benchmark/benchmark.h>

#include "wmlab/schemes.hpp"

namespace {

void bench_family(benchmark::State& state, wmlab::SchemeFamily family) {
  const auto clip = wmlab::synth_clip(1, 0, 3.0, 16000);
  auto scheme = family == wmlab::SchemeFamily::neural
                    ? wmlab::make_neural_scheme(
                          std::make_shared<wmlab::SurrogateModel>(
                              wmlab::init_surrogate(7)))
                    : wmlab::make_scheme(family, 1234);
  wmlab::Rng rng(9);
  const auto msg = wmlab::random_message(rng, scheme.message_len);
  for (auto _ : state) {
    auto marked = wmlab::embed(scheme, clip, msg);
    auto result = wmlab::detect(scheme, marked);
    benchmark::DoNotOptimize(result.soft_scores.data());
  }
}

void BM_EmbedDetectLsb(benchmark::State& state) {
  bench_family(state, wmlab::SchemeFamily::lsb);
}
void BM_EmbedDetectSpreadSpectrum(benchmark::State& state) {
  bench_family(state, wmlab::SchemeFamily::spread_spectrum);
}
void BM_EmbedDetectQim(benchmark::State& state) {
  bench_family(state, wmlab::SchemeFamily::qim_freq);
}
void BM_EmbedDetectNeural(benchmark::State& state) {
  bench_family(state, wmlab::SchemeFamily::neural);
}

BENCHMARK(BM_EmbedDetectLsb);
BENCHMARK(BM_EmbedDetectSpreadSpectrum);
BENCHMARK(BM_EmbedDetectQim);
BENCHMARK(BM_EmbedDetectNeural);

}  // namespace
