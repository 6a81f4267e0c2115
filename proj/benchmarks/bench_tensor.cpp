// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <benchmark/benchmark.h>

#include "wmlab/rng.hpp"
#include "wmlab/tensor.hpp"

namespace {

wmlab::Tensor random_const(uint64_t seed, size_t r, size_t c) {
  wmlab::Rng rng(seed);
  std::vector<double> v(r * c);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return wmlab::Tensor::constant(std::move(v), r, c);
}

void BM_Matmul(benchmark::State& state) {
  const size_t n = size_t(state.range(0));
  auto a = random_const(1, n, n);
  auto b = random_const(2, n, n);
  for (auto _ : state) {
    auto c = wmlab::matmul(a, b);
    benchmark::DoNotOptimize(c.values().data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128)->Arg(256);

void BM_MlpForwardBackward(benchmark::State& state) {
  // roughly one embedder layer stack at training batch size
  auto x = random_const(3, 64, 144);
  wmlab::Rng rng(4);
  auto w1 = wmlab::uniform_param(rng, 144, 256, -0.1, 0.1);
  auto w2 = wmlab::uniform_param(rng, 256, 256, -0.1, 0.1);
  auto w3 = wmlab::uniform_param(rng, 256, 128, -0.1, 0.1);
  for (auto _ : state) {
    auto h1 = wmlab::tanh(wmlab::matmul(x, w1));
    auto h2 = wmlab::tanh(wmlab::matmul(h1, w2));
    auto y = wmlab::mean(wmlab::matmul(h2, w3));
    wmlab::backward(y);
    benchmark::DoNotOptimize(w1.grad().data());
    w1.zero_grad();
    w2.zero_grad();
    w3.zero_grad();
  }
}
BENCHMARK(BM_MlpForwardBackward);

void BM_DftMagnitude(benchmark::State& state) {
  auto frames = random_const(5, 128, 128);
  for (auto _ : state) {
    auto m = wmlab::dft_magnitude(frames, 128);
    benchmark::DoNotOptimize(m.values().data());
  }
}
BENCHMARK(BM_DftMagnitude);

}  // namespace
