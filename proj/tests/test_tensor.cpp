// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <functional>

#include "wmlab/audio.hpp"
#include "wmlab/checkpoint.hpp"
#include "wmlab/optim.hpp"
#include "wmlab/rng.hpp"
#include "wmlab/stft.hpp"
#include "wmlab/tensor.hpp"

using namespace wmlab;

namespace {

Tensor rand_param(Rng& rng, size_t r, size_t c, double lo = 0.2,
                  double hi = 1.5) {
  // biased away from zero so kinked ops (relu/abs) stay differentiable
  std::vector<double> v(r * c);
  for (auto& x : v) x = rng.uniform(lo, hi) * (rng.bit() ? 1.0 : -1.0);
  return Tensor::param(std::move(v), r, c);
}

// central-difference oracle, h = 1e-4; the graph is rebuilt per evaluation
double max_rel_grad_error(
    const std::function<Tensor(const std::vector<Tensor>&)>& build,
    std::vector<Tensor>& params) {
  Tensor loss = build(params);
  backward(loss);
  std::vector<std::vector<double>> analytic;
  for (auto& p : params) {
    // a parameter the builder never used keeps an all-zero gradient
    analytic.push_back(p.grad().empty() ? std::vector<double>(p.size(), 0.0)
                                        : p.grad());
    p.zero_grad();
  }
  const double h = 1e-4;
  double worst = 0.0;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    auto& vals = params[pi].values_mut();
    for (size_t i = 0; i < vals.size(); ++i) {
      const double keep = vals[i];
      vals[i] = keep + h;
      const double up = build(params).item();
      vals[i] = keep - h;
      const double dn = build(params).item();
      vals[i] = keep;
      const double numeric = (up - dn) / (2.0 * h);
      const double a = analytic[pi][i];
      const double rel =
          std::fabs(a - numeric) / std::max(1e-3, std::fabs(numeric));
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("forward op basics") {
  CHECK(sigmoid(Tensor::scalar(0.0)).item() == doctest::Approx(0.5));
  CHECK(mean(Tensor::constant({1, 2, 3}, 1, 3)).item() == doctest::Approx(2));

  // matmul(I, A) = A
  std::vector<double> eye(9, 0.0);
  eye[0] = eye[4] = eye[8] = 1.0;
  Tensor I = Tensor::constant(eye, 3, 3);
  Tensor A = Tensor::constant({1, 2, 3, 4, 5, 6, 7, 8, 9}, 3, 3);
  CHECK(matmul(I, A).values() == A.values());

  CHECK(relu(Tensor::scalar(-2.0)).item() == 0.0);
  CHECK(relu(Tensor::scalar(2.0)).item() == 2.0);
  CHECK(abs(Tensor::scalar(-3.5)).item() == doctest::Approx(3.5));
  CHECK(tanh(Tensor::scalar(0.0)).item() == 0.0);
  CHECK(sqrt(Tensor::scalar(4.0)).item() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(log(Tensor::scalar(1.0)).item() == doctest::Approx(0.0).epsilon(1e-6));

  CHECK_THROWS(add(Tensor::constant({1, 2}, 1, 2),
                   Tensor::constant({1, 2, 3}, 1, 3)));
  CHECK_THROWS(matmul(Tensor::constant({1, 2}, 1, 2),
                      Tensor::constant({1, 2}, 1, 2)));
}

TEST_CASE("broadcasting covers scalars and row vectors") {
  Tensor m = Tensor::constant({1, 2, 3, 4}, 2, 2);
  Tensor row = Tensor::constant({10, 20}, 1, 2);
  CHECK(add(m, row).values() == std::vector<double>{11, 22, 13, 24});
  CHECK(sub(Tensor::scalar(1.0), m).values() ==
        std::vector<double>{0, -1, -2, -3});
  CHECK(mul(m, Tensor::scalar(2.0)).values() ==
        std::vector<double>{2, 4, 6, 8});
}

TEST_CASE("backward of sum(x*x) is 2x") {
  Tensor x = Tensor::param({1.0, -2.0, 3.0}, 1, 3);
  backward(sum(mul(x, x)));
  CHECK(x.grad()[0] == doctest::Approx(2.0));
  CHECK(x.grad()[1] == doctest::Approx(-4.0));
  CHECK(x.grad()[2] == doctest::Approx(6.0));
}

TEST_CASE("backward of sigmoid at zero is 0.25") {
  Tensor w = Tensor::param({0.0}, 1, 1);
  backward(sigmoid(w));
  CHECK(w.grad()[0] == doctest::Approx(0.25));
}

TEST_CASE("backward requires a scalar loss") {
  Tensor x = Tensor::param({1.0, 2.0}, 1, 2);
  CHECK_THROWS(backward(mul(x, x)));
}

TEST_CASE("disconnected parameters keep zero gradients") {
  Tensor x = Tensor::param({1.0}, 1, 1);
  Tensor orphan = Tensor::param({5.0}, 1, 1);
  orphan.zero_grad();
  backward(mul(x, x));
  CHECK(orphan.grad()[0] == 0.0);
}

TEST_CASE("random two-layer network passes the finite-difference oracle") {
  Rng rng(101);
  for (int inst = 0; inst < 3; ++inst) {
    std::vector<Tensor> params = {rand_param(rng, 4, 6), rand_param(rng, 1, 6),
                                  rand_param(rng, 6, 3), rand_param(rng, 1, 3)};
    Tensor x = Tensor::constant(
        [&] {
          std::vector<double> v(2 * 4);
          for (auto& e : v) e = rng.uniform(-1, 1);
          return v;
        }(),
        2, 4);
    auto build = [&x](const std::vector<Tensor>& p) {
      Tensor h = tanh(add(matmul(x, p[0]), p[1]));
      Tensor y = sigmoid(add(matmul(h, p[2]), p[3]));
      return mean(mul(y, y));
    };
    CHECK(max_rel_grad_error(build, params) <= 1e-4);
  }
}

TEST_CASE("every differentiable op passes randomized gradient checks") {
  Rng rng(202);
  using Builder = std::function<Tensor(const std::vector<Tensor>&)>;
  struct OpCheck {
    const char* name;
    Builder build;
  };
  Tensor c23 = Tensor::constant({0.7, -0.4, 1.1, 0.9, -1.3, 0.5}, 2, 3);
  const std::vector<OpCheck> checks = {
      {"add", [&](const std::vector<Tensor>& p) {
         return mean(mul(add(p[0], p[1]), c23)); }},
      {"sub", [&](const std::vector<Tensor>& p) {
         return mean(mul(sub(p[0], p[1]), c23)); }},
      {"mul", [&](const std::vector<Tensor>& p) {
         return mean(mul(mul(p[0], p[1]), c23)); }},
      {"matmul", [&](const std::vector<Tensor>& p) {
         return mean(matmul(p[0], reshape(p[1], 3, 2))); }},
      {"sum", [&](const std::vector<Tensor>& p) {
         return sum(mul(p[0], p[1])); }},
      {"mean", [&](const std::vector<Tensor>& p) {
         return mean(add(p[0], p[1])); }},
      {"relu", [&](const std::vector<Tensor>& p) {
         return mean(relu(mul(p[0], p[1]))); }},
      {"tanh", [&](const std::vector<Tensor>& p) {
         return mean(tanh(add(p[0], p[1]))); }},
      {"sigmoid", [&](const std::vector<Tensor>& p) {
         return mean(sigmoid(sub(p[0], p[1]))); }},
      {"sqrt", [&](const std::vector<Tensor>& p) {
         return mean(sqrt(add(mul(p[0], p[0]), mul(p[1], p[1])))); }},
      {"log", [&](const std::vector<Tensor>& p) {
         return mean(log(add(mul(p[0], p[0]), Tensor::scalar(0.5)))); }},
      {"abs", [&](const std::vector<Tensor>& p) {
         return mean(abs(mul(p[0], p[1]))); }},
      {"clamp", [&](const std::vector<Tensor>& p) {
         return mean(clamp(mul(p[0], Tensor::scalar(0.4)), -0.9, 0.9)); }},
      {"concat", [&](const std::vector<Tensor>& p) {
         return mean(mul(concat(p[0], p[1], 1),
                          concat(c23, c23, 1))); }},
      {"slice", [&](const std::vector<Tensor>& p) {
         return mean(slice(mul(p[0], p[1]), 0, 2, 1, 3)); }},
      {"reshape", [&](const std::vector<Tensor>& p) {
         return mean(mul(reshape(p[0], 3, 2), reshape(p[1], 3, 2))); }},
      {"frame_rows", [&](const std::vector<Tensor>& p) {
         return mean(frame_rows(reshape(mul(p[0], p[1]), 1, 6), 4, 1)); }},
      {"mean_pool_rows", [&](const std::vector<Tensor>& p) {
         return mean(mul(mean_pool_rows(p[0], 2),
                          mean_pool_rows(p[1], 2))); }},
  };
  for (const auto& check : checks) {
    CAPTURE(check.name);
    for (int inst = 0; inst < 10; ++inst) {
      std::vector<Tensor> params = {rand_param(rng, 2, 3),
                                    rand_param(rng, 2, 3)};
      CHECK(max_rel_grad_error(check.build, params) <= 1e-4);
    }
  }
}

TEST_CASE("dft_magnitude of a constant frame puts everything in DC") {
  const size_t F = 64;
  const double c = 0.37;
  Tensor frames = Tensor::constant(std::vector<double>(F, c), 1, F);
  Tensor mags = dft_magnitude(frames, F);
  REQUIRE(mags.cols() == F / 2 + 1);
  CHECK(mags.values()[0] == doctest::Approx(c * double(F)).epsilon(1e-9));
  for (size_t k = 1; k < mags.cols(); ++k)
    CHECK(mags.values()[k] <= 1e-3);  // only the kEpsNum floor remains
}

TEST_CASE("dft_magnitude matches rectangular-window stft magnitudes") {
  const AudioClip clip = synth_clip(5, 0, 0.5, 16000);
  const size_t w = 128, hop = 128;
  const Spectrogram spec = stft(clip, w, hop, w, Window::rect);
  const size_t pad = w / 2;
  // interior frames coincide with plain slices of the signal
  std::vector<size_t> interior;
  for (size_t f = 0; f < spec.frames; ++f) {
    const long start = long(f * hop) - long(pad);
    if (start >= 0 && size_t(start) + w <= clip.samples.size())
      interior.push_back(f);
  }
  REQUIRE(interior.size() >= 4);
  std::vector<double> v(interior.size() * w);
  for (size_t r = 0; r < interior.size(); ++r) {
    const size_t start = interior[r] * hop - pad;
    for (size_t t = 0; t < w; ++t) v[r * w + t] = clip.samples[start + t];
  }
  Tensor mags = dft_magnitude(Tensor::constant(std::move(v),
                                               interior.size(), w), w);
  for (size_t r = 0; r < interior.size(); ++r)
    for (size_t k = 0; k <= w / 2; ++k) {
      // same magnitude definition as dft_magnitude: sqrt(re^2+im^2+eps)
      const double want =
          std::sqrt(std::norm(spec.at(interior[r], k)) + kEpsNum);
      CHECK(mags.values()[r * (w / 2 + 1) + k] ==
            doctest::Approx(want).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("gradients flow through dft_magnitude") {
  Rng rng(303);
  for (int inst = 0; inst < 3; ++inst) {
    std::vector<Tensor> params = {rand_param(rng, 2, 16)};
    auto build = [](const std::vector<Tensor>& p) {
      return mean(dft_magnitude(p[0], 16));
    };
    CHECK(max_rel_grad_error(build, params) <= 1e-4);
  }
}

TEST_CASE("adam with zero gradients leaves parameters unchanged") {
  std::vector<Tensor> params = {Tensor::param({1.0, -2.0}, 1, 2)};
  params[0].zero_grad();
  OptimizerState opt;
  opt.reset(params);
  adam_step(params, opt);
  CHECK(params[0].values() == std::vector<double>{1.0, -2.0});
  CHECK(opt.step_count == 1);
}

TEST_CASE("adam update magnitude approaches the learning rate") {
  std::vector<Tensor> params = {Tensor::param({0.0}, 1, 1)};
  OptimizerState opt;
  opt.learning_rate = 1e-3;
  opt.reset(params);
  double prev = 0.0;
  double step = 0.0;
  for (int i = 0; i < 300; ++i) {
    params[0].grad_mut()[0] = 0.5;  // constant gradient
    adam_step(params, opt);
    step = prev - params[0].values()[0];
    prev = params[0].values()[0];
  }
  CHECK(step == doctest::Approx(1e-3).epsilon(1e-3));
}

TEST_CASE("adam descends a quadratic bowl monotonically after warmup") {
  Rng rng(404);
  std::vector<Tensor> params = {rand_param(rng, 1, 8)};
  const Tensor target = Tensor::constant({.3, -.4, .2, .9, -.7, .1, .5, -.2},
                                         1, 8);
  OptimizerState opt;
  opt.learning_rate = 0.05;
  opt.reset(params);
  std::vector<double> losses;
  for (int i = 0; i < 100; ++i) {
    Tensor d = sub(params[0], target);
    Tensor loss = sum(mul(d, d));
    losses.push_back(loss.item());
    backward(loss);
    adam_step(params, opt);
  }
  for (size_t i = 11; i < losses.size(); ++i)
    CHECK(losses[i] <= losses[i - 1] + 1e-9);
  CHECK(losses.back() < 0.01 * losses[10]);
}

TEST_CASE("adam determinism: identical runs produce identical parameters") {
  auto run = [] {
    std::vector<Tensor> params = {Tensor::param({0.2, -0.3, 0.4}, 1, 3)};
    OptimizerState opt;
    opt.reset(params);
    for (int i = 0; i < 50; ++i) {
      Tensor loss = sum(mul(params[0], params[0]));
      backward(loss);
      adam_step(params, opt);
    }
    return params[0].values();
  };
  CHECK(run() == run());
}

TEST_CASE("adam requires gradients") {
  std::vector<Tensor> params = {Tensor::param({1.0}, 1, 1)};
  OptimizerState opt;
  opt.reset(params);
  CHECK_THROWS(adam_step(params, opt));  // grads never populated
}

TEST_CASE("checkpoint round trip preserves f64 exactly and f32 to 2^-24") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "wmlab_ckpt.bin").string();
  Rng rng(505);
  std::vector<double> v(20);
  for (auto& x : v) x = rng.uniform(-2, 2);
  std::vector<NamedTensor> tensors = {
      {"a", Tensor::constant(v, 4, 5)},
      {"b", Tensor::constant({1.5, -2.5}, 1, 2)}};

  save_checkpoint(path, tensors, CheckpointDtype::f64);
  auto back = load_checkpoint(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].name == "a");
  CHECK(back[0].tensor.values() == v);  // bit-exact
  CHECK(back[1].tensor.values() == std::vector<double>{1.5, -2.5});

  save_checkpoint(path, tensors, CheckpointDtype::f32);
  back = load_checkpoint(path);
  for (size_t i = 0; i < v.size(); ++i)
    CHECK(back[0].tensor.values()[i] ==
          doctest::Approx(v[i]).epsilon(1e-6));

  CHECK(is_checkpoint_file(path));
  CHECK_FALSE(is_checkpoint_file("/dev/null"));
  CHECK_THROWS(load_checkpoint("/dev/null"));
}
