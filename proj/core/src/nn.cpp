// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wmlab {

namespace {

Tensor glorot(Rng& rng, size_t fan_in, size_t fan_out) {
  const double limit = std::sqrt(6.0 / double(fan_in + fan_out));
  return uniform_param(rng, fan_in, fan_out, -limit, limit);
}

Tensor zero_bias(size_t n) { return Tensor::zeros(1, n, true); }

Tensor mlp_layer(const Tensor& x, const Tensor& w, const Tensor& b) {
  return add(matmul(x, w), b);
}

}  // namespace

std::vector<Tensor> SurrogateModel::embedder_params() const {
  return {e_w1, e_b1, e_w2, e_b2, e_w3, e_b3};
}

std::vector<Tensor> SurrogateModel::detector_params() const {
  return {d_w1, d_b1, d_w2, d_b2, d_w3, d_b3};
}

std::vector<Tensor> SurrogateModel::discriminator_params() const {
  return {c_w1, c_b1, c_w2, c_b2};
}

std::vector<Tensor> SurrogateModel::all_params() const {
  std::vector<Tensor> out = embedder_params();
  for (auto& t : detector_params()) out.push_back(t);
  for (auto& t : discriminator_params()) out.push_back(t);
  return out;
}

std::vector<NamedTensor> SurrogateModel::named_params() const {
  return {{"embedder.w1", e_w1}, {"embedder.b1", e_b1},
          {"embedder.w2", e_w2}, {"embedder.b2", e_b2},
          {"embedder.w3", e_w3}, {"embedder.b3", e_b3},
          {"detector.w1", d_w1}, {"detector.b1", d_b1},
          {"detector.w2", d_w2}, {"detector.b2", d_b2},
          {"detector.w3", d_w3}, {"detector.b3", d_b3},
          {"disc.w1", c_w1},     {"disc.b1", c_b1},
          {"disc.w2", c_w2},     {"disc.b2", c_b2}};
}

SurrogateModel init_surrogate(uint64_t seed, size_t message_len,
                              double gamma) {
  if (message_len == 0) throw std::invalid_argument("message_len must be > 0");
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be > 0");
  SurrogateModel m;
  m.message_len = message_len;
  m.gamma = gamma;
  m.seed = seed;
  const size_t F = SurrogateModel::kFrame;
  const size_t H = SurrogateModel::kHidden;
  const size_t D = SurrogateModel::kDiscHidden;

  Rng r_e(seed, 0xe1);
  m.e_w1 = glorot(r_e, F + message_len, H);
  m.e_b1 = zero_bias(H);
  m.e_w2 = glorot(r_e, H, H);
  m.e_b2 = zero_bias(H);
  m.e_w3 = glorot(r_e, H, F);
  m.e_b3 = zero_bias(F);

  Rng r_d(seed, 0xd1);
  m.d_w1 = glorot(r_d, F, H);
  m.d_b1 = zero_bias(H);
  m.d_w2 = glorot(r_d, H, H);
  m.d_b2 = zero_bias(H);
  m.d_w3 = glorot(r_d, H, message_len);
  m.d_b3 = zero_bias(message_len);

  Rng r_c(seed, 0xc1);
  m.c_w1 = glorot(r_c, F, D);
  m.c_b1 = zero_bias(D);
  m.c_w2 = glorot(r_c, D, 1);
  m.c_b2 = zero_bias(1);
  return m;
}

Tensor embedder_residual(const SurrogateModel& m, const Tensor& frames,
                         const Tensor& message_rows) {
  Tensor x = concat(frames, message_rows, 1);
  Tensor h1 = tanh(mlp_layer(x, m.e_w1, m.e_b1));
  Tensor h2 = tanh(mlp_layer(h1, m.e_w2, m.e_b2));
  return tanh(mlp_layer(h2, m.e_w3, m.e_b3));
}

Tensor detector_frame_logits(const SurrogateModel& m, const Tensor& frames) {
  Tensor h1 = tanh(mlp_layer(frames, m.d_w1, m.d_b1));
  Tensor h2 = tanh(mlp_layer(h1, m.d_w2, m.d_b2));
  return mlp_layer(h2, m.d_w3, m.d_b3);
}

Tensor discriminator_frame_logits(const SurrogateModel& m,
                                  const Tensor& frames) {
  Tensor h1 = tanh(mlp_layer(frames, m.c_w1, m.c_b1));
  return mlp_layer(h1, m.c_w2, m.c_b2);
}

Tensor clip_frames(const AudioClip& clip, size_t frame) {
  const size_t T = clip.samples.size() / frame;
  if (T == 0)
    throw std::invalid_argument("clip shorter than one model frame");
  std::vector<double> v(T * frame);
  std::copy_n(clip.samples.begin(), T * frame, v.begin());
  return Tensor::constant(std::move(v), T, frame);
}

Tensor message_rows(const Message& m, size_t rows) {
  std::vector<double> v(rows * m.size());
  for (size_t r = 0; r < rows; ++r)
    for (size_t i = 0; i < m.size(); ++i)
      v[r * m.size() + i] = m.bits[i] ? 1.0 : -1.0;
  return Tensor::constant(std::move(v), rows, m.size());
}

AudioClip neural_embed(const SurrogateModel& m, const AudioClip& clip,
                       const Message& msg) {
  validate(clip);
  if (msg.size() != m.message_len)
    throw std::invalid_argument("message length does not match model");
  NoGradGuard ng;
  const size_t F = SurrogateModel::kFrame;
  Tensor frames = clip_frames(clip, F);
  Tensor res = embedder_residual(m, frames, message_rows(msg, frames.rows()));
  AudioClip out = clip;
  const auto& r = res.values();
  const size_t covered = frames.rows() * F;
  for (size_t i = 0; i < covered; ++i) {
    const double y = clip.samples[i] + m.gamma * r[i];
    out.samples[i] = std::clamp(y, -1.0, 1.0);
  }
  return out;  // trailing partial frame is untouched
}

DetectionResult neural_detect(const SurrogateModel& m, const AudioClip& clip) {
  validate(clip);
  NoGradGuard ng;
  Tensor frames = clip_frames(clip, SurrogateModel::kFrame);
  Tensor logits = detector_frame_logits(m, frames);
  Tensor avg = mean_pool_rows(logits, frames.rows());
  Tensor scores = sigmoid(avg);
  return result_from_scores(scores.values());
}

double discriminate(const SurrogateModel& m, const AudioClip& clip) {
  validate(clip);
  NoGradGuard ng;
  Tensor frames = clip_frames(clip, SurrogateModel::kFrame);
  Tensor logits = discriminator_frame_logits(m, frames);
  return mean(logits).item();
}

void save_model(const SurrogateModel& m, const std::string& path) {
  std::vector<NamedTensor> tensors = m.named_params();
  // model metadata rides along as a tensor: L, gamma, seed split in 32-bit
  // halves (doubles hold 32-bit integers exactly)
  tensors.push_back(
      {"meta", Tensor::constant({double(m.message_len), m.gamma,
                                 double(uint32_t(m.seed & 0xffffffffULL)),
                                 double(uint32_t(m.seed >> 32))},
                                1, 4)});
  save_checkpoint(path, tensors, CheckpointDtype::f32);
}

SurrogateModel load_model(const std::string& path) {
  auto tensors = load_checkpoint(path);
  size_t message_len = 16;
  double gamma = 0.02;
  uint64_t seed = 0;
  for (const auto& nt : tensors)
    if (nt.name == "meta") {
      const auto& v = nt.tensor.values();
      if (v.size() != 4) throw std::runtime_error("bad model meta tensor");
      message_len = size_t(v[0]);
      gamma = v[1];
      seed = uint64_t(uint32_t(v[2])) | (uint64_t(uint32_t(v[3])) << 32);
    }
  SurrogateModel m = init_surrogate(seed == 0 ? 1 : seed, message_len,
                                    gamma > 0 ? gamma : 0.02);
  m.seed = seed;
  m.gamma = gamma;
  m.message_len = message_len;
  bool any = false;
  for (auto& nt : tensors) {
    Tensor* dst = nullptr;
    if (nt.name == "embedder.w1") dst = &m.e_w1;
    else if (nt.name == "embedder.b1") dst = &m.e_b1;
    else if (nt.name == "embedder.w2") dst = &m.e_w2;
    else if (nt.name == "embedder.b2") dst = &m.e_b2;
    else if (nt.name == "embedder.w3") dst = &m.e_w3;
    else if (nt.name == "embedder.b3") dst = &m.e_b3;
    else if (nt.name == "detector.w1") dst = &m.d_w1;
    else if (nt.name == "detector.b1") dst = &m.d_b1;
    else if (nt.name == "detector.w2") dst = &m.d_w2;
    else if (nt.name == "detector.b2") dst = &m.d_b2;
    else if (nt.name == "detector.w3") dst = &m.d_w3;
    else if (nt.name == "detector.b3") dst = &m.d_b3;
    else if (nt.name == "disc.w1") dst = &m.c_w1;
    else if (nt.name == "disc.b1") dst = &m.c_b1;
    else if (nt.name == "disc.w2") dst = &m.c_w2;
    else if (nt.name == "disc.b2") dst = &m.c_b2;
    if (dst) {
      if (dst->rows() != nt.tensor.rows() || dst->cols() != nt.tensor.cols())
        throw std::runtime_error("model tensor shape mismatch: " + nt.name);
      dst->values_mut() = nt.tensor.values();
      any = true;
    }
  }
  if (!any) throw std::runtime_error("no model tensors found in " + path);
  return m;
}

}  // namespace wmlab
