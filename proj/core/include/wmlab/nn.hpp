// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <vector>

#include "wmlab/audio.hpp"
#include "wmlab/checkpoint.hpp"
#include "wmlab/message.hpp"
#include "wmlab/tensor.hpp"

namespace wmlab {

// Trainable embedder E', detector D' and discriminator used both as the
// neural watermark family and as gray/black-box surrogates.  All three are
// per-frame MLPs over non-overlapping frames of kFrame samples:
//   embedder      frame+message -> 256 -> 256 -> residual frame (tanh out)
//   detector      frame -> 256 -> 256 -> message logits (averaged per clip)
//   discriminator frame -> 128 -> 1 logit (averaged per clip)
struct SurrogateModel {
  static constexpr size_t kFrame = 128;
  static constexpr size_t kHidden = 256;
  static constexpr size_t kDiscHidden = 128;

  size_t message_len = 16;
  double gamma = 0.02;  // residual scale
  uint64_t seed = 0;

  Tensor e_w1, e_b1, e_w2, e_b2, e_w3, e_b3;
  Tensor d_w1, d_b1, d_w2, d_b2, d_w3, d_b3;
  Tensor c_w1, c_b1, c_w2, c_b2;

  std::vector<Tensor> embedder_params() const;
  std::vector<Tensor> detector_params() const;
  std::vector<Tensor> discriminator_params() const;
  std::vector<Tensor> all_params() const;
  std::vector<NamedTensor> named_params() const;
};

SurrogateModel init_surrogate(uint64_t seed, size_t message_len = 16,
                              double gamma = 0.02);

// Graph-building forwards shared by training and inference.
// frames: [N x kFrame]; message_rows: [N x L] with bits mapped to +-1.
Tensor embedder_residual(const SurrogateModel& m, const Tensor& frames,
                         const Tensor& message_rows);
Tensor detector_frame_logits(const SurrogateModel& m, const Tensor& frames);
Tensor discriminator_frame_logits(const SurrogateModel& m,
                                  const Tensor& frames);

// Rows = non-overlapping full frames of the clip (the trailing partial
// frame is excluded).
Tensor clip_frames(const AudioClip& clip, size_t frame = SurrogateModel::kFrame);
Tensor message_rows(const Message& m, size_t rows);

// output = input + gamma * residual per full frame, tail passed through,
// clamped to [-1, 1].  Throws if the clip is shorter than one frame.
AudioClip neural_embed(const SurrogateModel& m, const AudioClip& clip,
                       const Message& msg);

// soft scores = sigmoid of frame-averaged logits; always "detected".
DetectionResult neural_detect(const SurrogateModel& m, const AudioClip& clip);

// Frame-averaged discriminator logit.
double discriminate(const SurrogateModel& m, const AudioClip& clip);

void save_model(const SurrogateModel& m, const std::string& path);
SurrogateModel load_model(const std::string& path);

}  // namespace wmlab
