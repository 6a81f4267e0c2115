// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <vector>

#include "wmlab/audio.hpp"
#include "wmlab/message.hpp"
#include "wmlab/nn.hpp"
#include "wmlab/stft.hpp"
#include "wmlab/tensor.hpp"

namespace wmlab {

struct LossWeights {
  double watermark = 1.0;
  double time = 10.0;
  double freq = 1.0;
  double adversarial = 0.1;
};

struct StftResolution {
  size_t fft_size;
  size_t hop;
  size_t window_length;
};

struct StftResolutionSet {
  std::vector<StftResolution> resolutions;
  static StftResolutionSet defaults();  // {64,16,64} {128,32,128} {256,64,256}
  size_t count() const { return resolutions.size(); }
};

// discriminator logits are clamped to +-15 so the log terms stay finite
constexpr double kLogitClamp = 15.0;

// ---- clip-level values (evaluation/reference path) ----------------------

// mean binary cross-entropy between bits and soft scores
double loss_watermark(const Message& m, const std::vector<double>& scores);

// mean squared sample difference
double loss_time(const AudioClip& x, const AudioClip& xw);

// (1/M) sum over resolutions of spectral convergence + mean absolute
// log-magnitude difference (log magnitudes floored at kEpsNum)
double loss_stft_multi(const AudioClip& x, const AudioClip& xw,
                       const StftResolutionSet& res);

double loss_disc(const SurrogateModel& m, const AudioClip& x,
                 const AudioClip& xw);
double loss_adv(const SurrogateModel& m, const AudioClip& xw);

struct LossComponents {
  double watermark = 0.0;
  double time = 0.0;
  double freq = 0.0;
  double adversarial = 0.0;
};

double total_loss(const LossComponents& c, const LossWeights& w);

// ---- graph-building forms (training path) -------------------------------

// scores, bits01: [G x L]; returns scalar mean BCE
Tensor bce_graph(const Tensor& bits01, const Tensor& scores);

// mean squared difference of two same-shape tensors
Tensor mse_graph(const Tensor& a, const Tensor& b);

// multi-resolution STFT loss over waveform rows [B x N]; Hann-windowed
// frames through dft_magnitude
Tensor stft_loss_graph(const Tensor& x_wave, const Tensor& y_wave,
                       const StftResolutionSet& res);

// -log(sigma(logit)) averaged, logits clamped to +-kLogitClamp
Tensor adv_loss_graph(const Tensor& fake_logits);
// -log(sigma(real)) - log(1 - sigma(fake)), averaged
Tensor disc_loss_graph(const Tensor& real_logits, const Tensor& fake_logits);

}  // namespace wmlab
