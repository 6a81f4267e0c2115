// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <vector>

#include "wmlab/audio.hpp"
#include "wmlab/losses.hpp"
#include "wmlab/nn.hpp"
#include "wmlab/optim.hpp"

namespace wmlab {

struct TrainConfig {
  uint64_t seed = 42;
  int epochs = 1;
  int iterations = 2000;  // per epoch
  int batch_size = 8;
  int crop_frames = 8;    // model frames cropped per clip per example
  double learning_rate = 1e-3;
  LossWeights weights;
  StftResolutionSet resolutions = StftResolutionSet::defaults();
  size_t message_len = 16;
  double gamma = 0.02;
  // dataset reference (synthetic corpus parameters)
  uint64_t corpus_seed = 42;
  int corpus_count = 64;
  double corpus_duration_s = 3.0;
  int sample_rate = 16000;

  int total_iterations() const { return epochs * iterations; }
  void check() const;
  std::vector<AudioClip> make_corpus() const;
};

struct LossLogRow {
  int iteration;
  double watermark, time, freq, adversarial, total;
};

// Full training state; saving and reloading it resumes bit-exactly because
// every random draw is a pure function of (seed, iteration).
struct TrainState {
  SurrogateModel model;
  OptimizerState opt_embed_detect;
  OptimizerState opt_disc;
  int iteration = 0;
  std::vector<LossLogRow> log;
};

TrainState init_train_state(const TrainConfig& cfg);

// Runs `steps` alternating iterations (one discriminator update, then one
// embedder+detector update per iteration).  Throws on divergence.
void train_steps(const TrainConfig& cfg, const std::vector<AudioClip>& corpus,
                 TrainState& state, int steps);

struct TrainResult {
  SurrogateModel model;
  std::vector<LossLogRow> log;
};

TrainResult train_surrogate(const TrainConfig& cfg,
                            const std::vector<AudioClip>& corpus);
// Same loop stopped after `iterations`; resumable via TrainState.
TrainResult partial_train(const TrainConfig& cfg,
                          const std::vector<AudioClip>& corpus,
                          int iterations);

void save_train_state(const TrainState& state, const std::string& path);
TrainState load_train_state(const std::string& path, const TrainConfig& cfg);

void write_loss_log_csv(const std::vector<LossLogRow>& log,
                        const std::string& path);

}  // namespace wmlab
