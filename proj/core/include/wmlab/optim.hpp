// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <vector>

#include "wmlab/tensor.hpp"

namespace wmlab {

// Adam with bias correction.  Moment buffers are kept in parameter order,
// which makes serializing the optimizer state trivial.
struct OptimizerState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  std::vector<std::vector<double>> m;  // first moments, one per parameter
  std::vector<std::vector<double>> v;  // second moments

  void reset(const std::vector<Tensor>& params);
};

// One Adam update over `params` (in the order state was reset with).
// Requires populated gradients; clears them afterwards.
void adam_step(std::vector<Tensor>& params, OptimizerState& state);

}  // namespace wmlab
