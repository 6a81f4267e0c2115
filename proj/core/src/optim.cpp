// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace wmlab {

void OptimizerState::reset(const std::vector<Tensor>& params) {
  step_count = 0;
  m.clear();
  v.clear();
  for (const Tensor& p : params) {
    m.emplace_back(p.size(), 0.0);
    v.emplace_back(p.size(), 0.0);
  }
}

void adam_step(std::vector<Tensor>& params, OptimizerState& state) {
  if (state.m.size() != params.size() || state.v.size() != params.size())
    throw std::invalid_argument("adam_step: state not reset for these params");
  for (const Tensor& p : params)
    if (p.grad().size() != p.size())
      throw std::invalid_argument("adam_step: missing gradients");

  state.step_count += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double bc1 = 1.0 - std::pow(b1, double(state.step_count));
  const double bc2 = 1.0 - std::pow(b2, double(state.step_count));

  for (size_t i = 0; i < params.size(); ++i) {
    auto& val = params[i].values_mut();
    const auto& g = params[i].grad();
    auto& mi = state.m[i];
    auto& vi = state.v[i];
    for (size_t j = 0; j < val.size(); ++j) {
      mi[j] = b1 * mi[j] + (1.0 - b1) * g[j];
      vi[j] = b2 * vi[j] + (1.0 - b2) * g[j] * g[j];
      const double mhat = mi[j] / bc1;
      const double vhat = vi[j] / bc2;
      val[j] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.eps);
    }
    params[i].zero_grad();
  }
}

}  // namespace wmlab
