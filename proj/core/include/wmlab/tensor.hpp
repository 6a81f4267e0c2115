// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "wmlab/rng.hpp"

namespace wmlab {

// Numerical floor used inside sqrt/log so gradients stay finite at zero.
constexpr double kEpsNum = 1e-8;

// Reverse-mode autodiff over 2-D tensors (scalars are 1x1).  The graph is
// a DAG of shared nodes; backward() consumes it, leaving gradients on the
// leaf parameters.
class Tensor {
 public:
  struct Node {
    size_t rows = 0, cols = 0;
    std::vector<double> values;
    std::vector<double> grad;  // sized on demand, zero-initialized
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;

    size_t size() const { return rows * cols; }
    std::vector<double>& ensure_grad() {
      if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
      return grad;
    }
  };

  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  static Tensor zeros(size_t rows, size_t cols, bool requires_grad = false);
  static Tensor constant(std::vector<double> values, size_t rows, size_t cols);
  static Tensor scalar(double v);
  // trainable leaf
  static Tensor param(std::vector<double> values, size_t rows, size_t cols);

  bool defined() const { return node_ != nullptr; }
  size_t rows() const { return node_->rows; }
  size_t cols() const { return node_->cols; }
  size_t size() const { return node_->size(); }
  bool requires_grad() const { return node_->requires_grad; }

  const std::vector<double>& values() const { return node_->values; }
  std::vector<double>& values_mut() { return node_->values; }
  const std::vector<double>& grad() const { return node_->grad; }
  std::vector<double>& grad_mut() { return node_->ensure_grad(); }
  double item() const;

  void zero_grad() { node_->grad.assign(node_->values.size(), 0.0); }
  Tensor detach() const;  // same values, no graph, no grad

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Elementwise ops accept equal shapes, a scalar (1x1) on either side, or a
// row vector (1xC) against an RxC matrix.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor sqrt(const Tensor& a);  // sqrt(x + kEpsNum)
Tensor log(const Tensor& a);   // log(x + kEpsNum)
Tensor abs(const Tensor& a);
Tensor clamp(const Tensor& a, double lo, double hi);
Tensor concat(const Tensor& a, const Tensor& b, int axis);
Tensor slice(const Tensor& a, size_t r0, size_t r1, size_t c0, size_t c1);
Tensor reshape(const Tensor& a, size_t rows, size_t cols);

// Sliding frames over each row: [B x N] -> [B*T x win], T = (N-win)/hop + 1.
Tensor frame_rows(const Tensor& a, size_t win, size_t hop);
// Mean over groups of `group` consecutive rows: [G*k x C] -> [G x C].
Tensor mean_pool_rows(const Tensor& a, size_t group);

// Differentiable DFT magnitudes via explicit basis matrices:
// frames [T x F] with F == fft_size -> magnitudes [T x F/2+1],
// magnitude = sqrt(re^2 + im^2 + kEpsNum).
Tensor dft_magnitude(const Tensor& frames, size_t fft_size);

// Populates gradients of every reachable requires_grad leaf; the graph is
// consumed.  Throws if loss is not scalar.
void backward(const Tensor& loss);

Tensor uniform_param(Rng& rng, size_t rows, size_t cols, double lo, double hi);

// While alive on a thread, ops on that thread record no graph even when
// inputs require grad.  Used for inference over trained parameters.
struct NoGradGuard {
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

}  // namespace wmlab
