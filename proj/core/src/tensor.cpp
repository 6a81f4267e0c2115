// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace wmlab {

namespace {

using Node = Tensor::Node;

std::shared_ptr<Node> make_node(size_t rows, size_t cols) {
  auto n = std::make_shared<Node>();
  n->rows = rows;
  n->cols = cols;
  n->values.assign(rows * cols, 0.0);
  return n;
}

void check_same_size(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

thread_local int g_no_grad_depth = 0;

bool tracked(const Tensor& a) {
  return g_no_grad_depth == 0 && a.node()->requires_grad;
}
bool tracked(const Tensor& a, const Tensor& b) {
  return tracked(a) || tracked(b);
}

// Broadcast classification for elementwise ops.
enum class Bcast { same, scalar_a, scalar_b, row_b, row_a };

Bcast classify(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return Bcast::same;
  if (a.size() == 1) return Bcast::scalar_a;
  if (b.size() == 1) return Bcast::scalar_b;
  if (b.rows() == 1 && b.cols() == a.cols()) return Bcast::row_b;
  if (a.rows() == 1 && a.cols() == b.cols()) return Bcast::row_a;
  throw std::invalid_argument(std::string(op) + ": incompatible shapes");
}

size_t bcast_index(Bcast mode, bool first, size_t i, size_t cols) {
  switch (mode) {
    case Bcast::same: return i;
    case Bcast::scalar_a: return first ? 0 : i;
    case Bcast::scalar_b: return first ? i : 0;
    case Bcast::row_b: return first ? i : i % cols;
    case Bcast::row_a: return first ? i % cols : i;
  }
  return i;
}

// Generic elementwise binary op with broadcasting; f(av, bv) -> value,
// dfa/dfb -> partials w.r.t. each operand.
template <typename F, typename DA, typename DB>
Tensor binary_op(const Tensor& a, const Tensor& b, const char* name, F f,
                 DA dfa, DB dfb) {
  const Bcast mode = classify(a, b, name);
  const Tensor& big = (mode == Bcast::scalar_a || mode == Bcast::row_a) ? b : a;
  auto out = make_node(big.rows(), big.cols());
  const size_t n = out->size();
  const auto& av = a.values();
  const auto& bv = b.values();
  for (size_t i = 0; i < n; ++i) {
    const double x = av[bcast_index(mode, true, i, big.cols())];
    const double y = bv[bcast_index(mode, false, i, big.cols())];
    out->values[i] = f(x, y);
  }
  if (tracked(a, b)) {
    out->requires_grad = true;
    auto an = a.node();
    auto bn = b.node();
    out->parents = {an, bn};
    const size_t cols = big.cols();
    out->backward_fn = [an, bn, mode, cols, dfa, dfb](Node& self) {
      const size_t n = self.size();
      if (an->requires_grad) {
        auto& ga = an->ensure_grad();
        for (size_t i = 0; i < n; ++i) {
          const size_t ia = bcast_index(mode, true, i, cols);
          const size_t ib = bcast_index(mode, false, i, cols);
          ga[ia] += self.grad[i] * dfa(an->values[ia], bn->values[ib]);
        }
      }
      if (bn->requires_grad) {
        auto& gb = bn->ensure_grad();
        for (size_t i = 0; i < n; ++i) {
          const size_t ia = bcast_index(mode, true, i, cols);
          const size_t ib = bcast_index(mode, false, i, cols);
          gb[ib] += self.grad[i] * dfb(an->values[ia], bn->values[ib]);
        }
      }
    };
  }
  return Tensor(out);
}

template <typename F, typename DF>
Tensor unary_op(const Tensor& a, F f, DF df) {
  auto out = make_node(a.rows(), a.cols());
  const auto& av = a.values();
  for (size_t i = 0; i < out->size(); ++i) out->values[i] = f(av[i]);
  if (tracked(a)) {
    out->requires_grad = true;
    auto an = a.node();
    out->parents = {an};
    out->backward_fn = [an, df](Node& self) {
      if (!an->requires_grad) return;
      auto& ga = an->ensure_grad();
      for (size_t i = 0; i < self.size(); ++i)
        ga[i] += self.grad[i] * df(an->values[i], self.values[i]);
    };
  }
  return Tensor(out);
}

}  // namespace

Tensor Tensor::zeros(size_t rows, size_t cols, bool requires_grad) {
  auto n = make_node(rows, cols);
  n->requires_grad = requires_grad;
  return Tensor(n);
}

Tensor Tensor::constant(std::vector<double> values, size_t rows, size_t cols) {
  if (values.size() != rows * cols)
    throw std::invalid_argument("constant: size does not match shape");
  auto n = std::make_shared<Node>();
  n->rows = rows;
  n->cols = cols;
  n->values = std::move(values);
  return Tensor(n);
}

Tensor Tensor::scalar(double v) { return constant({v}, 1, 1); }

Tensor Tensor::param(std::vector<double> values, size_t rows, size_t cols) {
  Tensor t = constant(std::move(values), rows, cols);
  t.node()->requires_grad = true;
  return t;
}

double Tensor::item() const {
  if (size() != 1) throw std::invalid_argument("item: tensor is not scalar");
  return node_->values[0];
}

Tensor Tensor::detach() const {
  auto n = std::make_shared<Node>();
  n->rows = rows();
  n->cols = cols();
  n->values = values();
  return Tensor(n);
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dims");
  const size_t m = a.rows(), kk = a.cols(), nn = b.cols();
  auto out = make_node(m, nn);
  {
    const double* A = a.values().data();
    const double* B = b.values().data();
    double* C = out->values.data();
    for (size_t i = 0; i < m; ++i) {
      const double* arow = A + i * kk;
      double* crow = C + i * nn;
      for (size_t k = 0; k < kk; ++k) {
        const double aik = arow[k];
        if (aik == 0.0) continue;
        const double* brow = B + k * nn;
        for (size_t j = 0; j < nn; ++j) crow[j] += aik * brow[j];
      }
    }
  }
  if (tracked(a, b)) {
    out->requires_grad = true;
    auto an = a.node();
    auto bn = b.node();
    out->parents = {an, bn};
    out->backward_fn = [an, bn, m, kk, nn](Node& self) {
      const double* G = self.grad.data();
      if (an->requires_grad) {
        auto& ga = an->ensure_grad();
        const double* B = bn->values.data();
        for (size_t i = 0; i < m; ++i) {
          double* garow = ga.data() + i * kk;
          const double* grow = G + i * nn;
          for (size_t k = 0; k < kk; ++k) {
            const double* brow = B + k * nn;
            double acc = 0.0;
            for (size_t j = 0; j < nn; ++j) acc += grow[j] * brow[j];
            garow[k] += acc;
          }
        }
      }
      if (bn->requires_grad) {
        auto& gb = bn->ensure_grad();
        const double* A = an->values.data();
        for (size_t i = 0; i < m; ++i) {
          const double* arow = A + i * kk;
          const double* grow = G + i * nn;
          for (size_t k = 0; k < kk; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            double* gbrow = gb.data() + k * nn;
            for (size_t j = 0; j < nn; ++j) gbrow[j] += aik * grow[j];
          }
        }
      }
    };
  }
  return Tensor(out);
}

namespace {

Tensor reduce_op(const Tensor& a, bool take_mean) {
  auto out = make_node(1, 1);
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  const double scale = take_mean ? 1.0 / double(a.size()) : 1.0;
  out->values[0] = acc * scale;
  if (tracked(a)) {
    out->requires_grad = true;
    auto an = a.node();
    out->parents = {an};
    out->backward_fn = [an, scale](Node& self) {
      if (!an->requires_grad) return;
      auto& ga = an->ensure_grad();
      const double g = self.grad[0] * scale;
      for (double& v : ga) v += g;
    };
  }
  return Tensor(out);
}

}  // namespace

Tensor sum(const Tensor& a) { return reduce_op(a, false); }
Tensor mean(const Tensor& a) { return reduce_op(a, true); }

Tensor relu(const Tensor& a) {
  return unary_op(
      a, [](double x) { return x > 0 ? x : 0.0; },
      [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor tanh(const Tensor& a) {
  return unary_op(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary_op(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor sqrt(const Tensor& a) {
  return unary_op(
      a, [](double x) { return std::sqrt(x + kEpsNum); },
      [](double, double y) { return 0.5 / y; });
}

Tensor log(const Tensor& a) {
  return unary_op(
      a, [](double x) { return std::log(x + kEpsNum); },
      [](double x, double) { return 1.0 / (x + kEpsNum); });
}

Tensor abs(const Tensor& a) {
  return unary_op(
      a, [](double x) { return std::fabs(x); },
      [](double x, double) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  return unary_op(
      a, [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); },
      [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Tensor concat(const Tensor& a, const Tensor& b, int axis) {
  if (axis != 0 && axis != 1) throw std::invalid_argument("concat: bad axis");
  size_t rows, cols;
  if (axis == 1) {
    if (a.rows() != b.rows()) throw std::invalid_argument("concat: rows");
    rows = a.rows();
    cols = a.cols() + b.cols();
  } else {
    if (a.cols() != b.cols()) throw std::invalid_argument("concat: cols");
    rows = a.rows() + b.rows();
    cols = a.cols();
  }
  auto out = make_node(rows, cols);
  const size_t ac = a.cols(), ar = a.rows();
  if (axis == 1) {
    for (size_t i = 0; i < rows; ++i) {
      for (size_t j = 0; j < ac; ++j)
        out->values[i * cols + j] = a.values()[i * ac + j];
      for (size_t j = 0; j < b.cols(); ++j)
        out->values[i * cols + ac + j] = b.values()[i * b.cols() + j];
    }
  } else {
    std::copy(a.values().begin(), a.values().end(), out->values.begin());
    std::copy(b.values().begin(), b.values().end(),
              out->values.begin() + long(a.size()));
  }
  if (tracked(a, b)) {
    out->requires_grad = true;
    auto an = a.node();
    auto bn = b.node();
    out->parents = {an, bn};
    out->backward_fn = [an, bn, axis, ac, ar, cols](Node& self) {
      if (axis == 1) {
        if (an->requires_grad) {
          auto& ga = an->ensure_grad();
          for (size_t i = 0; i < self.rows; ++i)
            for (size_t j = 0; j < ac; ++j)
              ga[i * ac + j] += self.grad[i * cols + j];
        }
        if (bn->requires_grad) {
          auto& gb = bn->ensure_grad();
          const size_t bc = cols - ac;
          for (size_t i = 0; i < self.rows; ++i)
            for (size_t j = 0; j < bc; ++j)
              gb[i * bc + j] += self.grad[i * cols + ac + j];
        }
      } else {
        if (an->requires_grad) {
          auto& ga = an->ensure_grad();
          for (size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i];
        }
        if (bn->requires_grad) {
          auto& gb = bn->ensure_grad();
          const size_t off = ar * cols;
          for (size_t i = 0; i < gb.size(); ++i) gb[i] += self.grad[off + i];
        }
      }
    };
  }
  return Tensor(out);
}

Tensor slice(const Tensor& a, size_t r0, size_t r1, size_t c0, size_t c1) {
  if (r1 > a.rows() || c1 > a.cols() || r0 >= r1 || c0 >= c1)
    throw std::invalid_argument("slice: bad range");
  const size_t rows = r1 - r0, cols = c1 - c0;
  auto out = make_node(rows, cols);
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j)
      out->values[i * cols + j] = a.values()[(r0 + i) * a.cols() + c0 + j];
  if (tracked(a)) {
    out->requires_grad = true;
    auto an = a.node();
    out->parents = {an};
    const size_t acols = a.cols();
    out->backward_fn = [an, r0, c0, rows, cols, acols](Node& self) {
      if (!an->requires_grad) return;
      auto& ga = an->ensure_grad();
      for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j)
          ga[(r0 + i) * acols + c0 + j] += self.grad[i * cols + j];
    };
  }
  return Tensor(out);
}

Tensor reshape(const Tensor& a, size_t rows, size_t cols) {
  if (rows * cols != a.size())
    throw std::invalid_argument("reshape: size mismatch");
  auto out = make_node(rows, cols);
  out->values = a.values();
  if (tracked(a)) {
    out->requires_grad = true;
    auto an = a.node();
    out->parents = {an};
    out->backward_fn = [an](Node& self) {
      if (!an->requires_grad) return;
      auto& ga = an->ensure_grad();
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i];
    };
  }
  return Tensor(out);
}

Tensor frame_rows(const Tensor& a, size_t win, size_t hop) {
  if (win == 0 || hop == 0 || a.cols() < win)
    throw std::invalid_argument("frame_rows: bad geometry");
  const size_t T = (a.cols() - win) / hop + 1;
  const size_t B = a.rows(), N = a.cols();
  auto out = make_node(B * T, win);
  for (size_t b = 0; b < B; ++b)
    for (size_t t = 0; t < T; ++t)
      for (size_t j = 0; j < win; ++j)
        out->values[(b * T + t) * win + j] = a.values()[b * N + t * hop + j];
  if (tracked(a)) {
    out->requires_grad = true;
    auto an = a.node();
    out->parents = {an};
    out->backward_fn = [an, B, T, N, win, hop](Node& self) {
      if (!an->requires_grad) return;
      auto& ga = an->ensure_grad();
      for (size_t b = 0; b < B; ++b)
        for (size_t t = 0; t < T; ++t)
          for (size_t j = 0; j < win; ++j)
            ga[b * N + t * hop + j] += self.grad[(b * T + t) * win + j];
    };
  }
  return Tensor(out);
}

Tensor mean_pool_rows(const Tensor& a, size_t group) {
  if (group == 0 || a.rows() % group != 0)
    throw std::invalid_argument("mean_pool_rows: rows not divisible by group");
  const size_t G = a.rows() / group, C = a.cols();
  auto out = make_node(G, C);
  for (size_t g = 0; g < G; ++g)
    for (size_t r = 0; r < group; ++r)
      for (size_t j = 0; j < C; ++j)
        out->values[g * C + j] += a.values()[(g * group + r) * C + j];
  const double inv = 1.0 / double(group);
  for (double& v : out->values) v *= inv;
  if (tracked(a)) {
    out->requires_grad = true;
    auto an = a.node();
    out->parents = {an};
    out->backward_fn = [an, G, C, group, inv](Node& self) {
      if (!an->requires_grad) return;
      auto& ga = an->ensure_grad();
      for (size_t g = 0; g < G; ++g)
        for (size_t r = 0; r < group; ++r)
          for (size_t j = 0; j < C; ++j)
            ga[(g * group + r) * C + j] += self.grad[g * C + j] * inv;
    };
  }
  return Tensor(out);
}

namespace {

struct DftBasis {
  Tensor cos_t;  // [F x bins]
  Tensor sin_t;
};

const DftBasis& dft_basis(size_t fft_size) {
  static std::unordered_map<size_t, DftBasis> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(fft_size);
  if (it != cache.end()) return it->second;
  const size_t bins = fft_size / 2 + 1;
  std::vector<double> c(fft_size * bins), s(fft_size * bins);
  for (size_t f = 0; f < fft_size; ++f)
    for (size_t k = 0; k < bins; ++k) {
      const double ang =
          2.0 * std::numbers::pi * double(f) * double(k) / double(fft_size);
      c[f * bins + k] = std::cos(ang);
      s[f * bins + k] = -std::sin(ang);
    }
  DftBasis b{Tensor::constant(std::move(c), fft_size, bins),
             Tensor::constant(std::move(s), fft_size, bins)};
  return cache.emplace(fft_size, std::move(b)).first->second;
}

}  // namespace

Tensor dft_magnitude(const Tensor& frames, size_t fft_size) {
  if (frames.cols() != fft_size)
    throw std::invalid_argument("dft_magnitude: frame width != fft_size");
  const DftBasis& basis = dft_basis(fft_size);
  Tensor re = matmul(frames, basis.cos_t);
  Tensor im = matmul(frames, basis.sin_t);
  return sqrt(add(mul(re, re), mul(im, im)));
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1)
    throw std::invalid_argument("backward: loss must be a scalar tensor");
  // topological order by DFS; `order` owns the nodes so that consuming the
  // graph (dropping parent links) cannot free a node still to be visited
  std::vector<std::shared_ptr<Tensor::Node>> order;
  std::unordered_set<Tensor::Node*> seen;
  std::vector<std::pair<std::shared_ptr<Tensor::Node>, size_t>> stack;
  stack.emplace_back(loss.node(), 0);
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      auto child = node->parents[next++];
      if (child->requires_grad && seen.insert(child.get()).second)
        stack.emplace_back(std::move(child), 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  loss.node()->ensure_grad();
  loss.node()->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Tensor::Node* n = it->get();
    if (n->backward_fn) {
      n->ensure_grad();
      n->backward_fn(*n);
      n->backward_fn = nullptr;  // the graph is consumed
      n->parents.clear();
    }
  }
}

Tensor uniform_param(Rng& rng, size_t rows, size_t cols, double lo, double hi) {
  std::vector<double> v(rows * cols);
  for (double& x : v) x = rng.uniform(lo, hi);
  return Tensor::param(std::move(v), rows, cols);
}

NoGradGuard::NoGradGuard() { ++g_no_grad_depth; }
NoGradGuard::~NoGradGuard() { --g_no_grad_depth; }

}  // namespace wmlab
