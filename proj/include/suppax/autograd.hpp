// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal reverse-mode automatic differentiation over dense float64 tensors.
//
// Every operation produces a fresh Tensor. When any input requires a
// gradient, the output records its inputs and a backward closure; the graph
// is rebuilt on each forward pass. Node ids grow monotonically with creation,
// so sorting reachable nodes by id gives a valid topological order.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "suppax/errors.hpp"
#include "suppax/matrix.hpp"

namespace suppax {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
  return out + "]";
}

namespace detail {

inline std::uint64_t next_node_id() {
  static std::atomic<std::uint64_t> counter{0};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

struct Node {
  std::uint64_t id = next_node_id();
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  bool is_leaf() const { return parents.empty(); }

  std::vector<double>& grad_buffer() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false) {
    if (shape.empty()) shape = {1};
    for (auto d : shape) {
      if (d == 0 && shape.size() != 2) throw DimensionError("Tensor: zero-length dimension " + shape_str(shape));
    }
    if (shape_size(shape) != values.size()) {
      throw DimensionError("Tensor: " + std::to_string(values.size()) + " values for shape " + shape_str(shape));
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw NumericError("Tensor: non-finite value");
    }
    auto n = std::make_shared<detail::Node>();
    n->shape = std::move(shape);
    n->value = std::move(values);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
  }

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    auto size = shape_size(shape);
    return from(std::move(shape), std::vector<double>(size, 0.0), requires_grad);
  }

  static Tensor scalar(double v, bool requires_grad = false) { return from({1}, {v}, requires_grad); }

  static Tensor from_matrix(const Matrix& m, bool requires_grad = false) {
    return from({m.rows, m.cols}, m.values, requires_grad);
  }

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t size() const { return node_->value.size(); }
  std::size_t rows() const { return node_->shape.at(0); }
  std::size_t cols() const { return node_->shape.size() > 1 ? node_->shape[1] : 1; }

  std::span<const double> values() const { return node_->value; }
  /// Direct write access, for optimizers and initializers. Does not touch the graph.
  std::span<double> mutable_values() { return node_->value; }

  double operator()(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }
  double item() const {
    if (size() != 1) throw ContractError("item: tensor of shape " + shape_str(shape()) + " is not scalar");
    return node_->value[0];
  }

  Matrix to_matrix() const { return Matrix(rows(), cols(), node_->value); }

  bool requires_grad() const { return node_->requires_grad; }
  Tensor& set_requires_grad(bool on) {
    if (!node_->is_leaf()) throw ContractError("set_requires_grad: only leaves may change requires_grad");
    node_->requires_grad = on;
    return *this;
  }
  bool is_leaf() const { return node_->is_leaf(); }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const double> grad() const { return node_->grad; }
  void zero_grad() { node_->grad.assign(node_->value.size(), 0.0); }
  const char* op() const { return node_->op; }

  /// Same values, cut from the graph.
  Tensor detach() const { return from(shape(), node_->value, false); }

  /// Deep copy of values into a fresh leaf with the same requires_grad flag.
  Tensor clone() const { return from(shape(), node_->value, requires_grad()); }

  std::shared_ptr<detail::Node> node() const { return node_; }

  // Internal constructor for operation results.
  static Tensor make_result(Shape shape, std::vector<double> values, const char* op,
                            std::vector<Tensor> inputs, std::function<void(detail::Node&)> backward) {
    for (double v : values) {
      if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite value produced");
    }
    auto n = std::make_shared<detail::Node>();
    n->shape = std::move(shape);
    n->value = std::move(values);
    n->op = op;
    bool any = std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) { return t.requires_grad(); });
    if (any) {
      n->requires_grad = true;
      for (auto& t : inputs) n->parents.push_back(t.node_);
      n->backward = std::move(backward);
    }
    return Tensor(std::move(n));
  }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<detail::Node> node_;
};

namespace detail {

inline void require_2d(const Tensor& t, const char* op) {
  if (t.shape().size() != 2) throw DimensionError(std::string(op) + ": expected 2-D tensor, got " + shape_str(t.shape()));
}

inline void accumulate(Node& target, std::span<const double> g) {
  if (!target.requires_grad) return;
  auto& buf = target.grad_buffer();
  for (std::size_t i = 0; i < g.size(); ++i) buf[i] += g[i];
}

inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

/// a[m x k] * b[k x n].
inline Tensor matmul(const Tensor& a, const Tensor& b) {
  detail::require_2d(a, "matmul");
  detail::require_2d(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw DimensionError("matmul: inner dimensions differ " + shape_str(a.shape()) + " * " + shape_str(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = bv.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  auto an = a.node(), bn = b.node();
  return Tensor::make_result({m, n}, std::move(out), "matmul", {a, b}, [an, bn, m, k, n](detail::Node& self) {
    const auto& g = self.grad;
    if (an->requires_grad) {
      // dA = G * B^T
      auto& ga = an->grad_buffer();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * bn->value[p * n + j];
          ga[i * k + p] += s;
        }
      }
    }
    if (bn->requires_grad) {
      // dB = A^T * G
      auto& gb = bn->grad_buffer();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = an->value[i * k + p];
          if (aip == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
        }
      }
    }
  });
}

/// a[m x n] + bias[1 x n], bias broadcast over rows.
inline Tensor add_bias(const Tensor& a, const Tensor& bias) {
  detail::require_2d(a, "add_bias");
  const std::size_t m = a.rows(), n = a.cols();
  if (bias.size() != n) throw DimensionError("add_bias: bias " + shape_str(bias.shape()) + " vs " + shape_str(a.shape()));
  std::vector<double> out(a.values().begin(), a.values().end());
  auto bv = bias.values();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += bv[j];
  auto an = a.node(), bn = bias.node();
  return Tensor::make_result({m, n}, std::move(out), "add_bias", {a, bias}, [an, bn, m, n](detail::Node& self) {
    detail::accumulate(*an, self.grad);
    if (bn->requires_grad) {
      auto& gb = bn->grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) gb[j] += self.grad[i * n + j];
    }
  });
}

/// Repeats a 1 x n row `count` times.
inline Tensor broadcast_rows(const Tensor& row, std::size_t count) {
  const std::size_t n = row.size();
  std::vector<double> out(count * n);
  for (std::size_t i = 0; i < count; ++i) std::copy(row.values().begin(), row.values().end(), out.begin() + i * n);
  auto rn = row.node();
  return Tensor::make_result({count, n}, std::move(out), "broadcast_rows", {row}, [rn, count, n](detail::Node& self) {
    auto& g = rn->grad_buffer();
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j];
  });
}

namespace detail {

template <class Fwd, class Bwd>
Tensor binary_elementwise(const Tensor& a, const Tensor& b, const char* op, Fwd fwd, Bwd bwd) {
  if (a.shape() != b.shape()) throw DimensionError(std::string(op) + ": " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(a.values()[i], b.values()[i]);
  auto an = a.node(), bn = b.node();
  return Tensor::make_result(a.shape(), std::move(out), op, {a, b}, [an, bn, bwd](Node& self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      auto [da, db] = bwd(an->value[i], bn->value[i]);
      if (an->requires_grad) an->grad_buffer()[i] += self.grad[i] * da;
      if (bn->requires_grad) bn->grad_buffer()[i] += self.grad[i] * db;
    }
  });
}

}  // namespace detail

inline Tensor add(const Tensor& a, const Tensor& b) {
  return detail::binary_elementwise(a, b, "add", [](double x, double y) { return x + y; },
                                    [](double, double) { return std::pair{1.0, 1.0}; });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  return detail::binary_elementwise(a, b, "sub", [](double x, double y) { return x - y; },
                                    [](double, double) { return std::pair{1.0, -1.0}; });
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
  return detail::binary_elementwise(a, b, "mul", [](double x, double y) { return x * y; },
                                    [](double x, double y) { return std::pair{y, x}; });
}

inline Tensor scale(const Tensor& a, double s) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (auto& v : out) v *= s;
  auto an = a.node();
  return Tensor::make_result(a.shape(), std::move(out), "scale", {a}, [an, s](detail::Node& self) {
    auto& g = an->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += s * self.grad[i];
  });
}

/// Sum of all elements, as a scalar tensor.
inline Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  auto an = a.node();
  return Tensor::make_result({1}, {s}, "sum", {a}, [an](detail::Node& self) {
    auto& g = an->grad_buffer();
    for (auto& v : g) v += self.grad[0];
  });
}

inline Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.size())); }

/// max(0, x); the derivative at exactly 0 is 0.
inline Tensor relu(const Tensor& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] > 0.0 ? a.values()[i] : 0.0;
  auto an = a.node();
  return Tensor::make_result(a.shape(), std::move(out), "relu", {a}, [an](detail::Node& self) {
    auto& g = an->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (an->value[i] > 0.0) g[i] += self.grad[i];
  });
}

inline Tensor sigmoid(const Tensor& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::sigmoid(a.values()[i]);
  auto an = a.node();
  return Tensor::make_result(a.shape(), out, "sigmoid", {a}, [an, out](detail::Node& self) {
    auto& g = an->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * out[i] * (1.0 - out[i]);
  });
}

/// Columnwise concatenation [a | c]; either part may have zero columns.
inline Tensor concat(const Tensor& a, const Tensor& c) {
  detail::require_2d(a, "concat");
  detail::require_2d(c, "concat");
  if (a.rows() != c.rows()) {
    throw DimensionError("concat: batch mismatch " + shape_str(a.shape()) + " ++ " + shape_str(c.shape()));
  }
  const std::size_t b = a.rows(), p = a.cols(), q = c.cols(), w = p + q;
  std::vector<double> out(b * w);
  for (std::size_t i = 0; i < b; ++i) {
    std::copy_n(a.values().begin() + i * p, p, out.begin() + i * w);
    std::copy_n(c.values().begin() + i * q, q, out.begin() + i * w + p);
  }
  auto an = a.node(), cn = c.node();
  return Tensor::make_result({b, w}, std::move(out), "concat", {a, c}, [an, cn, b, p, q, w](detail::Node& self) {
    if (an->requires_grad) {
      auto& ga = an->grad_buffer();
      for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < p; ++j) ga[i * p + j] += self.grad[i * w + j];
    }
    if (cn->requires_grad) {
      auto& gc = cn->grad_buffer();
      for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < q; ++j) gc[i * q + j] += self.grad[i * w + p + j];
    }
  });
}

/// Columns [begin, end) of a 2-D tensor.
inline Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end) {
  detail::require_2d(a, "slice_cols");
  if (begin > end || end > a.cols()) throw DimensionError("slice_cols: range out of bounds");
  const std::size_t b = a.rows(), w = a.cols(), q = end - begin;
  std::vector<double> out(b * q);
  for (std::size_t i = 0; i < b; ++i) std::copy_n(a.values().begin() + i * w + begin, q, out.begin() + i * q);
  auto an = a.node();
  return Tensor::make_result({b, q}, std::move(out), "slice_cols", {a}, [an, b, w, q, begin](detail::Node& self) {
    auto& g = an->grad_buffer();
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = 0; j < q; ++j) g[i * w + begin + j] += self.grad[i * q + j];
  });
}

/// Mean over the batch of -log softmax(logits)[label], max-subtracted.
inline Tensor softmax_cross_entropy(const Tensor& logits, std::span<const int> labels) {
  detail::require_2d(logits, "softmax_cross_entropy");
  const std::size_t b = logits.rows(), c = logits.cols();
  if (labels.size() != b) throw DimensionError("softmax_cross_entropy: label count differs from batch");
  auto lv = logits.values();
  std::vector<double> probs(b * c);
  double loss = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c) {
      throw IndexError("softmax_cross_entropy: label " + std::to_string(labels[i]) + " outside [0, " +
                       std::to_string(c) + ")");
    }
    const double* row = lv.data() + i * c;
    double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    const double log_z = std::log(z) + mx;
    for (std::size_t j = 0; j < c; ++j) probs[i * c + j] = std::exp(row[j] - log_z);
    loss += log_z - row[labels[i]];
  }
  loss /= static_cast<double>(b);
  auto ln = logits.node();
  std::vector<int> lab(labels.begin(), labels.end());
  return Tensor::make_result({1}, {loss}, "softmax_cross_entropy", {logits},
                             [ln, probs = std::move(probs), lab = std::move(lab), b, c](detail::Node& self) {
                               auto& g = ln->grad_buffer();
                               const double s = self.grad[0] / static_cast<double>(b);
                               for (std::size_t i = 0; i < b; ++i) {
                                 for (std::size_t j = 0; j < c; ++j) {
                                   double d = probs[i * c + j] - (static_cast<int>(j) == lab[i] ? 1.0 : 0.0);
                                   g[i * c + j] += s * d;
                                 }
                               }
                             });
}

/// Mean of t*softplus(-z) + (1-t)*softplus(z): binary cross-entropy on logits.
inline Tensor bce_logits(const Tensor& logits, const Tensor& targets) {
  if (logits.shape() != targets.shape()) {
    throw DimensionError("bce_logits: " + shape_str(logits.shape()) + " vs " + shape_str(targets.shape()));
  }
  const std::size_t n = logits.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = logits.values()[i], t = targets.values()[i];
    loss += t * detail::softplus(-z) + (1.0 - t) * detail::softplus(z);
  }
  loss /= static_cast<double>(n);
  auto ln = logits.node(), tn = targets.node();
  return Tensor::make_result({1}, {loss}, "bce_logits", {logits, targets}, [ln, tn, n](detail::Node& self) {
    const double s = self.grad[0] / static_cast<double>(n);
    if (ln->requires_grad) {
      auto& g = ln->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) g[i] += s * (detail::sigmoid(ln->value[i]) - tn->value[i]);
    }
    if (tn->requires_grad) {
      // d/dt = softplus(-z) - softplus(z) = -z
      auto& g = tn->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) g[i] += -s * ln->value[i];
    }
  });
}

/// Populates grad on every requires_grad node reachable from a scalar loss.
/// Leaf gradients accumulate across calls until zero_grad(); interior
/// gradients are reset on each call.
inline void backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) throw ContractError("backward: loss must be a scalar tensor");
  if (!loss.requires_grad()) throw ContractError("backward: loss does not depend on any requires_grad tensor");

  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  std::vector<detail::Node*> stack{loss.node().get()};
  while (!stack.empty()) {
    auto* n = stack.back();
    stack.pop_back();
    if (!n->requires_grad || !seen.insert(n).second) continue;
    order.push_back(n);
    for (auto& p : n->parents) stack.push_back(p.get());
  }
  std::sort(order.begin(), order.end(), [](auto* x, auto* y) { return x->id > y->id; });
  for (auto* n : order)
    if (!n->is_leaf()) n->grad.assign(n->value.size(), 0.0);
  loss.node()->grad_buffer()[0] += 1.0;
  for (auto* n : order)
    if (n->backward) n->backward(*n);
}

/// Worst coordinate-wise relative error between backward gradients and
/// central finite differences over every tensor in `params`. `loss_fn` must
/// recompute the loss from the current parameter values on each call.
inline double grad_check(const std::function<Tensor()>& loss_fn, std::vector<Tensor> params, double h) {
  if (!(h > 0.0)) throw ContractError("grad_check: h must be positive");
  for (auto& p : params) p.zero_grad();
  backward(loss_fn());
  double worst = 0.0;
  for (auto& p : params) {
    std::vector<double> analytic(p.grad().begin(), p.grad().end());
    auto vals = p.mutable_values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double saved = vals[i];
      vals[i] = saved + h;
      const double up = loss_fn().item();
      vals[i] = saved - h;
      const double down = loss_fn().item();
      vals[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
  }
  return worst;
}

/// grad_check for a function of a single tensor argument.
inline double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& point, double h) {
  Tensor x = Tensor::from(point.shape(), std::vector<double>(point.values().begin(), point.values().end()), true);
  return grad_check([&] { return f(x); }, {x}, h);
}

}  // namespace suppax
