// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0
//
// Multilayer perceptrons with optional supplementary-axis injection.
//
// A network is a chain of dense layers h -> act(h W + b) with W stored
// in_dim x out_dim. An injection either concatenates externally supplied
// coordinates at a site (feature source) or widens the network there with
// free nodes that carry no outside information (free source):
//
//   site input,           feature : x -> [x | s] before layer 0
//   site input,           free    : x -> [x | c] with c a learned constant row
//   site after_hidden(k), feature : h_k -> [h_k | s] before layer k
//   site after_hidden(k), free    : hidden layer k gets `width` extra units

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "suppax/autograd.hpp"
#include "suppax/data.hpp"
#include "suppax/errors.hpp"
#include "suppax/rng.hpp"

namespace suppax {

enum class Activation : std::uint32_t { relu = 0, identity = 1, sigmoid = 2 };

struct LayerSpec {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  Activation activation = Activation::relu;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct InjectionSite {
  enum class Kind : std::uint32_t { input = 0, after_hidden = 1 };
  Kind kind = Kind::after_hidden;
  std::size_t layer = 1;  // hidden layer index (1-based) for after_hidden; ignored for input

  static InjectionSite input() { return {Kind::input, 0}; }
  static InjectionSite after_hidden(std::size_t k) { return {Kind::after_hidden, k}; }

  friend bool operator==(const InjectionSite&, const InjectionSite&) = default;
};

struct InjectionSpec {
  InjectionSite site;
  std::size_t width = 1;
  std::optional<FeatureKind> feature;  // nullopt: free nodes

  bool is_feature() const { return feature.has_value(); }
  friend bool operator==(const InjectionSpec&, const InjectionSpec&) = default;
};

struct Layer {
  LayerSpec spec;
  Tensor weight;  // in_dim x out_dim
  Tensor bias;    // 1 x out_dim
};

class Network {
 public:
  Network() = default;

  /// `layers` are the final (post-injection) layer shapes. Parameters start at zero.
  Network(std::vector<LayerSpec> layers, std::optional<InjectionSpec> injection) : injection_(injection) {
    if (layers.empty()) throw ConfigError("network: at least one layer required");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& s = layers[l];
      if (s.in_dim == 0 || s.out_dim == 0) throw ConfigError("network: layer dimensions must be positive");
      if (l > 0) {
        std::size_t expected = layers[l - 1].out_dim;
        if (injection_ && injection_->is_feature() && injection_->site.kind == InjectionSite::Kind::after_hidden &&
            injection_->site.layer == l) {
          expected += injection_->width;
        }
        if (s.in_dim != expected) {
          throw ConfigError("network: layer " + std::to_string(l) + " consumes " + std::to_string(s.in_dim) +
                            " inputs, previous stage provides " + std::to_string(expected));
        }
      }
      layers_.push_back({s, Tensor::zeros({s.in_dim, s.out_dim}, true), Tensor::zeros({1, s.out_dim}, true)});
    }
    if (injection_) {
      const auto& inj = *injection_;
      if (inj.is_feature() && inj.width == 0) throw ConfigError("injection: feature source needs width >= 1");
      if (inj.site.kind == InjectionSite::Kind::after_hidden &&
          (inj.site.layer == 0 || inj.site.layer >= layers_.size())) {
        throw ConfigError("injection: after_hidden(" + std::to_string(inj.site.layer) +
                          ") is not a hidden layer of a depth-" + std::to_string(layers_.size()) + " network");
      }
      if (!inj.is_feature() && inj.site.kind == InjectionSite::Kind::input && inj.width > 0) {
        free_inputs_ = Tensor::zeros({1, inj.width}, true);
      }
    }
  }

  Network(const Network& other) : layers_(other.layers_), injection_(other.injection_), free_inputs_(other.free_inputs_) {
    for (auto& l : layers_) {
      l.weight = l.weight.clone();
      l.bias = l.bias.clone();
    }
    if (free_inputs_.defined()) free_inputs_ = free_inputs_.clone();
  }
  Network& operator=(const Network& other) {
    if (this != &other) *this = Network(other);
    return *this;
  }
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::optional<InjectionSpec>& injection() const { return injection_; }
  std::size_t depth() const { return layers_.size(); }

  /// Width of the raw input x, excluding injected or free coordinates.
  std::size_t input_dim() const {
    std::size_t d = layers_.front().spec.in_dim;
    if (injection_ && injection_->site.kind == InjectionSite::Kind::input) d -= injection_->width;
    return d;
  }
  std::size_t output_dim() const { return layers_.back().spec.out_dim; }

  /// Width of the supplementary tensor forward() expects (0 when none).
  std::size_t supplementary_width() const { return injection_ && injection_->is_feature() ? injection_->width : 0; }

  /// Learned constant inputs of an input-site free injection (undefined otherwise).
  const Tensor& free_inputs() const { return free_inputs_; }
  Tensor& free_inputs() { return free_inputs_; }

  std::vector<Tensor> parameters() const {
    std::vector<Tensor> out;
    for (const auto& l : layers_) {
      out.push_back(l.weight);
      out.push_back(l.bias);
    }
    if (free_inputs_.defined()) out.push_back(free_inputs_);
    return out;
  }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& p : parameters()) n += p.size();
    return n;
  }

  void zero_grad() {
    for (auto& p : parameters()) p.zero_grad();
  }

  Tensor forward(const Tensor& batch) const { return forward_impl(batch, nullptr); }

  /// Logits for a b x input_dim batch; `supplementary` (b x w) is concatenated
  /// unchanged at the injection site.
  Tensor forward(const Tensor& batch, const Tensor& supplementary) const { return forward_impl(batch, &supplementary); }

  /// Logits, with each hidden layer's pre-activations appended to `preacts`.
  Tensor forward_traced(const Tensor& batch, const Tensor* supplementary, std::vector<Tensor>& preacts) const {
    return forward_impl(batch, supplementary, &preacts);
  }

 private:
  Tensor forward_impl(const Tensor& batch, const Tensor* supp, std::vector<Tensor>* preacts = nullptr) const {
    if (batch.shape().size() != 2 || batch.cols() != input_dim()) {
      throw DimensionError("forward: batch " + shape_str(batch.shape()) + " but network input width is " +
                           std::to_string(input_dim()));
    }
    const std::size_t w = supplementary_width();
    if (w > 0 && supp == nullptr) throw ContractError("forward: network requires a supplementary tensor");
    if (w == 0 && supp != nullptr) throw ContractError("forward: network takes no supplementary tensor");
    if (supp != nullptr && (supp->shape().size() != 2 || supp->cols() != w || supp->rows() != batch.rows())) {
      throw DimensionError("forward: supplementary " + shape_str(supp->shape()) + " does not match " +
                           std::to_string(batch.rows()) + "x" + std::to_string(w));
    }
    const bool input_site = injection_ && injection_->site.kind == InjectionSite::Kind::input;
    Tensor h = batch;
    if (input_site && supp != nullptr) h = concat(h, *supp);
    if (input_site && free_inputs_.defined()) h = concat(h, broadcast_rows(free_inputs_, batch.rows()));
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      if (supp != nullptr && !input_site && injection_->site.layer == l) h = concat(h, *supp);
      const auto& layer = layers_[l];
      Tensor z = add_bias(matmul(h, layer.weight), layer.bias);
      if (preacts && l + 1 < layers_.size()) preacts->push_back(z);
      switch (layer.spec.activation) {
        case Activation::relu: h = relu(z); break;
        case Activation::sigmoid: h = sigmoid(z); break;
        case Activation::identity: h = z; break;
      }
    }
    return h;
  }

  std::vector<Layer> layers_;
  std::optional<InjectionSpec> injection_;
  Tensor free_inputs_;
};

/// Builds an MLP over base widths dims = {n0, n1, ..., nL} (ReLU hidden
/// layers, `output` activation last) and applies the injection to it.
inline Network make_mlp(const std::vector<std::size_t>& dims, Activation output,
                        std::optional<InjectionSpec> injection = std::nullopt) {
  if (dims.size() < 2) throw ConfigError("make_mlp: need at least input and output widths");
  std::vector<LayerSpec> specs;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    specs.push_back({dims[l], dims[l + 1], l + 2 == dims.size() ? output : Activation::relu});
  }
  if (injection && injection->width > 0) {
    const auto& inj = *injection;
    if (inj.site.kind == InjectionSite::Kind::input) {
      specs[0].in_dim += inj.width;
    } else {
      const std::size_t k = inj.site.layer;
      if (k == 0 || k >= specs.size()) {
        throw ConfigError("make_mlp: injection site after_hidden(" + std::to_string(k) + ") out of range");
      }
      specs[k].in_dim += inj.width;
      if (!inj.is_feature()) specs[k - 1].out_dim += inj.width;
    }
  }
  return Network(std::move(specs), injection);
}

enum class ModelKind { A, B, C };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::A: return "A";
    case ModelKind::B: return "B";
    case ModelKind::C: return "C";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "A" || s == "a") return ModelKind::A;
  if (s == "B" || s == "b") return ModelKind::B;
  if (s == "C" || s == "c") return ModelKind::C;
  throw ConfigError("unknown model kind '" + std::string(s) + "'");
}

/// Model A: 2 -> H -> 2. Model B: A plus one injected feature node at `site`.
/// Model C: A plus one free node at `site`.
inline Network build_model(ModelKind kind, std::size_t base_hidden, std::optional<FeatureKind> feature,
                           InjectionSite site = InjectionSite::after_hidden(1)) {
  if (base_hidden == 0) throw ConfigError("build_model: hidden width must be positive");
  if (kind == ModelKind::B && !feature) throw ConfigError("build_model: model B requires a feature");
  if (kind != ModelKind::B && feature) {
    throw ConfigError("build_model: model " + std::string(to_string(kind)) + " takes no feature");
  }
  const std::vector<std::size_t> dims{2, base_hidden, 2};
  switch (kind) {
    case ModelKind::A: return make_mlp(dims, Activation::identity);
    case ModelKind::B: return make_mlp(dims, Activation::identity, InjectionSpec{site, 1, feature});
    case ModelKind::C: return make_mlp(dims, Activation::identity, InjectionSpec{site, 1, std::nullopt});
  }
  throw ConfigError("build_model: bad kind");
}

enum class InitScheme { uniform_he, normal_he };

/// He-scaled weights (variance 2 / fan_in), zero biases. Unit j of layer l
/// draws its incoming weights, in input order, from its own stream
/// derive_seed(derive_seed(seed, l), j); networks that share a layer prefix
/// therefore share those initial weights.
inline void init_params(Network& net, std::uint64_t seed, InitScheme scheme = InitScheme::normal_he) {
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::size_t fan_in = layers[l].spec.in_dim, out = layers[l].spec.out_dim;
    const double var = 2.0 / static_cast<double>(fan_in);
    auto w = layers[l].weight.mutable_values();
    const std::uint64_t layer_seed = derive_seed(seed, l);
    for (std::size_t j = 0; j < out; ++j) {
      Rng rng = make_rng(derive_seed(layer_seed, j));
      for (std::size_t i = 0; i < fan_in; ++i) {
        double v = 0.0;
        if (scheme == InitScheme::normal_he) {
          v = std::sqrt(var) * standard_normal(rng);
        } else {
          const double a = std::sqrt(3.0 * var);
          v = uniform(rng, -a, a);
        }
        w[i * out + j] = v;
      }
    }
    auto b = layers[l].bias.mutable_values();
    std::fill(b.begin(), b.end(), 0.0);
  }
  if (net.free_inputs().defined()) {
    Rng rng = make_rng(derive_seed(seed, 1000003));
    for (auto& v : net.free_inputs().mutable_values()) v = uniform(rng, -1.0, 1.0);
  }
}

enum class OptimizerKind { sgd, adam };

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t steps = 0;

  static OptimizerState sgd(double lr) {
    OptimizerState s;
    s.kind = OptimizerKind::sgd;
    s.learning_rate = lr;
    return s;
  }
  static OptimizerState adam(double lr, double beta1 = 0.9, double beta2 = 0.999) {
    OptimizerState s;
    s.learning_rate = lr;
    s.beta1 = beta1;
    s.beta2 = beta2;
    return s;
  }
};

/// One in-place update of `params` from their populated gradients.
inline void step(OptimizerState& opt, std::vector<Tensor> params) {
  for (const auto& p : params) {
    if (!p.has_grad()) throw ContractError("step: parameter has no gradient; run backward first");
  }
  ++opt.steps;
  if (opt.kind == OptimizerKind::sgd) {
    for (auto& p : params) {
      auto vals = p.mutable_values();
      auto g = p.grad();
      for (std::size_t i = 0; i < vals.size(); ++i) vals[i] -= opt.learning_rate * g[i];
    }
    return;
  }
  if (opt.m.empty()) {
    for (const auto& p : params) {
      opt.m.emplace_back(p.size(), 0.0);
      opt.v.emplace_back(p.size(), 0.0);
    }
  }
  if (opt.m.size() != params.size()) throw ContractError("step: parameter list changed between steps");
  const double t = static_cast<double>(opt.steps);
  const double c1 = 1.0 - std::pow(opt.beta1, t);
  const double c2 = 1.0 - std::pow(opt.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto vals = params[k].mutable_values();
    auto g = params[k].grad();
    auto& m = opt.m[k];
    auto& v = opt.v[k];
    if (m.size() != vals.size()) throw ContractError("step: moment shape differs from parameter shape");
    for (std::size_t i = 0; i < vals.size(); ++i) {
      m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * g[i];
      v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * g[i] * g[i];
      vals[i] -= opt.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + opt.eps);
    }
  }
}

inline void step(OptimizerState& opt, Network& net) { step(opt, net.parameters()); }

/// Supplementary tensor a network needs for `ds` (undefined when none):
/// the dataset's own supplementary or condition channel, or the pointwise
/// feature evaluated on its inputs.
inline Tensor supplementary_for(const Network& net, const LabeledDataset& ds) {
  if (net.supplementary_width() == 0) return {};
  const auto feature = *net.injection()->feature;
  if (feature == FeatureKind::condition) {
    if (!ds.conditions) throw ConfigError("dataset has no condition channel");
    return Tensor::from_matrix(*ds.conditions);
  }
  if (ds.supplementary) {
    if (ds.supplementary->cols != net.supplementary_width()) throw DimensionError("supplementary width mismatch");
    return Tensor::from_matrix(*ds.supplementary);
  }
  if (is_pointwise(feature)) return Tensor::from_matrix(feature_eval(feature, ds.inputs));
  throw ConfigError("dataset has no supplementary channel for feature '" + std::string(to_string(feature)) + "'");
}

inline Tensor forward(const Network& net, const Tensor& batch, const Tensor& supplementary) {
  return supplementary.defined() ? net.forward(batch, supplementary) : net.forward(batch);
}

/// Argmax of each logit row; ties go to the lower class index.
inline std::vector<int> argmax_rows(const Tensor& logits) {
  std::vector<int> out(logits.rows());
  const std::size_t c = logits.cols();
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < c; ++j)
      if (logits(i, j) > logits(i, best)) best = j;
    out[i] = static_cast<int>(best);
  }
  return out;
}

/// Fraction of rows whose argmax logit differs from the label.
inline double error_rate(const Tensor& logits, std::span<const int> labels) {
  auto pred = argmax_rows(logits);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != labels[i];
  return pred.empty() ? 0.0 : static_cast<double>(wrong) / static_cast<double>(pred.size());
}

inline double training_error(const Network& net, const LabeledDataset& ds) {
  Tensor x = Tensor::from_matrix(ds.inputs);
  return error_rate(forward(net, x, supplementary_for(net, ds)), ds.labels);
}

}  // namespace suppax
