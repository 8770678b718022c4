// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0
//
// GAN and conditional GAN on MLPs. The discriminator outputs one logit and
// both adversarial objectives are evaluated through bce_logits. In the
// conditional variant the one-hot condition y is concatenated to the input
// of both networks (an input-site feature injection), so D sees (x | y) and
// G sees (z | y).

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "suppax/autograd.hpp"
#include "suppax/data.hpp"
#include "suppax/errors.hpp"
#include "suppax/nn.hpp"
#include "suppax/rng.hpp"

namespace suppax::gan {

struct GanPair {
  Network generator;      // (z | y) -> data
  Network discriminator;  // (x | y) -> 1 logit
  std::size_t z_dim = 0;
  std::size_t cond_dim = 0;  // 0 for a plain GAN
  std::size_t data_dim = 0;
};

/// Builds G: z_dim [+cond] -> g_hidden... -> data_dim and D: data_dim [+cond]
/// -> d_hidden... -> 1, both He-initialized from `seed`.
inline GanPair make_gan_pair(std::size_t data_dim, std::size_t z_dim, std::size_t cond_dim,
                             const std::vector<std::size_t>& g_hidden, const std::vector<std::size_t>& d_hidden,
                             Activation g_output, std::uint64_t seed) {
  if (data_dim == 0 || z_dim == 0) throw ConfigError("make_gan_pair: data_dim and z_dim must be positive");
  std::optional<InjectionSpec> cond;
  if (cond_dim > 0) cond = InjectionSpec{InjectionSite::input(), cond_dim, FeatureKind::condition};
  std::vector<std::size_t> gd{z_dim};
  gd.insert(gd.end(), g_hidden.begin(), g_hidden.end());
  gd.push_back(data_dim);
  std::vector<std::size_t> dd{data_dim};
  dd.insert(dd.end(), d_hidden.begin(), d_hidden.end());
  dd.push_back(1);
  GanPair pair{make_mlp(gd, g_output, cond), make_mlp(dd, Activation::identity, cond), z_dim, cond_dim, data_dim};
  init_params(pair.generator, derive_seed(seed, 0));
  init_params(pair.discriminator, derive_seed(seed, 1));
  return pair;
}

enum class GeneratorLoss { minimax, non_saturating };

struct GanTrainConfig {
  std::size_t batch_size = 128;
  std::size_t d_steps_per_g_step = 1;
  double g_learning_rate = 1e-3;
  double d_learning_rate = 1e-3;
  double beta1 = 0.5;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  GeneratorLoss generator_loss = GeneratorLoss::non_saturating;
};

struct StepLosses {
  double d_loss = 0.0;
  double g_loss = 0.0;
};

class GanTrainer {
 public:
  GanTrainer(GanPair pair, GanTrainConfig cfg)
      : pair_(std::move(pair)),
        cfg_(cfg),
        g_opt_(OptimizerState::adam(cfg.g_learning_rate, cfg.beta1)),
        d_opt_(OptimizerState::adam(cfg.d_learning_rate, cfg.beta1)) {
    if (cfg_.batch_size == 0 || cfg_.d_steps_per_g_step == 0 || cfg_.epochs == 0) {
      throw ConfigError("GanTrainConfig: batch_size, d_steps_per_g_step and epochs must be positive");
    }
  }

  const GanPair& pair() const { return pair_; }
  GanPair& pair() { return pair_; }
  const GanTrainConfig& config() const { return cfg_; }
  OptimizerState& g_opt() { return g_opt_; }
  OptimizerState& d_opt() { return d_opt_; }

 private:
  GanPair pair_;
  GanTrainConfig cfg_;
  OptimizerState g_opt_;
  OptimizerState d_opt_;
};

namespace detail {

inline Tensor noise(std::size_t n, std::size_t z_dim, Rng& rng) {
  std::vector<double> z(n * z_dim);
  for (auto& v : z) v = standard_normal(rng);
  return Tensor::from({n, z_dim}, std::move(z));
}

inline Tensor apply(const Network& net, const Tensor& x, const Tensor& cond) {
  return cond.defined() ? net.forward(x, cond) : net.forward(x);
}

inline Tensor constant(std::size_t n, double v) { return Tensor::from({n, 1}, std::vector<double>(n, v)); }

inline StepLosses adversarial_step(GanTrainer& tr, const Matrix& real_batch, const Tensor& cond, Rng& rng) {
  auto& pair = tr.pair();
  const auto& cfg = tr.config();
  const std::size_t b = real_batch.rows;
  if (b == 0) throw ContractError("gan_step: empty batch");
  if (real_batch.cols != pair.data_dim) throw DimensionError("gan_step: batch width differs from data dimension");
  const Tensor real = Tensor::from_matrix(real_batch);
  StepLosses out;

  for (std::size_t k = 0; k < cfg.d_steps_per_g_step; ++k) {
    Tensor fake = apply(pair.generator, noise(b, pair.z_dim, rng), cond).detach();
    Tensor d_real = apply(pair.discriminator, real, cond);
    Tensor d_fake = apply(pair.discriminator, fake, cond);
    Tensor d_loss = scale(add(bce_logits(d_real, constant(b, 1.0)), bce_logits(d_fake, constant(b, 0.0))), 0.5);
    pair.discriminator.zero_grad();
    backward(d_loss);
    step(tr.d_opt(), pair.discriminator);
    out.d_loss = d_loss.item();
  }

  Tensor fake = apply(pair.generator, noise(b, pair.z_dim, rng), cond);
  Tensor logits = apply(pair.discriminator, fake, cond);
  // minimax: minimize E log(1 - D(G(z))) = -bce(logits, 0)
  // non-saturating: minimize -E log D(G(z)) = bce(logits, 1)
  Tensor g_loss = cfg.generator_loss == GeneratorLoss::minimax ? scale(bce_logits(logits, constant(b, 0.0)), -1.0)
                                                              : bce_logits(logits, constant(b, 1.0));
  pair.generator.zero_grad();
  backward(g_loss);
  step(tr.g_opt(), pair.generator);
  out.g_loss = g_loss.item();
  return out;
}

}  // namespace detail

/// One round of the unconditional game: D on real (target 1) and G(z)
/// (target 0), then one G update. Only D changes in the first sub-step and
/// only G in the second.
inline StepLosses gan_step(GanTrainer& tr, const Matrix& real_batch, Rng& rng) {
  if (tr.pair().cond_dim != 0) throw ContractError("gan_step: pair is conditional; use cgan_step");
  return detail::adversarial_step(tr, real_batch, Tensor{}, rng);
}

/// gan_step with the condition y concatenated to both players: D(x|y), G(z|y).
inline StepLosses cgan_step(GanTrainer& tr, const Matrix& real_batch, const Matrix& conditions, Rng& rng) {
  const auto& pair = tr.pair();
  if (pair.cond_dim == 0) throw ContractError("cgan_step: pair has no condition input");
  if (conditions.cols != pair.cond_dim) {
    throw DimensionError("cgan_step: condition width " + std::to_string(conditions.cols) + " but pair expects " +
                         std::to_string(pair.cond_dim));
  }
  if (conditions.rows != real_batch.rows) throw DimensionError("cgan_step: condition rows differ from batch");
  return detail::adversarial_step(tr, real_batch, Tensor::from_matrix(conditions), rng);
}

/// Shuffled mini-batch training over `ds` for cfg.epochs. Uses the dataset's
/// one-hot conditions when the pair is conditional. Returns per-epoch mean losses.
inline std::vector<StepLosses> train(GanTrainer& tr, const LabeledDataset& ds) {
  const bool conditional = tr.pair().cond_dim > 0;
  if (conditional && !ds.conditions) throw ConfigError("train: conditional GAN needs a dataset with conditions");
  const auto& cfg = tr.config();
  Rng rng = make_rng(cfg.seed);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<StepLosses> history;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    StepLosses acc;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::span<const std::size_t> idx(order.data() + start, end - start);
      Matrix batch = gather_rows(ds.inputs, idx);
      StepLosses s = conditional ? cgan_step(tr, batch, gather_rows(*ds.conditions, idx), rng) : gan_step(tr, batch, rng);
      acc.d_loss += s.d_loss;
      acc.g_loss += s.g_loss;
      ++steps;
    }
    acc.d_loss /= static_cast<double>(steps);
    acc.g_loss /= static_cast<double>(steps);
    history.push_back(acc);
  }
  return history;
}

/// n generated rows, z ~ N(0, I) drawn from `seed`; `condition` is one
/// one-hot row applied to every sample and must be present iff cond_dim > 0.
inline Matrix sample(const GanPair& pair, std::size_t n, const std::optional<std::vector<double>>& condition,
                     std::uint64_t seed) {
  if ((pair.cond_dim > 0) != condition.has_value()) {
    throw ContractError(pair.cond_dim > 0 ? "sample: conditional pair requires a condition"
                                          : "sample: unconditional pair takes no condition");
  }
  Rng rng = make_rng(seed);
  Tensor z = detail::noise(n, pair.z_dim, rng);
  if (!condition) return pair.generator.forward(z).to_matrix();
  if (condition->size() != pair.cond_dim) throw DimensionError("sample: condition width mismatch");
  Matrix cond(n, pair.cond_dim);
  for (std::size_t i = 0; i < n; ++i) std::copy(condition->begin(), condition->end(), cond.row(i).begin());
  return pair.generator.forward(z, Tensor::from_matrix(cond)).to_matrix();
}

/// One generated row per condition row (each row one-hot).
inline Matrix sample_conditions(const GanPair& pair, const Matrix& conditions, std::uint64_t seed) {
  if (pair.cond_dim == 0) throw ContractError("sample_conditions: pair has no condition input");
  if (conditions.cols != pair.cond_dim) throw DimensionError("sample_conditions: condition width mismatch");
  Rng rng = make_rng(seed);
  Tensor z = detail::noise(conditions.rows, pair.z_dim, rng);
  return pair.generator.forward(z, Tensor::from_matrix(conditions)).to_matrix();
}

inline std::vector<double> one_hot_row(std::size_t k, std::size_t width) {
  std::vector<double> r(width, 0.0);
  r.at(k) = 1.0;
  return r;
}

/// n generated rows; a conditional pair cycles through its conditions
/// (row i gets class i mod cond_dim) so every class is equally represented.
inline Matrix sample_balanced(const GanPair& pair, std::size_t n, std::uint64_t seed) {
  if (pair.cond_dim == 0) return sample(pair, n, std::nullopt, seed);
  Matrix cond(n, pair.cond_dim);
  for (std::size_t i = 0; i < n; ++i) cond(i, i % pair.cond_dim) = 1.0;
  return sample_conditions(pair, cond, seed);
}

/// Fraction of samples generated under condition k whose nearest mixture
/// center is k, over `per_mode` samples for each of the `modes` conditions.
inline double mode_accuracy(const GanPair& pair, std::size_t modes, double radius, std::size_t per_mode,
                            std::uint64_t seed) {
  if (pair.cond_dim != modes || pair.data_dim != 2) {
    throw ContractError("mode_accuracy: needs a 2-D conditional pair with one condition per mode");
  }
  std::size_t hits = 0;
  for (std::size_t k = 0; k < modes; ++k) {
    const Matrix s = sample(pair, per_mode, one_hot_row(k, modes), derive_seed(seed, k));
    for (std::size_t i = 0; i < per_mode; ++i) hits += nearest_mode(s(i, 0), s(i, 1), modes, radius) == k;
  }
  return static_cast<double>(hits) / static_cast<double>(modes * per_mode);
}

}  // namespace suppax::gan
