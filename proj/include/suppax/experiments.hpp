// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0
//
// Multi-seed replication harness for model A/B/C comparisons.
//
// Every model kind trains on the same dataset instance. Run i of every kind
// is initialized from derive_seed(master_seed, i), and init_params draws
// per-unit streams, so layers with matching shapes start identical across
// kinds. Statistics use the population convention (divide by R).

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <utility>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "suppax/data.hpp"
#include "suppax/errors.hpp"
#include "suppax/nn.hpp"
#include "suppax/rng.hpp"

namespace suppax::experiments {

enum class DatasetKind { type1, type2, patch };

inline std::string_view to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::type1: return "type1";
    case DatasetKind::type2: return "type2";
    case DatasetKind::patch: return "patch";
  }
  return "?";
}

inline DatasetKind parse_dataset_kind(std::string_view s) {
  if (s == "type1") return DatasetKind::type1;
  if (s == "type2") return DatasetKind::type2;
  if (s == "patch") return DatasetKind::patch;
  throw ConfigError("unknown dataset '" + std::string(s) + "' (expected type1, type2 or patch)");
}

struct DatasetSpec {
  DatasetKind kind = DatasetKind::type1;
  std::size_t n_per_class = 100;
  double noise = 0.05;       // Gaussian jitter (type1, type2) or patch descriptor noise
  std::size_t stripes = 4;   // type2 only
  std::uint64_t seed = 1;
};

inline LabeledDataset make_dataset(const DatasetSpec& spec) {
  switch (spec.kind) {
    case DatasetKind::type1: return gen_type1(spec.n_per_class, spec.noise, spec.seed);
    case DatasetKind::type2: return gen_type2(spec.n_per_class, spec.stripes, spec.noise, spec.seed);
    case DatasetKind::patch: return gen_patch_task(2 * spec.n_per_class, spec.noise, spec.seed);
  }
  throw ConfigError("make_dataset: bad kind");
}

struct ExperimentConfig {
  DatasetSpec data;
  std::vector<ModelKind> models{ModelKind::A, ModelKind::B, ModelKind::C};
  std::optional<FeatureKind> feature;  // injected into model B
  std::size_t base_hidden = 3;
  InjectionSite site = InjectionSite::after_hidden(1);
  std::size_t runs = 100;
  std::size_t epochs = 2000;
  OptimizerKind optimizer = OptimizerKind::sgd;
  double learning_rate = 1e-2;
  std::size_t batch_size = 0;  // 0: full batch
  InitScheme init = InitScheme::normal_he;
  std::uint64_t master_seed = 0;
  std::size_t record_every = 1;
  std::size_t threads = 0;  // 0: SUPPAX_THREADS or hardware concurrency

  void validate() const {
    if (runs < 1) throw ConfigError("experiment: runs must be >= 1");
    if (epochs < 1) throw ConfigError("experiment: epochs must be >= 1");
    if (record_every < 1) throw ConfigError("experiment: record_every must be >= 1");
    if (models.empty()) throw ConfigError("experiment: no model kinds selected");
    if (!(learning_rate > 0.0)) throw ConfigError("experiment: learning rate must be positive");
    const bool has_b = std::find(models.begin(), models.end(), ModelKind::B) != models.end();
    if (has_b && !feature) throw ConfigError("experiment: model B requires a feature");
    if (feature) {
      if (*feature == FeatureKind::condition) throw ConfigError("experiment: 'condition' is not a toy feature");
      if ((*feature == FeatureKind::landmark) != (data.kind == DatasetKind::patch)) {
        throw ConfigError("experiment: the landmark feature exists only on the patch dataset");
      }
    }
  }
};

struct ModelSeries {
  ModelKind kind = ModelKind::A;
  std::vector<double> mean;       // per recorded epoch
  std::vector<double> std;        // population std per recorded epoch
  std::vector<double> mean_loss;  // per recorded epoch
  std::vector<double> final_errors;  // one per run
};

struct StatsSeries {
  std::vector<std::size_t> epochs;  // recorded epoch numbers (1-based)
  std::vector<ModelSeries> models;
};

struct RunResult {
  std::vector<double> errors;
  std::vector<double> losses;
  double final_error = 0.0;
  Network network;
};

inline std::size_t worker_count(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SUPPAX_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

inline std::vector<std::size_t> recorded_epochs(const ExperimentConfig& cfg) {
  std::vector<std::size_t> out;
  for (std::size_t e = 1; e <= cfg.epochs; ++e)
    if (e % cfg.record_every == 0 || e == cfg.epochs) out.push_back(e);
  return out;
}

/// Trains one model kind from the run's seed and records training error.
inline RunResult train_run(const ExperimentConfig& cfg, ModelKind kind, std::size_t run, const LabeledDataset& ds) {
  Network net = build_model(kind, cfg.base_hidden, kind == ModelKind::B ? cfg.feature : std::nullopt, cfg.site);
  const std::uint64_t seed = derive_seed(cfg.master_seed, run);
  init_params(net, seed, cfg.init);
  OptimizerState opt = cfg.optimizer == OptimizerKind::adam ? OptimizerState::adam(cfg.learning_rate)
                                                            : OptimizerState::sgd(cfg.learning_rate);
  const Tensor x = Tensor::from_matrix(ds.inputs);
  const Tensor supp = supplementary_for(net, ds);
  RunResult res;
  auto recording = [&](std::size_t e) { return e % cfg.record_every == 0 || e == cfg.epochs; };
  auto record = [&](const Tensor& logits) {
    res.errors.push_back(error_rate(logits, ds.labels));
    res.losses.push_back(softmax_cross_entropy(logits.detach(), ds.labels).item());
  };

  if (cfg.batch_size == 0 || cfg.batch_size >= ds.size()) {
    // The forward pass of epoch e sees the parameters left by epoch e-1, so
    // it doubles as the record for e-1.
    for (std::size_t e = 1; e <= cfg.epochs; ++e) {
      Tensor logits = forward(net, x, supp);
      if (e > 1 && recording(e - 1)) record(logits);
      net.zero_grad();
      backward(softmax_cross_entropy(logits, ds.labels));
      step(opt, net);
    }
  } else {
    Rng rng = make_rng(derive_seed(seed, 7));
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t e = 1; e <= cfg.epochs; ++e) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
        const std::size_t end = std::min(order.size(), start + cfg.batch_size);
        std::span<const std::size_t> idx(order.data() + start, end - start);
        std::vector<int> labels;
        for (auto i : idx) labels.push_back(ds.labels[i]);
        Tensor xb = Tensor::from_matrix(gather_rows(ds.inputs, idx));
        Tensor sb = supp.defined() ? Tensor::from_matrix(gather_rows(supp.to_matrix(), idx)) : Tensor{};
        net.zero_grad();
        backward(softmax_cross_entropy(forward(net, xb, sb), labels));
        step(opt, net);
      }
      if (e < cfg.epochs && recording(e)) record(forward(net, x, supp));
    }
  }
  record(forward(net, x, supp));
  res.final_error = res.errors.back();
  res.network = std::move(net);
  return res;
}

struct ComparisonResult {
  StatsSeries series;
  std::vector<Network> first_run_networks;  // run 0 of each model kind, in cfg.models order
};

inline ComparisonResult run_comparison_detailed(const ExperimentConfig& cfg) {
  cfg.validate();
  const LabeledDataset ds = make_dataset(cfg.data);
  const std::size_t kinds = cfg.models.size(), runs = cfg.runs;
  std::vector<RunResult> results(kinds * runs);
  parallel_for(kinds * runs, worker_count(cfg.threads), [&](std::size_t job) {
    results[job] = train_run(cfg, cfg.models[job / runs], job % runs, ds);
    if (job % runs != 0) results[job].network = Network{};
  });

  ComparisonResult out;
  out.series.epochs = recorded_epochs(cfg);
  const std::size_t points = out.series.epochs.size();
  for (std::size_t k = 0; k < kinds; ++k) {
    ModelSeries ms;
    ms.kind = cfg.models[k];
    ms.mean.assign(points, 0.0);
    ms.std.assign(points, 0.0);
    ms.mean_loss.assign(points, 0.0);
    for (std::size_t p = 0; p < points; ++p) {
      double s = 0.0, l = 0.0;
      for (std::size_t r = 0; r < runs; ++r) {
        s += results[k * runs + r].errors[p];
        l += results[k * runs + r].losses[p];
      }
      const double m = s / static_cast<double>(runs);
      double ss = 0.0;
      for (std::size_t r = 0; r < runs; ++r) ss += std::pow(results[k * runs + r].errors[p] - m, 2);
      ms.mean[p] = m;
      ms.std[p] = std::sqrt(ss / static_cast<double>(runs));
      ms.mean_loss[p] = l / static_cast<double>(runs);
    }
    for (std::size_t r = 0; r < runs; ++r) ms.final_errors.push_back(results[k * runs + r].final_error);
    out.series.models.push_back(std::move(ms));
    out.first_run_networks.push_back(std::move(results[k * runs].network));
  }
  return out;
}

inline StatsSeries run_comparison(const ExperimentConfig& cfg) { return run_comparison_detailed(cfg).series; }

inline const std::vector<double>& error_thresholds() {
  static const std::vector<double> t{0.05, 0.1, 0.3};
  return t;
}

struct ModelSummary {
  ModelKind kind = ModelKind::A;
  double final_mean = 0.0;
  double final_std = 0.0;
  std::vector<std::pair<double, double>> fraction_below;  // (threshold, fraction of runs with error < threshold)
};

inline std::vector<ModelSummary> summarize(const StatsSeries& series) {
  std::vector<ModelSummary> out;
  for (const auto& ms : series.models) {
    ModelSummary s;
    s.kind = ms.kind;
    const auto& f = ms.final_errors;
    const double n = static_cast<double>(f.size());
    if (!f.empty()) {
      s.final_mean = std::accumulate(f.begin(), f.end(), 0.0) / n;
      double ss = 0.0;
      for (double v : f) ss += (v - s.final_mean) * (v - s.final_mean);
      s.final_std = std::sqrt(ss / n);
    }
    for (double t : error_thresholds()) {
      const auto below = std::count_if(f.begin(), f.end(), [t](double v) { return v < t; });
      s.fraction_below.emplace_back(t, f.empty() ? 0.0 : static_cast<double>(below) / n);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace suppax::experiments
