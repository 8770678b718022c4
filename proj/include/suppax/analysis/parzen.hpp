// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "suppax/errors.hpp"
#include "suppax/matrix.hpp"

namespace suppax::analysis {

/// Mean log-likelihood (nats per test point) of a Gaussian Parzen window
/// fitted to generated samples, with the standard error of that mean.
struct ParzenEstimate {
  double mean_loglik = 0.0;
  double sem = 0.0;
  double bandwidth = 0.0;
  std::size_t n_test = 0;
};

/// log((1/m) sum_i N(x; s_i, sigma^2 I)) for one point, via log-sum-exp.
inline double parzen_point_loglik(const Matrix& samples, std::span<const double> x, double sigma,
                                  std::vector<double>& scratch) {
  const std::size_t m = samples.rows, d = samples.cols;
  scratch.resize(m);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double mx = -INFINITY;
  for (std::size_t i = 0; i < m; ++i) {
    const double* s = samples.values.data() + i * d;
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = x[k] - s[k];
      sq += diff * diff;
    }
    scratch[i] = -sq * inv;
    mx = std::max(mx, scratch[i]);
  }
  double acc = 0.0;
  for (double v : scratch) acc += std::exp(v - mx);
  const double log_norm = 0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi * sigma * sigma);
  return mx + std::log(acc) - std::log(static_cast<double>(m)) - log_norm;
}

inline ParzenEstimate parzen_loglik(const Matrix& samples, const Matrix& test, double sigma) {
  if (!(sigma > 0.0)) throw ContractError("parzen_loglik: sigma must be positive");
  if (samples.rows == 0) throw ContractError("parzen_loglik: empty sample set");
  if (test.rows == 0) throw ContractError("parzen_loglik: empty test set");
  if (samples.cols != test.cols) throw DimensionError("parzen_loglik: sample and test dimensions differ");
  std::vector<double> scratch;
  std::vector<double> ll(test.rows);
  for (std::size_t t = 0; t < test.rows; ++t) ll[t] = parzen_point_loglik(samples, test.row(t), sigma, scratch);
  // Sort before summing so the result does not depend on test-point order.
  std::sort(ll.begin(), ll.end());
  double sum = 0.0;
  for (double v : ll) sum += v;
  const double n = static_cast<double>(ll.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : ll) ss += (v - mean) * (v - mean);
  ParzenEstimate est;
  est.mean_loglik = mean;
  est.sem = ll.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  est.bandwidth = sigma;
  est.n_test = ll.size();
  if (!std::isfinite(est.mean_loglik) || !std::isfinite(est.sem)) throw NumericError("parzen_loglik: non-finite estimate");
  return est;
}

/// Grid sigma maximizing the validation log-likelihood; ties go to the smaller sigma.
inline double select_bandwidth(const Matrix& samples, const Matrix& validation, std::vector<double> sigma_grid) {
  if (sigma_grid.empty()) throw ContractError("select_bandwidth: empty sigma grid");
  std::sort(sigma_grid.begin(), sigma_grid.end());
  double best_sigma = sigma_grid.front();
  double best = -INFINITY;
  for (double s : sigma_grid) {
    if (!(s > 0.0)) throw ContractError("select_bandwidth: sigmas must be positive");
    const double ll = parzen_loglik(samples, validation, s).mean_loglik;
    if (ll > best) {
      best = ll;
      best_sigma = s;
    }
  }
  return best_sigma;
}

/// Log-spaced grid of `count` sigmas from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> g;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    g.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
  }
  return g;
}

}  // namespace suppax::analysis
