// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations for tests. Nothing here calls into the
// code under test except to read tensor values.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// Central differences of a plain function of a flat vector.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8}); }

inline double max_rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_err(a[i], b[i]));
  return worst;
}

/// Row-major m x k times k x n.
inline std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, std::size_t m,
                                  std::size_t k, std::size_t n) {
  std::vector<double> c(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t t = 0; t < k; ++t) c[i * n + j] += a[i * k + t] * b[t * n + j];
  return c;
}

/// Mean softmax cross-entropy in the textbook form (no stabilization); fine for small logits.
inline double softmax_xent(const std::vector<double>& z, const std::vector<int>& labels, std::size_t c) {
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double denom = 0.0;
    for (std::size_t j = 0; j < c; ++j) denom += std::exp(z[i * c + j]);
    total += -std::log(std::exp(z[i * c + labels[i]]) / denom);
  }
  return total / static_cast<double>(labels.size());
}

/// Mean binary cross-entropy via the probability form.
inline double bce(const std::vector<double>& z, const std::vector<double>& t) {
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-z[i]));
    total += -(t[i] * std::log(p) + (1 - t[i]) * std::log(1 - p));
  }
  return total / static_cast<double>(z.size());
}

/// Brute-force Parzen: plain double loop, direct exp/log, no log-sum-exp.
/// Only valid when densities do not underflow.
inline double parzen_mean(const std::vector<std::vector<double>>& samples, const std::vector<std::vector<double>>& test,
                          double sigma) {
  const double d = static_cast<double>(test.front().size());
  const double norm = std::pow(2 * std::numbers::pi * sigma * sigma, -d / 2);
  double total = 0.0;
  for (const auto& x : test) {
    double density = 0.0;
    for (const auto& s : samples) {
      double r2 = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) r2 += (x[k] - s[k]) * (x[k] - s[k]);
      density += norm * std::exp(-r2 / (2 * sigma * sigma));
    }
    total += std::log(density / static_cast<double>(samples.size()));
  }
  return total / static_cast<double>(test.size());
}

/// Brute-force region count of a line arrangement inside a box: labels a
/// fine grid by sign vector and counts distinct vectors. Used only where
/// every face is much larger than a grid cell.
inline std::size_t sign_vector_count(const std::vector<std::array<double, 3>>& lines, double lo, double hi,
                                     std::size_t res) {
  std::vector<std::vector<bool>> seen;
  for (std::size_t iy = 0; iy < res; ++iy) {
    for (std::size_t ix = 0; ix < res; ++ix) {
      const double x = lo + (ix + 0.5) * (hi - lo) / res, y = lo + (iy + 0.5) * (hi - lo) / res;
      std::vector<bool> v;
      for (const auto& l : lines) v.push_back(l[0] * x + l[1] * y + l[2] > 0);
      if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
    }
  }
  return seen.size();
}

}  // namespace oracle
