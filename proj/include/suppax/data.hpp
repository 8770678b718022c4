// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0
//
// Toy datasets with optional supplementary channels. All generators are pure
// functions of their parameters and seed.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "suppax/errors.hpp"
#include "suppax/matrix.hpp"
#include "suppax/rng.hpp"

namespace suppax {

struct LabeledDataset {
  Matrix inputs;
  std::vector<int> labels;
  std::size_t num_classes = 2;
  std::optional<Matrix> conditions;     // one-hot, n x k
  std::optional<Matrix> supplementary;  // n x w

  std::size_t size() const { return inputs.rows; }

  void validate() const {
    if (labels.size() != inputs.rows) throw DimensionError("dataset: label count differs from input rows");
    for (int l : labels) {
      if (l < 0 || static_cast<std::size_t>(l) >= num_classes) throw IndexError("dataset: label out of range");
    }
    if (conditions) {
      if (conditions->rows != inputs.rows) throw DimensionError("dataset: condition rows differ from inputs");
      for (std::size_t r = 0; r < conditions->rows; ++r) {
        double s = 0.0;
        for (double v : conditions->row(r)) {
          if (v != 0.0 && v != 1.0) throw ContractError("dataset: condition row is not one-hot");
          s += v;
        }
        if (s != 1.0) throw ContractError("dataset: condition row is not one-hot");
      }
    }
    if (supplementary && supplementary->rows != inputs.rows) {
      throw DimensionError("dataset: supplementary rows differ from inputs");
    }
  }
};

enum class FeatureKind { distance, periodic, landmark, condition };

inline std::string_view to_string(FeatureKind f) {
  switch (f) {
    case FeatureKind::distance: return "distance";
    case FeatureKind::periodic: return "periodic";
    case FeatureKind::landmark: return "landmark";
    case FeatureKind::condition: return "condition";
  }
  return "?";
}

inline FeatureKind parse_feature(std::string_view name) {
  if (name == "distance") return FeatureKind::distance;
  if (name == "periodic") return FeatureKind::periodic;
  if (name == "landmark") return FeatureKind::landmark;
  if (name == "condition") return FeatureKind::condition;
  throw ConfigError("unknown feature '" + std::string(name) + "'");
}

/// True for features computable from a 2-D input point alone.
inline bool is_pointwise(FeatureKind f) { return f == FeatureKind::distance || f == FeatureKind::periodic; }

inline double feature_value(FeatureKind f, double x1, double x2) {
  switch (f) {
    case FeatureKind::distance: return std::sqrt(x1 * x1 + x2 * x2);
    case FeatureKind::periodic: return std::cos(x1 + x2);
    default: throw ConfigError("feature '" + std::string(to_string(f)) + "' is not a function of the input point");
  }
}

/// Rowwise feature of n x 2 inputs, as an n x 1 matrix.
inline Matrix feature_eval(FeatureKind f, const Matrix& inputs) {
  if (inputs.cols != 2) throw DimensionError("feature_eval: inputs must have 2 columns");
  Matrix out(inputs.rows, 1);
  for (std::size_t r = 0; r < inputs.rows; ++r) out(r, 0) = feature_value(f, inputs(r, 0), inputs(r, 1));
  return out;
}

/// Copy of `ds` with supplementary = feature(inputs).
inline LabeledDataset with_feature(LabeledDataset ds, FeatureKind f) {
  ds.supplementary = feature_eval(f, ds.inputs);
  return ds;
}

/// Two noisy rings: class 0 at radius 0.5, class 1 at radius 1.
inline LabeledDataset gen_type1(std::size_t n_per_class, double noise_std, std::uint64_t seed) {
  if (n_per_class < 1) throw ConfigError("gen_type1: n_per_class must be >= 1");
  if (noise_std < 0) throw ConfigError("gen_type1: noise_std must be >= 0");
  Rng rng = make_rng(seed);
  LabeledDataset ds;
  ds.inputs = Matrix(2 * n_per_class, 2);
  ds.labels.resize(2 * n_per_class);
  const double radii[2] = {0.5, 1.0};
  for (int cls = 0; cls < 2; ++cls) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      const std::size_t r = static_cast<std::size_t>(cls) * n_per_class + i;
      const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      double nx = 0.0, ny = 0.0;
      if (noise_std > 0) {
        nx = noise_std * standard_normal(rng);
        ny = noise_std * standard_normal(rng);
      }
      ds.inputs(r, 0) = radii[cls] * std::cos(theta) + nx;
      ds.inputs(r, 1) = radii[cls] * std::sin(theta) + ny;
      ds.labels[r] = cls;
    }
  }
  return ds;
}

/// Half-width of the Type2 sampling box for a given stripe count.
inline double type2_half_width(std::size_t stripes) { return static_cast<double>(stripes) * std::numbers::pi / 2.0; }

/// Diagonal periodic stripes: points uniform in [-L, L]^2 with
/// L = stripes * pi / 2 (stripes = 2 gives [-pi, pi]^2), label 1 where
/// cos(x1 + x2) > 0, then jittered by noise_std. Classes are filled by
/// rejection to exactly n_per_class rows each.
inline LabeledDataset gen_type2(std::size_t n_per_class, std::size_t stripes, double noise_std, std::uint64_t seed) {
  if (stripes < 2) throw ConfigError("gen_type2: stripes must be >= 2");
  if (n_per_class < 1) throw ConfigError("gen_type2: n_per_class must be >= 1");
  if (noise_std < 0) throw ConfigError("gen_type2: noise_std must be >= 0");
  Rng rng = make_rng(seed);
  const double half = type2_half_width(stripes);
  LabeledDataset ds;
  ds.inputs = Matrix(2 * n_per_class, 2);
  ds.labels.resize(2 * n_per_class);
  std::size_t filled[2] = {0, 0};
  while (filled[0] < n_per_class || filled[1] < n_per_class) {
    double x1 = uniform(rng, -half, half);
    double x2 = uniform(rng, -half, half);
    const int cls = std::cos(x1 + x2) > 0.0 ? 1 : 0;
    if (noise_std > 0) {
      x1 += noise_std * standard_normal(rng);
      x2 += noise_std * standard_normal(rng);
    }
    if (filled[cls] == n_per_class) continue;
    const std::size_t r = static_cast<std::size_t>(cls) * n_per_class + filled[cls]++;
    ds.inputs(r, 0) = x1;
    ds.inputs(r, 1) = x2;
    ds.labels[r] = cls;
  }
  return ds;
}

/// Center of mode k of the conditional mixture.
inline std::pair<double, double> mixture_center(std::size_t k, std::size_t modes, double radius) {
  const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(modes);
  return {radius * std::cos(a), radius * std::sin(a)};
}

/// K Gaussian modes equally spaced on a circle; label = mode, condition = one-hot(mode).
inline LabeledDataset gen_cond_mixture(std::size_t n, std::size_t modes, double radius, double mode_std,
                                       std::uint64_t seed) {
  if (modes < 2) throw ConfigError("gen_cond_mixture: modes must be >= 2");
  Rng rng = make_rng(seed);
  LabeledDataset ds;
  ds.num_classes = modes;
  ds.inputs = Matrix(n, 2);
  ds.labels.resize(n);
  ds.conditions = Matrix(n, modes);
  std::uniform_int_distribution<std::size_t> pick(0, modes - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = pick(rng);
    auto [cx, cy] = mixture_center(k, modes, radius);
    double nx = 0.0, ny = 0.0;
    if (mode_std > 0) {
      nx = mode_std * standard_normal(rng);
      ny = mode_std * standard_normal(rng);
    }
    ds.inputs(i, 0) = cx + nx;
    ds.inputs(i, 1) = cy + ny;
    ds.labels[i] = static_cast<int>(k);
    (*ds.conditions)(i, k) = 1.0;
  }
  return ds;
}

/// Index of the mixture center nearest to (x, y); ties toward lower index.
inline std::size_t nearest_mode(double x, double y, std::size_t modes, double radius) {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t k = 0; k < modes; ++k) {
    auto [cx, cy] = mixture_center(k, modes, radius);
    const double d = (x - cx) * (x - cx) + (y - cy) * (y - cy);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

/// Two classes with identically distributed 2-D local descriptors; only the
/// supplementary landmark distance tells them apart (class 0 in U[0, 0.4],
/// class 1 in U[0.6, 1.0]). Descriptors are uniform on [-1, 1]^2 plus
/// Gaussian noise of std patch_noise. Rows alternate class 0, class 1.
inline LabeledDataset gen_patch_task(std::size_t n, double patch_noise, std::uint64_t seed) {
  if (patch_noise < 0) throw ConfigError("gen_patch_task: patch_noise must be >= 0");
  Rng rng = make_rng(seed);
  LabeledDataset ds;
  ds.inputs = Matrix(n, 2);
  ds.labels.resize(n);
  ds.supplementary = Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % 2);
    for (std::size_t c = 0; c < 2; ++c) {
      double v = uniform(rng, -1.0, 1.0);
      if (patch_noise > 0) v += patch_noise * standard_normal(rng);
      ds.inputs(i, c) = v;
    }
    (*ds.supplementary)(i, 0) = cls == 0 ? uniform(rng, 0.0, 0.4) : uniform(rng, 0.6, 1.0);
    ds.labels[i] = cls;
  }
  return ds;
}

/// One-hot n x k matrix from integer labels.
inline Matrix one_hot(const std::vector<int>& labels, std::size_t k) {
  Matrix out(labels.size(), k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k) throw IndexError("one_hot: label out of range");
    out(i, static_cast<std::size_t>(labels[i])) = 1.0;
  }
  return out;
}

}  // namespace suppax
