// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0
//
// ReLU linear-region geometry of 2-D input networks: first-layer
// hyperplanes, grid-based activation-pattern maps, and the exact region
// count of a line arrangement clipped to a box.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "suppax/errors.hpp"
#include "suppax/nn.hpp"

namespace suppax::analysis {

/// The line {x : w.x + b = 0}, normalized to |w| = 1 with the first nonzero
/// component of w positive. Degenerate units (w = 0) keep their raw bias.
struct Hyperplane2D {
  std::array<double, 2> w{};
  double b = 0.0;
  bool degenerate = false;

  double eval(double x1, double x2) const { return w[0] * x1 + w[1] * x2 + b; }
};

inline Hyperplane2D normalize_line(double w1, double w2, double b) {
  const double norm = std::hypot(w1, w2);
  if (norm == 0.0) return {{0.0, 0.0}, b, true};
  double s = 1.0 / norm;
  if (w1 < 0.0 || (w1 == 0.0 && w2 < 0.0)) s = -s;
  return {{w1 * s, w2 * s}, b * s, false};
}

/// One normalized line per first-layer unit.
inline std::vector<Hyperplane2D> layer1_hyperplanes(const Network& net) {
  const auto& first = net.layers().front();
  if (first.spec.in_dim != 2) {
    throw DimensionError("layer1_hyperplanes: first layer consumes " + std::to_string(first.spec.in_dim) +
                         " inputs; only 2-D input layers are supported");
  }
  const std::size_t units = first.spec.out_dim;
  std::vector<Hyperplane2D> out;
  for (std::size_t j = 0; j < units; ++j) {
    out.push_back(normalize_line(first.weight(0, j), first.weight(1, j), first.bias.values()[j]));
  }
  return out;
}

struct BBox {
  double xmin = -1.5, xmax = 1.5, ymin = -1.5, ymax = 1.5;
};

struct RegionMap {
  BBox bbox;
  std::size_t nx = 0, ny = 0;
  std::vector<int> cell_pattern;  // region id per cell, row-major with y outer
  std::vector<int> cell_class;
  std::size_t region_count = 0;

  double cell_x(std::size_t ix) const { return bbox.xmin + (static_cast<double>(ix) + 0.5) * (bbox.xmax - bbox.xmin) / nx; }
  double cell_y(std::size_t iy) const { return bbox.ymin + (static_cast<double>(iy) + 0.5) * (bbox.ymax - bbox.ymin) / ny; }
};

/// Supplementary tensor for a batch of 2-D points, from the network's pointwise feature.
inline Tensor pointwise_supplementary(const Network& net, const Matrix& points) {
  if (net.supplementary_width() == 0) return {};
  const auto feature = *net.injection()->feature;
  if (!is_pointwise(feature) || net.supplementary_width() != 1) {
    throw ConfigError("network's injected feature '" + std::string(to_string(feature)) +
                      "' cannot be evaluated from input coordinates");
  }
  return Tensor::from_matrix(feature_eval(feature, points));
}

/// Evaluates every cell center; cells with the same on/off state of all
/// hidden ReLUs share a region id (ids assigned in first-seen order).
inline RegionMap count_regions(const Network& net, BBox bbox, std::size_t nx, std::size_t ny) {
  if (nx < 2 || ny < 2) throw ContractError("count_regions: resolution must be >= 2 per axis");
  if (!(bbox.xmax > bbox.xmin && bbox.ymax > bbox.ymin)) throw ContractError("count_regions: empty bounding box");
  if (net.input_dim() != 2) throw DimensionError("count_regions: network input must be 2-D");
  RegionMap map;
  map.bbox = bbox;
  map.nx = nx;
  map.ny = ny;
  map.cell_pattern.resize(nx * ny);
  map.cell_class.resize(nx * ny);
  std::unordered_map<std::string, int> ids;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    Matrix pts(nx, 2);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      pts(ix, 0) = map.cell_x(ix);
      pts(ix, 1) = map.cell_y(iy);
    }
    Tensor supp = pointwise_supplementary(net, pts);
    std::vector<Tensor> pre;
    Tensor logits = net.forward_traced(Tensor::from_matrix(pts), supp.defined() ? &supp : nullptr, pre);
    auto cls = argmax_rows(logits);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      std::string key;
      for (const auto& z : pre) {
        const std::size_t w = z.cols();
        for (std::size_t j = 0; j < w; ++j) key.push_back(z(ix, j) > 0.0 ? '1' : '0');
        key.push_back('|');
      }
      auto [it, fresh] = ids.try_emplace(key, static_cast<int>(ids.size()));
      map.cell_pattern[iy * nx + ix] = it->second;
      map.cell_class[iy * nx + ix] = cls[ix];
    }
  }
  map.region_count = ids.size();
  return map;
}

inline std::size_t arrangement_bound(std::size_t k) { return 1 + k + k * (k - 1) / 2; }

/// Exact number of faces the lines cut the open box into:
/// 1 + (lines crossing the box) + sum over interior crossing points of (lines through it - 1).
/// Coincident lines count once; degenerate lines are ignored.
inline std::size_t arrangement_region_count(const std::vector<Hyperplane2D>& lines, BBox box, double tol = 1e-12) {
  std::vector<Hyperplane2D> uniq;
  for (const auto& h : lines) {
    if (h.degenerate) continue;
    const bool dup = std::any_of(uniq.begin(), uniq.end(), [&](const Hyperplane2D& u) {
      return std::abs(u.w[0] - h.w[0]) < tol && std::abs(u.w[1] - h.w[1]) < tol && std::abs(u.b - h.b) < tol;
    });
    if (!dup) uniq.push_back(h);
  }
  const std::array<std::array<double, 2>, 4> corners{{{box.xmin, box.ymin}, {box.xmax, box.ymin},
                                                      {box.xmin, box.ymax}, {box.xmax, box.ymax}}};
  std::vector<Hyperplane2D> crossing;
  for (const auto& h : uniq) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& c : corners) {
      const double v = h.eval(c[0], c[1]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo < 0.0 && hi > 0.0) crossing.push_back(h);
  }
  struct Point {
    double x, y;
    std::vector<std::size_t> lines;
  };
  std::vector<Point> points;
  const double scale = std::max({std::abs(box.xmin), std::abs(box.xmax), std::abs(box.ymin), std::abs(box.ymax), 1.0});
  for (std::size_t i = 0; i < crossing.size(); ++i) {
    for (std::size_t j = i + 1; j < crossing.size(); ++j) {
      const auto& a = crossing[i];
      const auto& c = crossing[j];
      const double det = a.w[0] * c.w[1] - a.w[1] * c.w[0];
      if (std::abs(det) < tol) continue;
      const double x = (a.w[1] * c.b - c.w[1] * a.b) / det;
      const double y = (c.w[0] * a.b - a.w[0] * c.b) / det;
      if (!(x > box.xmin && x < box.xmax && y > box.ymin && y < box.ymax)) continue;
      auto it = std::find_if(points.begin(), points.end(), [&](const Point& p) {
        return std::hypot(p.x - x, p.y - y) < 1e-9 * scale;
      });
      if (it == points.end()) {
        points.push_back({x, y, {i, j}});
      } else {
        for (auto id : {i, j})
          if (std::find(it->lines.begin(), it->lines.end(), id) == it->lines.end()) it->lines.push_back(id);
      }
    }
  }
  std::size_t count = 1 + crossing.size();
  for (const auto& p : points) count += p.lines.size() - 1;
  return count;
}

}  // namespace suppax::analysis
