// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0
//
// Exact hard-margin linear separability.
//
// In 2-D the decision is geometric: two finite point sets are strictly
// separable iff their convex hulls are disjoint, and for convex polygons a
// separating direction can always be found among the hull edge normals (plus
// edge directions for degenerate, collinear hulls).
//
// In any dimension the decision is an LP. Separability of y_i (w.x_i + b) >= 1
// is, by Farkas' lemma, the infeasibility of
//     sum_i l_i y_i x_i = 0,  sum_i l_i y_i = 0,  sum_i l_i = 1,  l >= 0
// (a common point of both convex hulls). Phase I of the simplex method on
// this (d + 2)-row system either drives the artificial objective to zero,
// which certifies a hull intersection, or stops at a positive optimum whose
// dual multipliers u give the witness w = -u_x / u_1, b = -u_y / u_1.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "suppax/errors.hpp"
#include "suppax/matrix.hpp"

namespace suppax::analysis {

struct SeparatingPlane {
  std::vector<double> w;
  double b = 0.0;

  double eval(std::span<const double> x) const {
    double s = b;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * x[k];
    return s;
  }
};

struct SeparabilityResult {
  bool separable = false;
  std::optional<SeparatingPlane> witness;  // class 1 on the positive side, margin >= 1
  std::string method;
};

namespace detail {

inline void check_two_classes(const Matrix& inputs, const std::vector<int>& labels) {
  if (labels.size() != inputs.rows) throw DimensionError("linear_separable: label count differs from input rows");
  bool has0 = false, has1 = false;
  for (int l : labels) {
    if (l == 0) has0 = true;
    else if (l == 1) has1 = true;
    else throw IndexError("linear_separable: labels must be 0 or 1");
  }
  if (!has0 || !has1) throw ContractError("linear_separable: both classes must be present");
}

inline double sign_of(int label) { return label == 1 ? 1.0 : -1.0; }

/// Smallest signed margin y_i (w.x_i + b) over the data.
inline double min_margin(const SeparatingPlane& p, const Matrix& inputs, const std::vector<int>& labels) {
  double m = INFINITY;
  for (std::size_t i = 0; i < inputs.rows; ++i) m = std::min(m, sign_of(labels[i]) * p.eval(inputs.row(i)));
  return m;
}

/// Rescales a strictly separating plane so its minimum margin is exactly 1.
inline std::optional<SeparatingPlane> normalize_witness(SeparatingPlane p, const Matrix& inputs,
                                                        const std::vector<int>& labels) {
  const double m = min_margin(p, inputs, labels);
  if (!(m > 0.0) || !std::isfinite(m)) return std::nullopt;
  for (auto& v : p.w) v /= m;
  p.b /= m;
  return p;
}

using Pt = std::array<double, 2>;

inline double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/// Andrew's monotone chain; collinear points dropped. Returns 1 or 2 points for degenerate sets.
inline std::vector<Pt> convex_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return pts;
  std::vector<Pt> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline void add_edge_axes(const std::vector<Pt>& hull, std::vector<Pt>& axes) {
  if (hull.size() < 2) return;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    axes.push_back({-dy, dx});
    axes.push_back({dx, dy});
  }
}

}  // namespace detail

/// Exact 2-D decision via convex-hull disjointness (separating-axis test).
inline SeparabilityResult separable_by_hulls_2d(const Matrix& inputs, const std::vector<int>& labels) {
  detail::check_two_classes(inputs, labels);
  if (inputs.cols != 2) throw DimensionError("separable_by_hulls_2d: inputs must be 2-D");
  std::vector<detail::Pt> p0, p1;
  for (std::size_t i = 0; i < inputs.rows; ++i) (labels[i] == 1 ? p1 : p0).push_back({inputs(i, 0), inputs(i, 1)});
  auto h0 = detail::convex_hull(p0);
  auto h1 = detail::convex_hull(p1);
  std::vector<detail::Pt> axes;
  detail::add_edge_axes(h0, axes);
  detail::add_edge_axes(h1, axes);
  for (const auto& a : h0)
    for (const auto& c : h1) axes.push_back({c[0] - a[0], c[1] - a[1]});
  SeparabilityResult res;
  res.method = "convex-hull";
  for (const auto& ax : axes) {
    if (ax[0] == 0.0 && ax[1] == 0.0) continue;
    auto proj = [&](const detail::Pt& p) { return ax[0] * p[0] + ax[1] * p[1]; };
    double lo0 = INFINITY, hi0 = -INFINITY, lo1 = INFINITY, hi1 = -INFINITY;
    for (const auto& p : h0) {
      lo0 = std::min(lo0, proj(p));
      hi0 = std::max(hi0, proj(p));
    }
    for (const auto& p : h1) {
      lo1 = std::min(lo1, proj(p));
      hi1 = std::max(hi1, proj(p));
    }
    std::optional<SeparatingPlane> cand;
    if (hi0 < lo1) cand = SeparatingPlane{{ax[0], ax[1]}, -(hi0 + lo1) / 2.0};
    else if (hi1 < lo0) cand = SeparatingPlane{{-ax[0], -ax[1]}, (hi1 + lo0) / 2.0};
    if (cand) {
      if (auto w = detail::normalize_witness(*cand, inputs, labels)) {
        res.separable = true;
        res.witness = w;
        return res;
      }
    }
  }
  return res;
}

/// Exact decision in any dimension via phase-I simplex on the Farkas system.
inline SeparabilityResult separable_by_lp(const Matrix& inputs, const std::vector<int>& labels,
                                          std::size_t max_pivots = 100000) {
  detail::check_two_classes(inputs, labels);
  const std::size_t n = inputs.rows, d = inputs.cols, m = d + 2;
  // Tableau columns: n lambdas, m artificials, rhs. Rows 0..m-1 constraints.
  const std::size_t cols = n + m + 1, rhs = n + m;
  std::vector<double> T(m * cols, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return T[r * cols + c]; };
  // Scale each coordinate so pivoting tolerances are meaningful.
  std::vector<double> colscale(d, 1.0);
  for (std::size_t k = 0; k < d; ++k) {
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, std::abs(inputs(i, k)));
    if (mx > 0.0) colscale[k] = mx;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double y = detail::sign_of(labels[i]);
    for (std::size_t k = 0; k < d; ++k) at(k, i) = y * inputs(i, k) / colscale[k];
    at(d, i) = y;
    at(d + 1, i) = 1.0;
  }
  at(d + 1, rhs) = 1.0;
  for (std::size_t r = 0; r < m; ++r) at(r, n + r) = 1.0;
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) basis[r] = n + r;
  // Reduced costs for min sum(artificials): r_j = c_j - sum_r A_rj.
  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += at(r, j);
    cost[j] = (j >= n && j < n + m ? 1.0 : 0.0) - s;
  }
  constexpr double eps = 1e-11;
  std::size_t pivots = 0;
  for (;;) {
    // Bland's rule: lowest-index column with negative reduced cost.
    std::size_t enter = cols;
    for (std::size_t j = 0; j < rhs; ++j) {
      if (cost[j] < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = m;
    double best = INFINITY;
    for (std::size_t r = 0; r < m; ++r) {
      if (at(r, enter) > eps) {
        const double ratio = at(r, rhs) / at(r, enter);
        if (leave == m || ratio < best - eps || (std::abs(ratio - best) <= eps && basis[r] < basis[leave])) {
          best = ratio;
          leave = r;
        }
      }
    }
    if (leave == m) throw NumericError("linear_separable: phase-I LP reported unbounded");
    if (++pivots > max_pivots) throw NumericError("linear_separable: simplex pivot limit exceeded");
    const double piv = at(leave, enter);
    for (std::size_t j = 0; j < cols; ++j) at(leave, j) /= piv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) at(r, j) -= f * at(leave, j);
    }
    const double f = cost[enter];
    for (std::size_t j = 0; j < cols; ++j) cost[j] -= f * at(leave, j);
    basis[leave] = enter;
  }
  double objective = 0.0;
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] >= n) objective += at(r, rhs);
  SeparabilityResult res;
  res.method = "lp";
  if (objective <= 1e-9) return res;
  // Dual multipliers: reduced cost of artificial r is 1 - u_r.
  std::vector<double> u(m);
  for (std::size_t r = 0; r < m; ++r) u[r] = 1.0 - cost[n + r];
  const double top = u[d + 1];
  if (!(top > 0.0)) throw NumericError("linear_separable: degenerate dual at positive optimum");
  SeparatingPlane p;
  p.w.resize(d);
  for (std::size_t k = 0; k < d; ++k) p.w[k] = -u[k] / top / colscale[k];
  p.b = -u[d] / top;
  auto w = detail::normalize_witness(p, inputs, labels);
  if (!w) throw NumericError("linear_separable: dual witness does not separate the data");
  res.separable = true;
  res.witness = w;
  return res;
}

/// Hard-margin separability of {0,1}-labelled points: hull test in 2-D, LP otherwise.
inline SeparabilityResult linear_separable(const Matrix& inputs, const std::vector<int>& labels) {
  return inputs.cols == 2 ? separable_by_hulls_2d(inputs, labels) : separable_by_lp(inputs, labels);
}

}  // namespace suppax::analysis
