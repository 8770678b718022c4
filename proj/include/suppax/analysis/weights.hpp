// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>

#include "suppax/errors.hpp"
#include "suppax/nn.hpp"

namespace suppax::analysis {

struct SuppWeightReport {
  double mean_abs_supp = 0.0;
  double mean_abs_other = 0.0;
  double ratio = 0.0;
};

/// Mean |w| of the outgoing weights of injected coordinates versus every
/// other weight of the layer that consumes them.
inline SuppWeightReport supp_weight_report(const Network& net) {
  const auto& inj = net.injection();
  if (!inj || !inj->is_feature()) throw ContractError("supp_weight_report: network has no feature injection");
  const std::size_t layer = inj->site.kind == InjectionSite::Kind::input ? 0 : inj->site.layer;
  const auto& w = net.layers()[layer].weight;
  const std::size_t in = w.rows(), out = w.cols();
  const std::size_t first_supp = inj->site.kind == InjectionSite::Kind::input ? net.input_dim() : in - inj->width;
  double supp = 0.0, other = 0.0;
  std::size_t n_supp = 0, n_other = 0;
  for (std::size_t i = 0; i < in; ++i) {
    const bool injected = i >= first_supp && i < first_supp + inj->width;
    for (std::size_t j = 0; j < out; ++j) {
      (injected ? supp : other) += std::abs(w(i, j));
      ++(injected ? n_supp : n_other);
    }
  }
  SuppWeightReport r;
  r.mean_abs_supp = supp / static_cast<double>(n_supp);
  r.mean_abs_other = n_other ? other / static_cast<double>(n_other) : 0.0;
  r.ratio = r.mean_abs_other > 0.0 ? r.mean_abs_supp / r.mean_abs_other : INFINITY;
  return r;
}

}  // namespace suppax::analysis
