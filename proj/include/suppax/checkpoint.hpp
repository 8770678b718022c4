// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0
//
// Flat binary network checkpoints. All integers are little-endian u32, all
// reals little-endian IEEE-754 binary64.
//
//   magic "SPXN" | version | n_layers
//   per layer: in_dim | out_dim | activation
//   has_injection | site_kind | site_layer | width | source (0 free, 1 + FeatureKind)
//   per layer: weight (in_dim*out_dim, row-major) | bias (out_dim)
//   free-input constants (width values), only for input-site free injection

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "suppax/errors.hpp"
#include "suppax/nn.hpp"

namespace suppax::checkpoint {

inline constexpr std::array<char, 4> kMagic{'S', 'P', 'X', 'N'};
inline constexpr std::uint32_t kVersion = 1;

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_++]} << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_++]} << (8 * i);
    return std::bit_cast<double>(v);
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw FormatError("checkpoint: truncated file");
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 4;
};

}  // namespace detail

inline std::vector<std::uint8_t> encode(const Network& net) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  detail::put_u32(out, kVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(net.depth()));
  for (const auto& l : net.layers()) {
    detail::put_u32(out, static_cast<std::uint32_t>(l.spec.in_dim));
    detail::put_u32(out, static_cast<std::uint32_t>(l.spec.out_dim));
    detail::put_u32(out, static_cast<std::uint32_t>(l.spec.activation));
  }
  const auto& inj = net.injection();
  detail::put_u32(out, inj ? 1 : 0);
  detail::put_u32(out, inj ? static_cast<std::uint32_t>(inj->site.kind) : 0);
  detail::put_u32(out, inj ? static_cast<std::uint32_t>(inj->site.layer) : 0);
  detail::put_u32(out, inj ? static_cast<std::uint32_t>(inj->width) : 0);
  detail::put_u32(out, inj && inj->feature ? 1 + static_cast<std::uint32_t>(*inj->feature) : 0);
  for (const auto& l : net.layers()) {
    for (double v : l.weight.values()) detail::put_f64(out, v);
    for (double v : l.bias.values()) detail::put_f64(out, v);
  }
  if (net.free_inputs().defined()) {
    for (double v : net.free_inputs().values()) detail::put_f64(out, v);
  }
  return out;
}

inline Network decode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("checkpoint: bad magic");
  }
  detail::Reader in(bytes);
  const auto version = in.u32();
  if (version != kVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  const auto n_layers = in.u32();
  if (n_layers == 0 || n_layers > 1024) throw FormatError("checkpoint: implausible layer count");
  std::vector<LayerSpec> specs;
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    LayerSpec s;
    s.in_dim = in.u32();
    s.out_dim = in.u32();
    const auto act = in.u32();
    if (act > 2) throw FormatError("checkpoint: unknown activation code");
    s.activation = static_cast<Activation>(act);
    specs.push_back(s);
  }
  std::optional<InjectionSpec> inj;
  const auto has = in.u32();
  const auto kind = in.u32(), layer = in.u32(), width = in.u32(), source = in.u32();
  if (has) {
    if (kind > 1 || source > 4) throw FormatError("checkpoint: bad injection block");
    InjectionSpec spec;
    spec.site = {static_cast<InjectionSite::Kind>(kind), layer};
    spec.width = width;
    if (source > 0) spec.feature = static_cast<FeatureKind>(source - 1);
    inj = spec;
  }
  Network net;
  try {
    net = Network(specs, inj);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint: inconsistent header: ") + e.what());
  }
  for (auto& l : net.layers()) {
    for (auto& v : l.weight.mutable_values()) v = in.f64();
    for (auto& v : l.bias.mutable_values()) v = in.f64();
  }
  if (net.free_inputs().defined()) {
    for (auto& v : net.free_inputs().mutable_values()) v = in.f64();
  }
  if (!in.at_end()) throw FormatError("checkpoint: trailing bytes");
  return net;
}

inline void save(const Network& net, const std::filesystem::path& path) {
  auto bytes = encode(net);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("checkpoint: cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline Network load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint: cannot open " + path.string());
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode(bytes);
}

}  // namespace suppax::checkpoint
