// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0
//
// MNIST IDX container: big-endian magic, big-endian u32 dimension sizes,
// then a raw unsigned-byte payload.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "suppax/data.hpp"
#include "suppax/errors.hpp"

namespace suppax::idx {

inline constexpr std::uint32_t kImagesMagic = 0x00000803;
inline constexpr std::uint32_t kLabelsMagic = 0x00000801;

struct IdxArray {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> payload;
};

namespace detail {

inline std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("idx: cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) | (std::uint32_t{b[off + 2]} << 8) |
         std::uint32_t{b[off + 3]};
}

inline void put_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  b.push_back(static_cast<std::uint8_t>(v >> 24));
  b.push_back(static_cast<std::uint8_t>(v >> 16));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
  b.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace detail

/// Reads an unsigned-byte IDX file and checks its magic number.
inline IdxArray read_idx(const std::filesystem::path& path, std::uint32_t expected_magic) {
  auto bytes = detail::read_all(path);
  if (bytes.size() < 4) throw FormatError("idx: " + path.string() + " is truncated (no magic)");
  const std::uint32_t magic = detail::be32(bytes, 0);
  if (magic != expected_magic) {
    throw FormatError("idx: " + path.string() + " has bad magic " + std::to_string(magic) + ", expected " +
                      std::to_string(expected_magic));
  }
  const std::size_t ndim = magic & 0xFF;
  if (bytes.size() < 4 + 4 * ndim) throw FormatError("idx: " + path.string() + " is truncated (header)");
  IdxArray arr;
  std::size_t count = 1;
  for (std::size_t d = 0; d < ndim; ++d) {
    arr.dims.push_back(detail::be32(bytes, 4 + 4 * d));
    count *= arr.dims.back();
  }
  const std::size_t off = 4 + 4 * ndim;
  if (bytes.size() < off + count) throw FormatError("idx: " + path.string() + " is truncated (payload)");
  arr.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off),
                     bytes.begin() + static_cast<std::ptrdiff_t>(off + count));
  return arr;
}

inline void write_idx(const std::filesystem::path& path, std::uint32_t magic, const IdxArray& arr) {
  std::vector<std::uint8_t> bytes;
  detail::put_be32(bytes, magic);
  for (auto d : arr.dims) detail::put_be32(bytes, d);
  bytes.insert(bytes.end(), arr.payload.begin(), arr.payload.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("idx: cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

/// Images scaled to [0, 1] (n x rows*cols), labels 0-9, one-hot conditions attached.
inline LabeledDataset load_mnist_idx(const std::filesystem::path& images_path,
                                     const std::filesystem::path& labels_path) {
  auto images = read_idx(images_path, kImagesMagic);
  auto labels = read_idx(labels_path, kLabelsMagic);
  if (images.dims.size() != 3) throw FormatError("idx: image file must be 3-dimensional");
  if (labels.dims.size() != 1) throw FormatError("idx: label file must be 1-dimensional");
  const std::size_t n = images.dims[0];
  if (labels.dims[0] != n) {
    throw FormatError("idx: " + std::to_string(n) + " images but " + std::to_string(labels.dims[0]) + " labels");
  }
  const std::size_t d = std::size_t{images.dims[1]} * images.dims[2];
  LabeledDataset ds;
  ds.num_classes = 10;
  ds.inputs = Matrix(n, d);
  for (std::size_t i = 0; i < n * d; ++i) ds.inputs.values[i] = images.payload[i] / 255.0;
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels.payload[i] > 9) throw FormatError("idx: label " + std::to_string(labels.payload[i]) + " outside 0-9");
    ds.labels[i] = labels.payload[i];
  }
  ds.conditions = one_hot(ds.labels, 10);
  return ds;
}

}  // namespace suppax::idx
