// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0
//
// Artifact emitters: CSV, JSON, SVG 1.1 and binary PGM (P5).
//
// Everything here is a pure function of its inputs so reruns with the same
// seed give byte-identical files. Numbers go through std::to_chars (shortest
// round-trip form for data, fixed two decimals for drawing coordinates), which
// does not depend on the C locale. Each text artifact embeds the FNV-1a hash
// of the canonical JSON config that produced it.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "suppax/analysis/parzen.hpp"
#include "suppax/analysis/regions.hpp"
#include "suppax/analysis/separability.hpp"
#include "suppax/data.hpp"
#include "suppax/errors.hpp"
#include "suppax/experiments.hpp"
#include "suppax/matrix.hpp"

namespace suppax::report {

using json = nlohmann::json;

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Shortest decimal that round-trips to the same double.
inline std::string num(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

/// Fixed-precision form used for drawing coordinates.
inline std::string fixed(double v, int digits = 2) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  std::string s(buf.data(), end);
  return s == "-0.00" ? "0.00" : s;
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hash of the canonical serialization (nlohmann objects keep keys sorted).
inline std::string config_hash(const json& config) {
  const std::uint64_t h = fnv1a64(config.dump());
  static constexpr char hex[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) s[static_cast<std::size_t>(15 - i)] = hex[(h >> (4 * i)) & 0xF];
  return s;
}

// ---------------------------------------------------------------- CSV

/// Header row then one sample per line: x1..xd, supplementary s1..sw,
/// condition c0..ck-1, label.
inline std::string dataset_csv(const LabeledDataset& ds, std::string_view hash) {
  std::string out = "# suppax dataset; config_hash=" + std::string(hash) + "\n";
  std::vector<std::string> head;
  for (std::size_t k = 0; k < ds.inputs.cols; ++k) head.push_back("x" + std::to_string(k + 1));
  if (ds.supplementary)
    for (std::size_t k = 0; k < ds.supplementary->cols; ++k) head.push_back("s" + std::to_string(k + 1));
  if (ds.conditions)
    for (std::size_t k = 0; k < ds.conditions->cols; ++k) head.push_back("c" + std::to_string(k));
  head.push_back("label");
  for (std::size_t k = 0; k < head.size(); ++k) out += (k ? "," : "") + head[k];
  out += '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto emit_row = [&](std::span<const double> r) {
      for (double v : r) out += num(v) + ",";
    };
    emit_row(ds.inputs.row(i));
    if (ds.supplementary) emit_row(ds.supplementary->row(i));
    if (ds.conditions) emit_row(ds.conditions->row(i));
    out += std::to_string(ds.labels[i]) + "\n";
  }
  return out;
}

inline std::string stats_csv(const experiments::StatsSeries& s, std::string_view hash) {
  std::string out = "# suppax error curves; std=population (divide by R); config_hash=" + std::string(hash) + "\n";
  out += "model,epoch,mean,std,mean_loss\n";
  for (const auto& m : s.models) {
    for (std::size_t p = 0; p < s.epochs.size(); ++p) {
      out += std::string(to_string(m.kind)) + "," + std::to_string(s.epochs[p]) + "," + num(m.mean[p]) + "," +
             num(m.std[p]) + "," + num(m.mean_loss[p]) + "\n";
    }
  }
  return out;
}

inline std::string region_csv(const analysis::RegionMap& map, std::string_view hash) {
  std::string out = "# suppax region map; regions=" + std::to_string(map.region_count) +
                    "; config_hash=" + std::string(hash) + "\n";
  out += "ix,iy,x,y,region,class\n";
  for (std::size_t iy = 0; iy < map.ny; ++iy) {
    for (std::size_t ix = 0; ix < map.nx; ++ix) {
      const std::size_t c = iy * map.nx + ix;
      out += std::to_string(ix) + "," + std::to_string(iy) + "," + num(map.cell_x(ix)) + "," + num(map.cell_y(iy)) +
             "," + std::to_string(map.cell_pattern[c]) + "," + std::to_string(map.cell_class[c]) + "\n";
    }
  }
  return out;
}

/// Generated vectors, one per line, with an optional integer group column.
inline std::string samples_csv(const Matrix& samples, const std::vector<int>* groups, std::string_view hash) {
  std::string out = "# suppax samples; config_hash=" + std::string(hash) + "\n";
  for (std::size_t k = 0; k < samples.cols; ++k) out += (k ? ",x" : "x") + std::to_string(k + 1);
  if (groups) out += ",condition";
  out += '\n';
  for (std::size_t i = 0; i < samples.rows; ++i) {
    const auto r = samples.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) out += (k ? "," : "") + num(r[k]);
    if (groups) out += "," + std::to_string((*groups)[i]);
    out += '\n';
  }
  return out;
}

namespace detail {

struct CsvTable {
  std::vector<std::string> head;
  std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

/// Header plus rows of equal width; '#' lines and blank lines are skipped.
inline CsvTable read_csv_table(std::string_view text) {
  CsvTable t;
  std::size_t pos = 0;
  bool have_head = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (!have_head) {
      t.head = std::move(cells);
      have_head = true;
      continue;
    }
    if (cells.size() != t.head.size()) {
      throw FormatError("csv: row " + std::to_string(t.rows.size() + 1) + " has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(t.head.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (!have_head) throw FormatError("csv: missing header");
  return t;
}

inline double parse_cell(const std::string& cell) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) throw FormatError("csv: bad number '" + cell + "'");
  return v;
}

inline std::vector<std::size_t> columns_with_prefix(const CsvTable& t, char prefix) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < t.head.size(); ++k)
    if (!t.head[k].empty() && t.head[k][0] == prefix && t.head[k] != "label") out.push_back(k);
  return out;
}

inline Matrix gather_columns(const CsvTable& t, const std::vector<std::size_t>& cols) {
  Matrix m(t.rows.size(), cols.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t k = 0; k < cols.size(); ++k) m(i, k) = parse_cell(t.rows[i][cols[k]]);
  return m;
}

}  // namespace detail

/// Reads the dataset_csv layout back: x* inputs, optional s* and c* blocks,
/// and an integer label column.
inline LabeledDataset parse_dataset_csv(std::string_view text) {
  const auto t = detail::read_csv_table(text);
  const auto xs = detail::columns_with_prefix(t, 'x');
  const auto label = std::find(t.head.begin(), t.head.end(), "label");
  if (xs.empty() || label == t.head.end()) throw FormatError("dataset csv: header needs x1..xd and label columns");
  LabeledDataset ds;
  ds.inputs = detail::gather_columns(t, xs);
  if (auto ss = detail::columns_with_prefix(t, 's'); !ss.empty()) ds.supplementary = detail::gather_columns(t, ss);
  if (auto cs = detail::columns_with_prefix(t, 'c'); !cs.empty()) ds.conditions = detail::gather_columns(t, cs);
  const auto lc = static_cast<std::size_t>(label - t.head.begin());
  int max_label = 1;
  for (const auto& row : t.rows) {
    const double l = detail::parse_cell(row[lc]);
    if (l < 0 || l != std::floor(l)) throw FormatError("dataset csv: label must be a non-negative integer");
    ds.labels.push_back(static_cast<int>(l));
    max_label = std::max(max_label, ds.labels.back());
  }
  ds.num_classes = std::max(static_cast<std::size_t>(max_label) + 1, ds.conditions ? ds.conditions->cols : 0);
  ds.validate();
  return ds;
}

/// The x* columns of any CSV written by this library (datasets or samples).
inline Matrix parse_points_csv(std::string_view text) {
  const auto t = detail::read_csv_table(text);
  const auto xs = detail::columns_with_prefix(t, 'x');
  if (xs.empty()) throw FormatError("csv: no x* columns");
  return detail::gather_columns(t, xs);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- JSON

inline json parzen_json(const analysis::ParzenEstimate& e) {
  return {{"mean", e.mean_loglik}, {"sem", e.sem}, {"sigma", e.bandwidth}, {"n", e.n_test}};
}

inline json separability_json(const analysis::SeparabilityResult& r) {
  json j{{"separable", r.separable}, {"method", r.method}};
  if (r.witness) j["witness"] = {{"w", r.witness->w}, {"b", r.witness->b}};
  else j["witness"] = nullptr;
  return j;
}

inline json summary_json(const std::vector<experiments::ModelSummary>& rows) {
  json models = json::array();
  for (const auto& s : rows) {
    json frac = json::object();
    for (auto [t, f] : s.fraction_below) frac[num(t)] = f;
    models.push_back({{"model", to_string(s.kind)},
                      {"final_mean", s.final_mean},
                      {"final_std", s.final_std},
                      {"fraction_below", frac}});
  }
  return {{"std_convention", "population"}, {"models", models}};
}

// ---------------------------------------------------------------- SVG

inline constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                     "#9467bd", "#8c564b", "#e377c2", "#17becf"};

/// Minimal SVG builder with a data-to-pixel transform for one plot area.
class Svg {
 public:
  Svg(double width, double height, std::string_view hash) : width_(width), height_(height) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fixed(width, 0) << "\" height=\""
         << fixed(height, 0) << "\" viewBox=\"0 0 " << fixed(width, 0) << ' ' << fixed(height, 0) << "\">\n"
         << "<!-- suppax " << kToolVersion << "; config_hash=" << hash << " -->\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << fixed(width, 0) << "\" height=\"" << fixed(height, 0)
         << "\" fill=\"white\"/>\n";
  }

  void set_frame(double left, double top, double right, double bottom, double x0, double x1, double y0, double y1) {
    l_ = left, t_ = top, r_ = right, b_ = bottom;
    x0_ = x0, x1_ = x1, y0_ = y0, y1_ = y1;
  }
  double px(double x) const { return l_ + (x - x0_) / (x1_ - x0_) * (r_ - l_); }
  double py(double y) const { return b_ - (y - y0_) / (y1_ - y0_) * (b_ - t_); }

  void raw(std::string_view s) { out_ << s; }

  void line(double xa, double ya, double xb, double yb, std::string_view stroke, double w = 1.0,
            std::string_view dash = {}) {
    out_ << "<line x1=\"" << fixed(xa) << "\" y1=\"" << fixed(ya) << "\" x2=\"" << fixed(xb) << "\" y2=\""
         << fixed(yb) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << fixed(w) << '"';
    if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << '"';
    out_ << "/>\n";
  }

  void rect(double x, double y, double w, double h, std::string_view fill, double opacity = 1.0) {
    out_ << "<rect x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" width=\"" << fixed(w) << "\" height=\""
         << fixed(h) << "\" fill=\"" << fill << '"';
    if (opacity < 1.0) out_ << " fill-opacity=\"" << fixed(opacity) << '"';
    out_ << "/>\n";
  }

  void circle(double x, double y, double r, std::string_view fill, double opacity = 1.0) {
    out_ << "<circle cx=\"" << fixed(x) << "\" cy=\"" << fixed(y) << "\" r=\"" << fixed(r) << "\" fill=\"" << fill
         << "\" fill-opacity=\"" << fixed(opacity) << "\"/>\n";
  }

  /// Polyline in data coordinates.
  void polyline(const std::vector<double>& xs, const std::vector<double>& ys, std::string_view stroke,
                std::string_view dash = {}) {
    out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.50\"";
    if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << '"';
    out_ << " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) out_ << (i ? " " : "") << fixed(px(xs[i])) << ',' << fixed(py(ys[i]));
    out_ << "\"/>\n";
  }

  void text(double x, double y, std::string_view s, double size = 12.0, std::string_view anchor = "start") {
    out_ << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" font-family=\"sans-serif\" font-size=\""
         << fixed(size, 0) << "\" text-anchor=\"" << anchor << "\">";
    for (char c : s) {
      if (c == '<') out_ << "&lt;";
      else if (c == '>') out_ << "&gt;";
      else if (c == '&') out_ << "&amp;";
      else out_ << c;
    }
    out_ << "</text>\n";
  }

  /// Frame box with min/max tick labels on both axes.
  void axes(std::string_view xlabel, std::string_view ylabel) {
    out_ << "<rect x=\"" << fixed(l_) << "\" y=\"" << fixed(t_) << "\" width=\"" << fixed(r_ - l_) << "\" height=\""
         << fixed(b_ - t_) << "\" fill=\"none\" stroke=\"black\"/>\n";
    text(l_, b_ + 16, num(x0_), 11, "middle");
    text(r_, b_ + 16, num(x1_), 11, "middle");
    text(l_ - 6, b_ + 4, num(y0_), 11, "end");
    text(l_ - 6, t_ + 4, num(y1_), 11, "end");
    text((l_ + r_) / 2, b_ + 32, xlabel, 12, "middle");
    text(l_ - 40, (t_ + b_) / 2, ylabel, 12, "middle");
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

  double width() const { return width_; }
  double height() const { return height_; }

 private:
  std::ostringstream out_;
  double width_, height_;
  double l_ = 0, t_ = 0, r_ = 1, b_ = 1, x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
};

/// Training-error curves: solid line is the mean, dashed line the std.
inline std::string error_curve_svg(const experiments::StatsSeries& s, std::string_view hash,
                                   std::string_view title = "training error") {
  Svg svg(640, 420, hash);
  const double last = s.epochs.empty() ? 1.0 : static_cast<double>(s.epochs.back());
  svg.set_frame(70, 40, 600, 360, 0.0, std::max(1.0, last), 0.0, 1.0);
  svg.text(320, 24, title, 14, "middle");
  svg.axes("epoch", "error");
  std::vector<double> xs(s.epochs.begin(), s.epochs.end());
  for (std::size_t k = 0; k < s.models.size(); ++k) {
    const auto* col = kPalette[k % kPalette.size()];
    svg.polyline(xs, s.models[k].mean, col);
    svg.polyline(xs, s.models[k].std, col, "6,4");
    const double ly = 56 + 18.0 * static_cast<double>(k);
    svg.line(480, ly - 4, 510, ly - 4, col, 1.5);
    svg.text(516, ly, "model " + std::string(to_string(s.models[k].kind)), 12);
  }
  svg.text(480, 56 + 18.0 * static_cast<double>(s.models.size()), "solid: mean, dashed: std", 10);
  return svg.finish();
}

/// Region map: each activation region shaded, tinted by predicted class, with
/// the first-layer lines overlaid.
inline std::string regions_svg(const analysis::RegionMap& map, const std::vector<analysis::Hyperplane2D>& lines,
                               std::string_view hash) {
  Svg svg(560, 560, hash);
  const auto& bb = map.bbox;
  svg.set_frame(50, 40, 530, 520, bb.xmin, bb.xmax, bb.ymin, bb.ymax);
  svg.text(290, 24, "linear regions: " + std::to_string(map.region_count), 14, "middle");
  const double cw = (svg.px(bb.xmax) - svg.px(bb.xmin)) / static_cast<double>(map.nx);
  const double ch = (svg.py(bb.ymin) - svg.py(bb.ymax)) / static_cast<double>(map.ny);
  // Run-length encode each grid row so the file stays small at fine resolutions.
  for (std::size_t iy = 0; iy < map.ny; ++iy) {
    std::size_t start = 0;
    for (std::size_t ix = 1; ix <= map.nx; ++ix) {
      const std::size_t a = iy * map.nx + start;
      if (ix < map.nx && map.cell_pattern[iy * map.nx + ix] == map.cell_pattern[a] &&
          map.cell_class[iy * map.nx + ix] == map.cell_class[a]) {
        continue;
      }
      const int region = map.cell_pattern[a];
      const char* fill = kPalette[static_cast<std::size_t>(region) % kPalette.size()];
      const double opacity = map.cell_class[a] == 1 ? 0.45 : 0.20;
      svg.rect(svg.px(bb.xmin) + cw * static_cast<double>(start), svg.py(bb.ymin) - ch * static_cast<double>(iy + 1),
               cw * static_cast<double>(ix - start), ch, fill, opacity);
      start = ix;
    }
  }
  for (const auto& h : lines) {
    if (h.degenerate) continue;
    // Clip w.x + b = 0 to the box by intersecting with its four sides.
    std::vector<std::array<double, 2>> pts;
    auto push = [&](double x, double y) {
      if (x >= bb.xmin - 1e-12 && x <= bb.xmax + 1e-12 && y >= bb.ymin - 1e-12 && y <= bb.ymax + 1e-12)
        pts.push_back({x, y});
    };
    if (h.w[1] != 0.0) {
      push(bb.xmin, -(h.b + h.w[0] * bb.xmin) / h.w[1]);
      push(bb.xmax, -(h.b + h.w[0] * bb.xmax) / h.w[1]);
    }
    if (h.w[0] != 0.0) {
      push(-(h.b + h.w[1] * bb.ymin) / h.w[0], bb.ymin);
      push(-(h.b + h.w[1] * bb.ymax) / h.w[0], bb.ymax);
    }
    if (pts.size() < 2) continue;
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end());
    svg.line(svg.px((*lo)[0]), svg.py((*lo)[1]), svg.px((*hi)[0]), svg.py((*hi)[1]), "black", 1.5);
  }
  svg.axes("x1", "x2");
  return svg.finish();
}

/// 2-D scatter, one color per group; optional reference points drawn as crosses.
inline std::string scatter_svg(const Matrix& points, const std::vector<int>& groups, std::string_view hash,
                               std::string_view title, const std::vector<std::array<double, 2>>& marks = {}) {
  if (points.cols != 2) throw DimensionError("scatter_svg: points must be 2-D");
  double lo = -1.0, hi = 1.0;
  for (double v : points.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (const auto& m : marks) lo = std::min({lo, m[0], m[1]}), hi = std::max({hi, m[0], m[1]});
  const double pad = 0.05 * (hi - lo);
  Svg svg(560, 560, hash);
  svg.set_frame(50, 40, 530, 520, lo - pad, hi + pad, lo - pad, hi + pad);
  svg.text(290, 24, title, 14, "middle");
  for (std::size_t i = 0; i < points.rows; ++i) {
    const int g = groups.empty() ? 0 : groups[i];
    svg.circle(svg.px(points(i, 0)), svg.py(points(i, 1)), 2.0, kPalette[static_cast<std::size_t>(g) % kPalette.size()],
               0.7);
  }
  for (const auto& m : marks) {
    const double x = svg.px(m[0]), y = svg.py(m[1]);
    svg.line(x - 5, y - 5, x + 5, y + 5, "black", 1.5);
    svg.line(x - 5, y + 5, x + 5, y - 5, "black", 1.5);
  }
  svg.axes("x1", "x2");
  return svg.finish();
}

// ---------------------------------------------------------------- PGM

/// Tiles n images (rows of `images`, side x side, values in [0,1]) into a
/// grid_rows x grid_cols P5 image with a one-pixel black gutter.
inline std::string pgm_grid(const Matrix& images, std::size_t side, std::size_t grid_rows, std::size_t grid_cols,
                            std::string_view hash) {
  if (images.cols != side * side) throw DimensionError("pgm_grid: image width does not match side*side");
  if (images.rows > grid_rows * grid_cols) throw DimensionError("pgm_grid: more images than grid cells");
  const std::size_t w = grid_cols * (side + 1) + 1, h = grid_rows * (side + 1) + 1;
  std::vector<unsigned char> px(w * h, 0);
  for (std::size_t n = 0; n < images.rows; ++n) {
    const std::size_t gy = n / grid_cols, gx = n % grid_cols;
    for (std::size_t r = 0; r < side; ++r) {
      for (std::size_t c = 0; c < side; ++c) {
        const double v = std::clamp(images(n, r * side + c), 0.0, 1.0);
        px[(gy * (side + 1) + 1 + r) * w + gx * (side + 1) + 1 + c] =
            static_cast<unsigned char>(std::lround(v * 255.0));
      }
    }
  }
  std::string out = "P5\n# suppax sample grid; config_hash=" + std::string(hash) + "\n" + std::to_string(w) + " " +
                    std::to_string(h) + "\n255\n";
  out.append(reinterpret_cast<const char*>(px.data()), px.size());
  return out;
}

// ---------------------------------------------------------------- files

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw Error("failed writing '" + path.string() + "'");
}

/// Records every artifact a command emits; written last so its presence
/// marks a completed run. Only the manifest carries wall-clock time.
class Manifest {
 public:
  Manifest(std::string command, json config, std::uint64_t seed)
      : command_(std::move(command)), config_(std::move(config)), seed_(seed) {}

  const json& config() const { return config_; }
  std::string hash() const { return config_hash(config_); }

  /// Writes an artifact relative to `dir` and records it.
  void emit(const std::filesystem::path& dir, const std::string& name, std::string_view content) {
    write_file(dir / name, content);
    artifacts_.push_back(name);
  }

  void record(const std::string& name) { artifacts_.push_back(name); }

  void finish(const std::filesystem::path& dir, double duration_seconds) const {
    json j{{"command", command_},
           {"config", config_},
           {"config_hash", hash()},
           {"master_seed", seed_},
           {"artifacts", artifacts_},
           {"tool_version", kToolVersion},
           {"duration_seconds", duration_seconds}};
    write_file(dir / "manifest.json", j.dump(2) + "\n");
  }

 private:
  std::string command_;
  json config_;
  std::uint64_t seed_;
  std::vector<std::string> artifacts_;
};

}  // namespace suppax::report
