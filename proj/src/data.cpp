// Copyright 2026 The mpsee Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mpsee/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "mpsee/errors.hpp"
#include "mpsee/sample_batch.hpp"

namespace mpsee {

// --- SampleBatch -----------------------------------------------------------

SampleBatch::SampleBatch(std::size_t n_samples, std::size_t n_features,
                         std::vector<double> features, std::optional<std::vector<int>> labels)
    : n_samples_(n_samples),
      n_features_(n_features),
      features_(std::move(features)),
      labels_(std::move(labels)) {
  if (features_.size() != n_samples_ * n_features_) {
    throw DimensionError("feature buffer has " + std::to_string(features_.size()) +
                         " values, expected " + std::to_string(n_samples_ * n_features_));
  }
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const double x = features_[i];
    if (!(x >= 0.0 && x <= 1.0)) {
      const auto m = n_features_ == 0 ? 0 : i % n_features_;
      throw DomainError("sample " + std::to_string(i / std::max<std::size_t>(n_features_, 1)) +
                            " feature " + std::to_string(m) + " = " + std::to_string(x) +
                            " outside [0, 1]",
                        m);
    }
  }
  if (labels_ && labels_->size() != n_samples_) {
    throw DimensionError("got " + std::to_string(labels_->size()) + " labels for " +
                         std::to_string(n_samples_) + " samples");
  }
}

const std::vector<int>& SampleBatch::labels() const {
  if (!labels_) throw ArgumentError("batch has no labels");
  return *labels_;
}

SampleBatch SampleBatch::subset(std::span<const std::size_t> rows) const {
  std::vector<double> features;
  features.reserve(rows.size() * n_features_);
  std::optional<std::vector<int>> labels;
  if (labels_) labels.emplace();
  for (auto n : rows) {
    if (n >= n_samples_) throw ArgumentError("row " + std::to_string(n) + " out of range");
    const auto s = sample(n);
    features.insert(features.end(), s.begin(), s.end());
    if (labels) labels->push_back((*labels_)[n]);
  }
  return SampleBatch(rows.size(), n_features_, std::move(features), std::move(labels));
}

SampleBatch SampleBatch::with_label(int label) const {
  std::vector<std::size_t> rows;
  const auto& all = labels();
  for (std::size_t n = 0; n < n_samples_; ++n) {
    if (all[n] == label) rows.push_back(n);
  }
  return subset(rows);
}

// --- geometry --------------------------------------------------------------

void StripGeometry::validate() const {
  if (side < 2 * rim + 2) {
    throw ArgumentError("strip geometry needs side - 2*rim >= 2 (side " + std::to_string(side) +
                        ", rim " + std::to_string(rim) + ")");
  }
  for (double v : {strip_value, square_value, background_value}) {
    if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("strip geometry values must lie in [0, 1]");
  }
}

void GridShape::validate(std::size_t m) const {
  if (rows == 0 || cols == 0) throw ArgumentError("grid extents must be positive");
  if (rows * cols != m) {
    throw ArgumentError("grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " does not cover " + std::to_string(m) + " sites");
  }
}

GridShape GridShape::parse(std::string_view text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string_view::npos) throw ArgumentError("shape must look like RxC");
  const std::string r(text.substr(0, x)), c(text.substr(x + 1));
  auto digits = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) {
      return std::isdigit(ch) != 0;
    });
  };
  if (!digits(r) || !digits(c)) throw ArgumentError("shape must look like RxC");
  GridShape g{std::stoul(r), std::stoul(c)};
  if (g.rows == 0 || g.cols == 0) throw ArgumentError("grid extents must be positive");
  return g;
}

StripRole strip_role(const StripGeometry& g, std::size_t pixel, std::size_t strip_column) {
  const auto row = pixel / g.side, col = pixel % g.side;
  const auto lo = g.rim, hi = g.side - g.rim;
  if (row < lo || row >= hi || col < lo || col >= hi) return StripRole::background;
  return col == lo + strip_column ? StripRole::strip : StripRole::square;
}

namespace {

double role_value(const StripGeometry& g, StripRole role) {
  switch (role) {
    case StripRole::background: return g.background_value;
    case StripRole::square: return g.square_value;
    case StripRole::strip: return g.strip_value;
  }
  return g.background_value;
}

}  // namespace

SampleBatch gen_strips(const StripGeometry& g) {
  g.validate();
  const auto n = g.square_side(), m = g.n_features();
  std::vector<double> features(n * m);
  std::vector<int> labels(n);
  for (std::size_t k = 0; k < n; ++k) {
    labels[k] = static_cast<int>(k);
    for (std::size_t p = 0; p < m; ++p) features[k * m + p] = role_value(g, strip_role(g, p, k));
  }
  return SampleBatch(n, m, std::move(features), std::move(labels));
}

SampleBatch gen_noisy_strips(const StripGeometry& g, std::size_t n_samples, double flip_prob,
                             std::uint64_t seed) {
  g.validate();
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) throw ArgumentError("flip_prob must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, g.square_side() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto m = g.n_features();
  std::vector<double> features(n_samples * m);
  std::vector<int> labels(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const auto k = pick(rng);
    labels[n] = static_cast<int>(k);
    for (std::size_t p = 0; p < m; ++p) {
      auto role = strip_role(g, p, k);
      const bool flip = unit(rng) < flip_prob;
      if (flip && role == StripRole::background) {
        role = StripRole::square;
      } else if (flip && role == StripRole::square) {
        role = StripRole::background;
      }
      features[n * m + p] = role_value(g, role);
    }
  }
  return SampleBatch(n_samples, m, std::move(features), std::move(labels));
}

// --- IDX -------------------------------------------------------------------

namespace {

constexpr std::uint32_t kIdxImages = 0x00000803;
constexpr std::uint32_t kIdxLabels = 0x00000801;

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const std::filesystem::path& path) {
  if (offset + 4 > bytes.size()) {
    throw FormatError(path.string() + ": truncated header at byte offset " +
                      std::to_string(offset));
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void check_magic(std::uint32_t magic, std::uint32_t expected, const std::filesystem::path& path) {
  if (magic != expected) {
    std::ostringstream os;
    os << path.string() << ": bad magic 0x" << std::hex << std::setw(8) << std::setfill('0')
       << magic << " at byte offset 0 (expected 0x" << std::setw(8) << expected << ")";
    throw FormatError(os.str());
  }
}

void check_payload(const std::vector<unsigned char>& bytes, std::size_t header,
                   std::size_t payload, const std::filesystem::path& path) {
  if (bytes.size() < header + payload) {
    throw FormatError(path.string() + ": truncated at byte offset " +
                      std::to_string(bytes.size()) + " (expected " +
                      std::to_string(header + payload) + " bytes)");
  }
}

void put_be32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

}  // namespace

SampleBatch load_idx_images(const std::filesystem::path& images, GridShape* shape) {
  const auto bytes = slurp(images);
  check_magic(read_be32(bytes, 0, images), kIdxImages, images);
  const std::size_t count = read_be32(bytes, 4, images);
  const std::size_t rows = read_be32(bytes, 8, images);
  const std::size_t cols = read_be32(bytes, 12, images);
  const std::size_t m = rows * cols;
  check_payload(bytes, 16, count * m, images);
  std::vector<double> features(count * m);
  for (std::size_t i = 0; i < features.size(); ++i) features[i] = bytes[16 + i] / 255.0;
  if (shape) *shape = GridShape{rows, cols};
  return SampleBatch(count, m, std::move(features));
}

std::vector<int> load_idx_labels(const std::filesystem::path& labels) {
  const auto bytes = slurp(labels);
  check_magic(read_be32(bytes, 0, labels), kIdxLabels, labels);
  const std::size_t count = read_be32(bytes, 4, labels);
  check_payload(bytes, 8, count, labels);
  return std::vector<int>(bytes.begin() + 8, bytes.begin() + 8 + static_cast<long>(count));
}

SampleBatch load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  auto batch = load_idx_images(images);
  auto lab = load_idx_labels(labels);
  if (lab.size() != batch.n_samples()) {
    throw FormatError(labels.string() + ": count " + std::to_string(lab.size()) +
                      " at byte offset 4 does not match " + std::to_string(batch.n_samples()) +
                      " images");
  }
  const auto m = batch.n_features();
  const auto f = batch.features();
  return SampleBatch(batch.n_samples(), m, std::vector<double>(f.begin(), f.end()),
                     std::move(lab));
}

void write_idx(const SampleBatch& batch, GridShape shape, const std::filesystem::path& images,
               const std::optional<std::filesystem::path>& labels) {
  shape.validate(batch.n_features());
  {
    std::ofstream out(images, std::ios::binary);
    if (!out) throw IoError("cannot write " + images.string());
    put_be32(out, kIdxImages);
    put_be32(out, static_cast<std::uint32_t>(batch.n_samples()));
    put_be32(out, static_cast<std::uint32_t>(shape.rows));
    put_be32(out, static_cast<std::uint32_t>(shape.cols));
    for (double x : batch.features()) out.put(static_cast<char>(std::lround(x * 255.0)));
    if (!out) throw IoError("failed writing " + images.string());
  }
  if (labels) {
    std::ofstream out(*labels, std::ios::binary);
    if (!out) throw IoError("cannot write " + labels->string());
    put_be32(out, kIdxLabels);
    put_be32(out, static_cast<std::uint32_t>(batch.n_samples()));
    for (int l : batch.labels()) {
      if (l < 0 || l > 255) throw ArgumentError("IDX labels must lie in 0..255");
      out.put(static_cast<char>(l));
    }
    if (!out) throw IoError("failed writing " + labels->string());
  }
}

// --- CSV and label text ----------------------------------------------------

namespace {

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path,
                              std::size_t line_no) {
  std::vector<double> row;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    auto end = line.find(',', pos);
    if (end == std::string::npos) end = line.size();
    std::string field = line.substr(pos, end - pos);
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    field = first == std::string::npos ? "" : field.substr(first, last - first + 1);
    if (field == "nan") {
      row.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      char* stop = nullptr;
      const double v = std::strtod(field.c_str(), &stop);
      if (field.empty() || *stop != '\0') {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                          field + "'");
      }
      row.push_back(v);
    }
    pos = end + 1;
  }
  return row;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::vector<std::vector<double>> read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line) || line[0] == '#') continue;
    rows.push_back(parse_row(line, path, line_no));
    if (rows.back().size() != rows.front().size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": ragged row");
    }
  }
  return rows;
}

void write_number(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
  } else {
    out << v;
  }
}

}  // namespace

SampleBatch read_csv_batch(const std::filesystem::path& path,
                           std::optional<std::vector<int>> labels) {
  const auto rows = read_table(path);
  const std::size_t m = rows.empty() ? 0 : rows.front().size();
  std::vector<double> features;
  features.reserve(rows.size() * m);
  for (const auto& r : rows) features.insert(features.end(), r.begin(), r.end());
  return SampleBatch(rows.size(), m, std::move(features), std::move(labels));
}

void write_csv_batch(const SampleBatch& batch, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t n = 0; n < batch.n_samples(); ++n) {
    const auto s = batch.sample(n);
    for (std::size_t m = 0; m < s.size(); ++m) {
      if (m) out << ',';
      write_number(out, s[m]);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path.string());
    unsigned char head[4] = {1, 1, 1, 1};
    probe.read(reinterpret_cast<char*>(head), 4);
    if (probe.gcount() == 4 && head[0] == 0 && head[1] == 0 && head[2] == 8 && head[3] == 1) {
      return load_idx_labels(path);
    }
  }
  std::ifstream in(path);
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line) || line[0] == '#') continue;
    char* stop = nullptr;
    const long v = std::strtol(line.c_str(), &stop, 10);
    if (stop == line.c_str() || !blank(stop)) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad label");
    }
    labels.push_back(static_cast<int>(v));
  }
  return labels;
}

void write_labels(std::span<const int> labels, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (int l : labels) out << l << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

SampleBatch read_samples(const std::filesystem::path& path,
                         const std::optional<std::filesystem::path>& labels) {
  std::optional<std::vector<int>> lab;
  if (labels) lab = read_labels(*labels);
  if (path.extension() == ".csv") return read_csv_batch(path, std::move(lab));
  auto batch = load_idx_images(path);
  if (!lab) return batch;
  const auto f = batch.features();
  return SampleBatch(batch.n_samples(), batch.n_features(),
                     std::vector<double>(f.begin(), f.end()), std::move(lab));
}

SampleBatch downscale(const SampleBatch& batch, GridShape shape, std::size_t factor) {
  shape.validate(batch.n_features());
  if (factor == 0 || shape.rows % factor || shape.cols % factor) {
    throw ArgumentError("downscale factor must divide both image extents");
  }
  const auto rows = shape.rows / factor, cols = shape.cols / factor;
  const double inv = 1.0 / static_cast<double>(factor * factor);
  std::vector<double> out(batch.n_samples() * rows * cols, 0.0);
  for (std::size_t n = 0; n < batch.n_samples(); ++n) {
    const auto s = batch.sample(n);
    double* o = out.data() + n * rows * cols;
    for (std::size_t r = 0; r < shape.rows; ++r) {
      for (std::size_t c = 0; c < shape.cols; ++c) {
        o[(r / factor) * cols + c / factor] += s[r * shape.cols + c] * inv;
      }
    }
    for (std::size_t i = 0; i < rows * cols; ++i) o[i] = std::clamp(o[i], 0.0, 1.0);
  }
  std::optional<std::vector<int>> labels;
  if (batch.has_labels()) labels = batch.labels();
  return SampleBatch(batch.n_samples(), rows * cols, std::move(out), std::move(labels));
}

// --- PGM -------------------------------------------------------------------

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(const std::vector<unsigned char>& bytes, std::size_t& pos,
                      const std::filesystem::path& path) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(bytes[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') {
    tok.push_back(static_cast<char>(bytes[pos++]));
  }
  if (tok.empty()) {
    throw FormatError(path.string() + ": truncated PGM at byte offset " + std::to_string(pos));
  }
  return tok;
}

std::size_t pgm_number(const std::vector<unsigned char>& bytes, std::size_t& pos,
                       const std::filesystem::path& path) {
  const auto start = pos;
  const auto tok = pgm_token(bytes, pos, path);
  if (!std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(c) != 0; })) {
    throw FormatError(path.string() + ": bad PGM number near byte offset " +
                      std::to_string(start));
  }
  return std::stoul(tok);
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  std::size_t pos = 0;
  const auto magic = pgm_token(bytes, pos, path);
  if (magic != "P2" && magic != "P5") {
    throw FormatError(path.string() + ": not a PGM file (byte offset 0)");
  }
  Image img;
  img.cols = pgm_number(bytes, pos, path);
  img.rows = pgm_number(bytes, pos, path);
  const auto maxval = pgm_number(bytes, pos, path);
  if (img.rows == 0 || img.cols == 0 || maxval == 0 || maxval > 65535) {
    throw FormatError(path.string() + ": bad PGM header");
  }
  const auto n = img.rows * img.cols;
  img.pixels.resize(n);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      img.pixels[i] = std::min<double>(pgm_number(bytes, pos, path), maxval) * scale;
    }
  } else {
    ++pos;  // single whitespace after maxval
    const std::size_t width = maxval < 256 ? 1 : 2;
    check_payload(bytes, pos, n * width, path);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t v = bytes[pos + i * width];
      if (width == 2) v = (v << 8) | bytes[pos + i * width + 1];
      img.pixels[i] = std::min<double>(static_cast<double>(v), maxval) * scale;
    }
  }
  return img;
}

void write_pgm(const Image& image, const std::filesystem::path& path) {
  if (image.pixels.size() != image.rows * image.cols) throw ArgumentError("image size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << image.cols << ' ' << image.rows << "\n255\n";
  for (double v : image.pixels) {
    out.put(static_cast<char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

// --- patches ---------------------------------------------------------------

PatchSet split_patches(const Image& image, std::size_t patch, double background) {
  if (patch == 0) throw ArgumentError("patch size must be positive");
  if (image.rows == 0 || image.cols == 0 || image.pixels.size() != image.rows * image.cols) {
    throw ArgumentError("image size mismatch");
  }
  PatchSet out;
  out.patch = patch;
  out.rows = image.rows;
  out.cols = image.cols;
  out.grid = {(image.rows + patch - 1) / patch, (image.cols + patch - 1) / patch};
  const auto m = patch * patch;
  std::vector<double> features(out.grid.size() * m, background);
  for (std::size_t pr = 0; pr < out.grid.rows; ++pr) {
    for (std::size_t pc = 0; pc < out.grid.cols; ++pc) {
      double* f = features.data() + (pr * out.grid.cols + pc) * m;
      for (std::size_t r = 0; r < patch; ++r) {
        for (std::size_t c = 0; c < patch; ++c) {
          const auto y = pr * patch + r, x = pc * patch + c;
          if (y < image.rows && x < image.cols) f[r * patch + c] = image.pixels[y * image.cols + x];
        }
      }
    }
  }
  out.patches = SampleBatch(out.grid.size(), m, std::move(features));
  return out;
}

Image join_patches(std::span<const double> values, GridShape grid, std::size_t patch,
                   std::size_t rows, std::size_t cols) {
  if (patch == 0 || grid.rows == 0 || grid.cols == 0) throw ArgumentError("empty patch grid");
  if (values.size() != grid.size() * patch * patch) {
    throw ArgumentError("expected " + std::to_string(grid.size() * patch * patch) +
                        " values, got " + std::to_string(values.size()));
  }
  if (rows > grid.rows * patch || cols > grid.cols * patch ||
      rows + patch <= grid.rows * patch || cols + patch <= grid.cols * patch) {
    throw ArgumentError("image size inconsistent with patch grid");
  }
  Image img{rows, cols, std::vector<double>(rows * cols)};
  const auto m = patch * patch;
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t x = 0; x < cols; ++x) {
      const auto k = (y / patch) * grid.cols + x / patch;
      img.pixels[y * cols + x] = values[k * m + (y % patch) * patch + x % patch];
    }
  }
  return img;
}

// --- heatmaps --------------------------------------------------------------

void export_heatmap(std::span<const double> values, GridShape shape,
                    const std::filesystem::path& path, HeatmapFormat format, bool clip_negative) {
  shape.validate(values.size());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  if (format == HeatmapFormat::csv) {
    out << std::setprecision(17);
    for (std::size_t r = 0; r < shape.rows; ++r) {
      for (std::size_t c = 0; c < shape.cols; ++c) {
        if (c) out << ',';
        write_number(out, values[r * shape.cols + c]);
      }
      out << '\n';
    }
  } else {
    std::vector<double> shown(values.begin(), values.end());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (auto& v : shown) {
      if (std::isnan(v)) continue;
      if (clip_negative) v = std::max(v, 0.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo > hi) lo = hi = 0.0;
    out << "P2\n# scale " << std::setprecision(17) << lo << ' ' << hi << '\n'
        << shape.cols << ' ' << shape.rows << "\n255\n";
    for (std::size_t r = 0; r < shape.rows; ++r) {
      for (std::size_t c = 0; c < shape.cols; ++c) {
        const double v = shown[r * shape.cols + c];
        long g = 0;
        if (!std::isnan(v) && hi > lo) g = std::lround((v - lo) / (hi - lo) * 255.0);
        out << (c ? " " : "") << g;
      }
      out << '\n';
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<double> read_heatmap_csv(const std::filesystem::path& path, GridShape* shape) {
  const auto rows = read_table(path);
  std::vector<double> out;
  for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  if (shape) *shape = GridShape{rows.size(), rows.empty() ? 0 : rows.front().size()};
  return out;
}

}  // namespace mpsee
