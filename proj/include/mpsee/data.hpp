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

#ifndef MPSEE_DATA_HPP
#define MPSEE_DATA_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mpsee/sample_batch.hpp"

namespace mpsee {

/// Square image with a background rim of width `rim` around an informative
/// square; each sample carries one vertical strip inside the square.
struct StripGeometry {
  std::size_t side = 16;
  std::size_t rim = 4;
  double strip_value = 0.1;
  double square_value = 1.0;
  double background_value = 0.0;

  /// Requires side - 2 rim >= 2 and all values in [0,1].
  void validate() const;
  std::size_t square_side() const { return side - 2 * rim; }
  std::size_t n_features() const { return side * side; }
};

/// Row-major raster of rows x cols sites.
struct GridShape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  /// Throws ArgumentError unless both extents are positive and rows*cols == m.
  void validate(std::size_t m) const;
  /// Parses "RxC".
  static GridShape parse(std::string_view text);
};

/// One sample per strip column, labeled by that column (0-based within the
/// informative square).
SampleBatch gen_strips(const StripGeometry& g);

/// Clean strip samples drawn uniformly with replacement, then every
/// background pixel turns into a square pixel and every square pixel into a
/// background pixel independently with probability flip_prob.  Strip pixels
/// are never flipped.  Labels are the strip columns.
SampleBatch gen_noisy_strips(const StripGeometry& g, std::size_t n_samples, double flip_prob,
                             std::uint64_t seed);

/// Per-pixel role in the clean strip images: 0 background, 1 square, 2 strip.
enum class StripRole : std::uint8_t { background, square, strip };
StripRole strip_role(const StripGeometry& g, std::size_t pixel, std::size_t strip_column);

/// Big-endian IDX images (magic 2051) and labels (magic 2049); pixels / 255.
SampleBatch load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);
SampleBatch load_idx_images(const std::filesystem::path& images, GridShape* shape = nullptr);
std::vector<int> load_idx_labels(const std::filesystem::path& labels);
/// Writes features rounded to bytes; labels must be in 0..255.
void write_idx(const SampleBatch& batch, GridShape shape, const std::filesystem::path& images,
               const std::optional<std::filesystem::path>& labels = std::nullopt);

/// One sample per line, comma-separated reals.
SampleBatch read_csv_batch(const std::filesystem::path& path,
                           std::optional<std::vector<int>> labels = std::nullopt);
void write_csv_batch(const SampleBatch& batch, const std::filesystem::path& path);
/// IDX labels (magic 2049) or plain text with one integer per line.
std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(std::span<const int> labels, const std::filesystem::path& path);

/// Samples from `path`: CSV when the extension is .csv, IDX images otherwise.
SampleBatch read_samples(const std::filesystem::path& path,
                         const std::optional<std::filesystem::path>& labels = std::nullopt);

/// Averages factor x factor blocks of every sample (shape divisible by factor).
SampleBatch downscale(const SampleBatch& batch, GridShape shape, std::size_t factor);

/// Grayscale raster with values in [0,1].
struct Image {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;
};

/// Reads P2 or P5 PGM (maxval <= 65535); pixels scaled to [0,1].
Image read_pgm(const std::filesystem::path& path);
/// Writes an 8-bit P5 PGM.
void write_pgm(const Image& image, const std::filesystem::path& path);

struct PatchSet {
  SampleBatch patches;
  GridShape grid;       // patches per column / row
  std::size_t patch = 0;
  std::size_t rows = 0;  // unpadded image size
  std::size_t cols = 0;
};

/// Cuts the image into patch x patch squares enumerated row-major, each
/// flattened row-major.  Images whose sides are not multiples of `patch`
/// are padded on the right and bottom with `background`.
PatchSet split_patches(const Image& image, std::size_t patch, double background = 0.0);

/// Inverse placement of split_patches; `values` holds patch*patch entries
/// per patch.  Padding is dropped.
Image join_patches(std::span<const double> values, GridShape grid, std::size_t patch,
                   std::size_t rows, std::size_t cols);

enum class HeatmapFormat { csv, pgm };

/// csv: one raster row per line.  pgm: P2 with values min-max scaled to
/// 0..255 (after clipping negatives to 0 when requested) and the bounds in
/// a comment line; a constant map becomes all 0.  NaN entries are written
/// as "nan" in csv and as 0 in pgm.
void export_heatmap(std::span<const double> values, GridShape shape,
                    const std::filesystem::path& path, HeatmapFormat format,
                    bool clip_negative = false);

/// Parses a csv heatmap back into a flat row-major vector.
std::vector<double> read_heatmap_csv(const std::filesystem::path& path, GridShape* shape = nullptr);

}  // namespace mpsee

#endif  // MPSEE_DATA_HPP
