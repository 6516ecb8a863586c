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

#ifndef MPSEE_PIPELINES_HPP
#define MPSEE_PIPELINES_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpsee/data.hpp"
#include "mpsee/feature_map.hpp"
#include "mpsee/mps.hpp"
#include "mpsee/sample_batch.hpp"
#include "mpsee/training.hpp"

namespace mpsee {

struct ClassModel {
  int label = 0;
  Mps model;
};

/// One generative model per class, ordered by ascending label.
struct ClassModelSet {
  EncoderConfig encoder{};
  std::vector<ClassModel> models;

  /// Labels unique and ascending; every model has the same size and d.
  void validate() const;
  std::size_t n_features() const;

  /// Writes DIR/class_<label>.mps for every model.
  void save(const std::filesystem::path& dir) const;
  /// Loads every class_<label>.mps in DIR.  Model files do not store the
  /// feature-map angle, so `encoder.theta` must be supplied; d is taken from
  /// the models.
  static ClassModelSet load(const std::filesystem::path& dir, const EncoderConfig& encoder);
};

/// Trains one model per label present in `batch`, seeding class c with
/// cfg.seed ^ c.  `traces`, when given, receives one loss trace per class.
ClassModelSet train_class_models(const SampleBatch& batch, const TrainConfig& cfg,
                                 std::vector<LossTrace>* traces = nullptr);

struct Prediction {
  /// Empty when every class gives the sample zero probability.
  std::optional<int> label;
  /// Per-class log score, aligned with ClassModelSet::models.
  std::vector<double> scores;

  bool classified() const { return label.has_value(); }
};

/// argmax over classes of log_prob; ties go to the lowest label.
Prediction classify(const ClassModelSet& models, std::span<const double> sample);

enum class SelectionRanking { max, mean };

struct SelectionResult {
  /// Every site, by descending cross-class entropy; scores within 1e-12 tie
  /// and keep the lower index first.
  std::vector<std::size_t> ranked;
  /// Cross-class entropy score of each site, indexed by site.
  std::vector<double> scores;
  std::size_t chosen = 0;

  /// The top `chosen` sites.
  std::vector<std::size_t> selected() const;
  /// The `count` lowest-ranked sites.
  std::vector<std::size_t> bottom(std::size_t count) const;
};

/// Ranks sites by the maximum (or mean) of S_m over the class models and
/// keeps the top m_f.  Requires 1 <= m_f <= M.
SelectionResult select_features(const ClassModelSet& models, std::size_t m_f,
                                 SelectionRanking ranking = SelectionRanking::max);

/// Scores each class by the log of the joint marginal probability of the
/// sample's features on `sites`, all other features traced out.
Prediction classify_restricted(const ClassModelSet& models, std::span<const double> sample,
                               std::span<const std::size_t> sites);

struct EvalReport {
  double accuracy = 0.0;
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t unclassifiable = 0;
  /// Labels indexing the confusion matrix rows (truth) and columns
  /// (prediction); model labels first, then any test-only labels.
  std::vector<int> labels;
  std::vector<std::vector<std::size_t>> confusion;
  /// Sites used for scoring; empty means every site.
  std::vector<std::size_t> sites;

  /// Plain-text report; `echo` lines are written first as '#' comments.
  void write(const std::filesystem::path& path, std::span<const std::string> echo = {}) const;
};

/// Accuracy over a labeled batch, with classify or (when `sites` is given)
/// classify_restricted.  Unclassifiable samples count as incorrect.
EvalReport evaluate(const ClassModelSet& models, const SampleBatch& test,
                    std::optional<std::span<const std::size_t>> sites = std::nullopt);

struct SegmentResult {
  Image map;            // per-pixel <dS>, same size as the input image
  PatchSet patches;
  Mps model = Mps::trivial(2, 1);
  LossTrace trace;
};

/// Splits the image into patches, trains one model on all of them and joins
/// the per-patch <dS> maps.  An image whose patches are all identical gets
/// the exact product-state model (and therefore an all-zero map).
SegmentResult segment(const Image& image, std::size_t patch, const TrainConfig& cfg);

}  // namespace mpsee

#endif  // MPSEE_PIPELINES_HPP
