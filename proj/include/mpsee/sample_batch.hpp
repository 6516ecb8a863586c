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

#ifndef MPSEE_SAMPLE_BATCH_HPP
#define MPSEE_SAMPLE_BATCH_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mpsee {

/// N samples of M features in [0,1], stored row-major, with optional labels.
///
/// The constructor rejects any feature outside [0,1] (DomainError naming the
/// flat feature index) and label vectors whose length is not N.
class SampleBatch {
 public:
  SampleBatch() = default;
  SampleBatch(std::size_t n_samples, std::size_t n_features, std::vector<double> features,
              std::optional<std::vector<int>> labels = std::nullopt);

  std::size_t n_samples() const { return n_samples_; }
  std::size_t n_features() const { return n_features_; }
  bool empty() const { return n_samples_ == 0; }

  std::span<const double> sample(std::size_t n) const {
    return std::span(features_).subspan(n * n_features_, n_features_);
  }
  std::span<const double> features() const { return features_; }

  bool has_labels() const { return labels_.has_value(); }
  const std::vector<int>& labels() const;
  int label(std::size_t n) const { return labels().at(n); }

  /// Samples at the given row indices (labels carried along).
  SampleBatch subset(std::span<const std::size_t> rows) const;
  /// Rows whose label equals `label`.
  SampleBatch with_label(int label) const;

 private:
  std::size_t n_samples_ = 0;
  std::size_t n_features_ = 0;
  std::vector<double> features_;
  std::optional<std::vector<int>> labels_;
};

}  // namespace mpsee

#endif  // MPSEE_SAMPLE_BATCH_HPP
