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

#include "mpsee/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <regex>
#include <set>

#include "mpsee/entanglement.hpp"
#include "mpsee/errors.hpp"
#include "parallel.hpp"

namespace mpsee {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Prediction pick_best(std::vector<double> scores, const ClassModelSet& models) {
  Prediction out;
  double best = kNegInf;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (scores[c] > best) {
      best = scores[c];
      out.label = models.models[c].label;
    }
  }
  out.scores = std::move(scores);
  return out;
}

void check_sample(const ClassModelSet& models, std::span<const double> sample) {
  if (models.models.empty()) throw ArgumentError("no class models");
  if (sample.size() != models.n_features()) {
    throw ArgumentError("sample has " + std::to_string(sample.size()) + " features, models have " +
                        std::to_string(models.n_features()));
  }
}

}  // namespace

// --- model sets ------------------------------------------------------------

void ClassModelSet::validate() const {
  encoder.validate();
  for (std::size_t c = 0; c < models.size(); ++c) {
    if (c > 0 && models[c].label <= models[c - 1].label) {
      throw ArgumentError("class labels must be unique and ascending");
    }
    if (models[c].model.size() != models.front().model.size() ||
        models[c].model.phys_dim() != encoder.d) {
      throw ArgumentError("class models disagree in size or physical dimension");
    }
  }
}

std::size_t ClassModelSet::n_features() const {
  return models.empty() ? 0 : models.front().model.size();
}

void ClassModelSet::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& m : models) {
    save_mps(m.model, dir / ("class_" + std::to_string(m.label) + ".mps"));
  }
}

ClassModelSet ClassModelSet::load(const std::filesystem::path& dir, const EncoderConfig& encoder) {
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  const std::regex pattern("class_(-?[0-9]+)\\.mps");
  std::map<int, std::filesystem::path> found;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::smatch match;
    const auto name = entry.path().filename().string();
    if (std::regex_match(name, match, pattern)) found[std::stoi(match[1])] = entry.path();
  }
  if (found.empty()) throw IoError("no class_<label>.mps files in " + dir.string());
  ClassModelSet set;
  set.encoder = encoder;
  for (const auto& [label, path] : found) set.models.push_back({label, load_mps(path)});
  set.encoder.d = set.models.front().model.phys_dim();
  set.validate();
  return set;
}

ClassModelSet train_class_models(const SampleBatch& batch, const TrainConfig& cfg,
                                 std::vector<LossTrace>* traces) {
  cfg.validate();
  if (batch.empty()) throw ArgumentError("no training samples");
  const std::set<int> present(batch.labels().begin(), batch.labels().end());
  const std::vector<int> labels(present.begin(), present.end());
  std::vector<std::optional<std::pair<Mps, LossTrace>>> results(labels.size());
  detail::parallel_for(labels.size(), [&](std::size_t c) {
    const auto subset = batch.with_label(labels[c]);
    if (subset.empty()) throw ArgumentError("class " + std::to_string(labels[c]) + " is empty");
    TrainConfig local = cfg;
    local.seed = cfg.seed ^ static_cast<std::uint64_t>(labels[c]);
    results[c] = train(subset, local);
  });
  ClassModelSet set;
  set.encoder = cfg.encoder;
  if (traces) traces->clear();
  for (std::size_t c = 0; c < labels.size(); ++c) {
    set.models.push_back({labels[c], std::move(results[c]->first)});
    if (traces) traces->push_back(std::move(results[c]->second));
  }
  return set;
}

// --- classification --------------------------------------------------------

Prediction classify(const ClassModelSet& models, std::span<const double> sample) {
  check_sample(models, sample);
  std::vector<double> scores;
  scores.reserve(models.models.size());
  for (const auto& m : models.models) scores.push_back(log_prob(m.model, sample, models.encoder));
  return pick_best(std::move(scores), models);
}

std::vector<std::size_t> SelectionResult::selected() const {
  return {ranked.begin(), ranked.begin() + static_cast<long>(chosen)};
}

std::vector<std::size_t> SelectionResult::bottom(std::size_t count) const {
  count = std::min(count, ranked.size());
  return {ranked.end() - static_cast<long>(count), ranked.end()};
}

SelectionResult select_features(const ClassModelSet& models, std::size_t m_f,
                                SelectionRanking ranking) {
  const auto m = models.n_features();
  if (models.models.empty()) throw ArgumentError("no class models");
  if (m_f < 1 || m_f > m) {
    throw ArgumentError("feature count must lie in 1.." + std::to_string(m));
  }
  SelectionResult out;
  out.chosen = m_f;
  out.scores.assign(m, ranking == SelectionRanking::max ? kNegInf : 0.0);
  for (const auto& c : models.models) {
    const auto s = entropy_profile(c.model).values;
    for (std::size_t k = 0; k < m; ++k) {
      if (ranking == SelectionRanking::max) {
        out.scores[k] = std::max(out.scores[k], s[k]);
      } else {
        out.scores[k] += s[k] / static_cast<double>(models.models.size());
      }
    }
  }
  out.ranked.resize(m);
  std::iota(out.ranked.begin(), out.ranked.end(), 0);
  // Entropies equal up to rounding noise count as ties (lower index first).
  std::vector<double> key(m);
  for (std::size_t k = 0; k < m; ++k) key[k] = std::round(out.scores[k] * 1e12);
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [&](auto a, auto b) { return key[a] > key[b]; });
  return out;
}

Prediction classify_restricted(const ClassModelSet& models, std::span<const double> sample,
                               std::span<const std::size_t> sites) {
  check_sample(models, sample);
  std::vector<std::vector<double>> vectors;
  vectors.reserve(sites.size());
  for (auto m : sites) {
    if (m >= sample.size()) throw ArgumentError("selected site out of range");
    if (!(sample[m] >= 0.0 && sample[m] <= 1.0)) {
      throw DomainError("feature " + std::to_string(m) + " outside [0, 1]", m);
    }
    vectors.push_back(encode_feature(sample[m], models.encoder));
  }
  std::vector<double> scores;
  scores.reserve(models.models.size());
  for (const auto& c : models.models) scores.push_back(marginal_log_prob(c.model, sites, vectors));
  return pick_best(std::move(scores), models);
}

EvalReport evaluate(const ClassModelSet& models, const SampleBatch& test,
                    std::optional<std::span<const std::size_t>> sites) {
  if (test.empty()) throw ArgumentError("empty test set");
  models.validate();
  const auto& truth = test.labels();
  std::vector<std::optional<int>> predicted(test.n_samples());
  detail::parallel_for(test.n_samples(), [&](std::size_t n) {
    predicted[n] = sites ? classify_restricted(models, test.sample(n), *sites).label
                         : classify(models, test.sample(n)).label;
  });

  EvalReport r;
  for (const auto& c : models.models) r.labels.push_back(c.label);
  for (int l : truth) {
    if (std::find(r.labels.begin(), r.labels.end(), l) == r.labels.end()) r.labels.push_back(l);
  }
  auto index_of = [&](int l) {
    return static_cast<std::size_t>(std::find(r.labels.begin(), r.labels.end(), l) -
                                    r.labels.begin());
  };
  r.confusion.assign(r.labels.size(), std::vector<std::size_t>(r.labels.size(), 0));
  r.total = test.n_samples();
  if (sites) r.sites.assign(sites->begin(), sites->end());
  for (std::size_t n = 0; n < r.total; ++n) {
    if (!predicted[n]) {
      ++r.unclassifiable;
      continue;
    }
    ++r.confusion[index_of(truth[n])][index_of(*predicted[n])];
    if (*predicted[n] == truth[n]) ++r.correct;
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);
  return r;
}

void EvalReport::write(const std::filesystem::path& path, std::span<const std::string> echo) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& line : echo) out << "# " << line << '\n';
  out << "accuracy\t" << std::setprecision(10) << accuracy << '\n'
      << "correct\t" << correct << '\n'
      << "total\t" << total << '\n'
      << "unclassifiable\t" << unclassifiable << '\n'
      << "features\t" << (sites.empty() ? std::string("all") : std::to_string(sites.size()))
      << '\n'
      << "confusion (rows: true label, columns: predicted label)\n"
      << "label";
  for (int l : labels) out << '\t' << l;
  out << '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << labels[i];
    for (auto v : confusion[i]) out << '\t' << v;
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

// --- segmentation ----------------------------------------------------------

SegmentResult segment(const Image& image, std::size_t patch, const TrainConfig& cfg) {
  cfg.validate();
  for (double v : image.pixels) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("image pixels must lie in [0, 1]", 0);
  }
  auto patches = split_patches(image, patch);
  const auto& batch = patches.patches;
  const auto m = batch.n_features();

  bool uniform = true;
  const auto first = batch.sample(0);
  for (std::size_t n = 1; n < batch.n_samples() && uniform; ++n) {
    uniform = std::equal(first.begin(), first.end(), batch.sample(n).begin());
  }

  SegmentResult out;
  if (uniform) {
    const std::vector<std::size_t> one{0};
    auto product = from_samples(batch.subset(one), cfg.encoder, cfg.chi_max).state;
    out.trace.initial = nll(product, batch, cfg.encoder).value;
    out.trace.final_learning_rate = cfg.learning_rate;
    out.model = std::move(product);
  } else {
    auto [model, trace] = train(batch, cfg);
    out.model = std::move(model);
    out.trace = std::move(trace);
  }

  std::vector<double> values(batch.n_samples() * m, 0.0);
  if (uniform) {
    // A product state has no entanglement to vary.
    out.map = join_patches(values, patches.grid, patch, image.rows, image.cols);
    out.patches = std::move(patches);
    return out;
  }
  const EntanglementAnalyzer analyzer(out.model);
  for (std::size_t n = 0; n < batch.n_samples(); ++n) {
    const auto map = delta_s_map(analyzer, batch.sample(n), cfg.encoder, n);
    std::copy(map.values.begin(), map.values.end(), values.begin() + static_cast<long>(n * m));
  }
  out.map = join_patches(values, patches.grid, patch, image.rows, image.cols);
  out.patches = std::move(patches);
  return out;
}

}  // namespace mpsee
