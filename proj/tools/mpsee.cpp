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

// Command-line front end: dataset generation, training, entanglement maps,
// classification and segmentation.

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mpsee/data.hpp"
#include "mpsee/entanglement.hpp"
#include "mpsee/errors.hpp"
#include "mpsee/mps.hpp"
#include "mpsee/pipelines.hpp"
#include "mpsee/training.hpp"

namespace fs = std::filesystem;
using namespace mpsee;

namespace {

struct DataOptions {
  std::string data;
  std::string labels;
  std::string shape;
  std::size_t downscale = 1;
};

void add_data_options(CLI::App* cmd, DataOptions& o, bool data_required, bool with_labels) {
  cmd->add_option("--data", o.data, "Samples: .csv (one per line) or IDX images")
      ->required(data_required);
  if (with_labels) cmd->add_option("--labels", o.labels, "Labels: IDX or one integer per line");
  cmd->add_option("--shape", o.shape, "Raster shape RxC (taken from IDX headers when omitted)");
  cmd->add_option("--downscale", o.downscale, "Average-pool factor applied to IDX images")
      ->check(CLI::PositiveNumber);
}

struct LoadedData {
  SampleBatch batch;
  std::optional<GridShape> shape;
};

LoadedData load_data(const DataOptions& o) {
  LoadedData out;
  std::optional<fs::path> labels;
  if (!o.labels.empty()) labels = o.labels;
  if (fs::path(o.data).extension() == ".csv") {
    out.batch = read_samples(o.data, labels);
  } else {
    GridShape idx_shape;
    auto images = load_idx_images(o.data, &idx_shape);
    out.shape = idx_shape;
    if (labels) {
      const auto f = images.features();
      images = SampleBatch(images.n_samples(), images.n_features(),
                           std::vector<double>(f.begin(), f.end()), read_labels(*labels));
    }
    out.batch = std::move(images);
  }
  if (!o.shape.empty()) out.shape = GridShape::parse(o.shape);
  if (o.downscale > 1) {
    if (!out.shape) throw ArgumentError("--downscale needs a raster shape");
    out.batch = downscale(out.batch, *out.shape, o.downscale);
    out.shape = GridShape{out.shape->rows / o.downscale, out.shape->cols / o.downscale};
  }
  if (out.shape) out.shape->validate(out.batch.n_features());
  return out;
}

GridShape require_shape(const std::optional<GridShape>& shape, std::size_t m) {
  if (shape) {
    shape->validate(m);
    return *shape;
  }
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m))));
  if (side * side != m) throw ArgumentError("--shape RxC is required for non-square maps");
  return {side, side};
}

void write_heatmaps(std::span<const double> values, GridShape shape, const std::string& prefix,
                    bool clip_negative) {
  const fs::path parent = fs::path(prefix).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  export_heatmap(values, shape, prefix + ".csv", HeatmapFormat::csv);
  export_heatmap(values, shape, prefix + ".pgm", HeatmapFormat::pgm, clip_negative);
  std::cout << "wrote " << prefix << ".csv and " << prefix << ".pgm\n";
}

std::span<const double> pick_sample(const SampleBatch& batch, std::size_t index) {
  if (index >= batch.n_samples()) {
    throw ArgumentError("sample index " + std::to_string(index) + " out of range (" +
                        std::to_string(batch.n_samples()) + " samples)");
  }
  return batch.sample(index);
}

void print_trace(const LossTrace& trace, double lower_bound) {
  std::cout << "initial nll " << trace.initial << "\n";
  for (std::size_t k = 0; k < trace.per_sweep.size(); ++k) {
    std::cout << "sweep " << (k + 1) << " nll " << trace.per_sweep[k] << "\n";
  }
  std::cout << "lower bound " << lower_bound << ", final learning rate "
            << trace.final_learning_rate << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generative matrix product states and entanglement-based feature analysis"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (default: runtime choice)");

  TrainConfig tc;
  double theta = tc.encoder.theta;
  auto add_train_options = [&](CLI::App* cmd) {
    cmd->add_option("--chi", tc.chi_max, "Maximum bond dimension")->capture_default_str();
    cmd->add_option("--d", tc.encoder.d, "Physical dimension")->capture_default_str();
    cmd->add_option("--lr", tc.learning_rate, "Learning rate")->capture_default_str();
    cmd->add_option("--sweeps", tc.n_sweeps, "Number of sweeps")->capture_default_str();
    cmd->add_option("--seed", tc.seed, "Initialization seed")->capture_default_str();
    cmd->add_option("--clip", tc.grad_clip, "Gradient norm clip (0 disables)")
        ->capture_default_str();
  };
  auto add_theta = [&](CLI::App* cmd) {
    cmd->add_option("--theta", theta, "Feature-map angle scale in (0, 1]")->capture_default_str();
  };

  // gen-strips
  auto* gen = app.add_subcommand("gen-strips", "Write the strip toy dataset");
  StripGeometry geom;
  std::string gen_out;
  std::optional<double> noisy;
  std::size_t gen_count = 540;
  std::uint64_t gen_seed = 1;
  gen->add_option("--side", geom.side, "Image side")->capture_default_str();
  gen->add_option("--rim", geom.rim, "Background rim width")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--noisy", noisy, "Pixel flip probability (noisy variant)");
  gen->add_option("--count", gen_count, "Samples in the noisy variant")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Noise seed")->capture_default_str();

  // train
  auto* tr = app.add_subcommand("train", "Train one generative model");
  DataOptions tr_data;
  std::optional<int> tr_class;
  std::string tr_out, tr_metrics;
  add_data_options(tr, tr_data, true, true);
  add_train_options(tr);
  add_theta(tr);
  tr->add_option("--class", tr_class, "Train only on samples with this label");
  tr->add_option("--out", tr_out, "Model file")->required();
  tr->add_option("--metrics", tr_metrics, "Metrics file (default: MODEL.metrics.tsv)");

  // train-classes
  auto* tcls = app.add_subcommand("train-classes", "Train one model per label");
  DataOptions tcls_data;
  std::string tcls_out;
  add_data_options(tcls, tcls_data, true, true);
  tcls->get_option("--labels")->required();
  add_train_options(tcls);
  add_theta(tcls);
  tcls->add_option("--out", tcls_out, "Output directory for class_<label>.mps")->required();

  // ee
  auto* ee = app.add_subcommand("ee", "Entanglement entropy heatmap of a model");
  std::string model_path, out_prefix, shape_text;
  ee->add_option("--model", model_path, "Model file")->required();
  ee->add_option("--shape", shape_text, "Raster shape RxC");
  ee->add_option("--out", out_prefix, "Output prefix")->required();

  // deltas
  auto* deltas = app.add_subcommand("deltas", "Per-site average entropy variation map");
  DataOptions an_data;
  std::size_t sample_index = 0;
  bool clip_negative = false;
  deltas->add_option("--model", model_path, "Model file")->required();
  deltas->add_option("--sample-index", sample_index, "Sample row (0-based)")->required();
  add_data_options(deltas, an_data, true, false);
  add_theta(deltas);
  deltas->add_option("--out", out_prefix, "Output prefix")->required();
  deltas->add_flag("--clip-negative", clip_negative, "Clip negative values in the PGM");

  // ds-site
  auto* ds = app.add_subcommand("ds-site", "Per-site entropy changes after one measurement");
  std::string site_text;
  ds->add_option("--model", model_path, "Model file")->required();
  ds->add_option("--sample-index", sample_index, "Sample row (0-based)")->required();
  ds->add_option("--site", site_text, "min, max or a 0-based site index")->required();
  add_data_options(ds, an_data, true, false);
  add_theta(ds);
  ds->add_option("--out", out_prefix, "Output prefix")->required();

  // region-deltas
  auto* rd = app.add_subcommand("region-deltas", "Average entropy variation per measured tile");
  std::size_t tile = 3;
  rd->add_option("--model", model_path, "Model file")->required();
  rd->add_option("--sample-index", sample_index, "Sample row (0-based)")->required();
  rd->add_option("--tile", tile, "Tile side")->capture_default_str()->check(CLI::PositiveNumber);
  add_data_options(rd, an_data, true, false);
  add_theta(rd);
  rd->add_option("--out", out_prefix, "Output prefix")->required();

  // classify
  auto* cl = app.add_subcommand("classify", "Fidelity classification of a labeled batch");
  std::string models_dir, report_path, ranking_text = "max";
  std::optional<std::size_t> select;
  DataOptions cl_data;
  cl->add_option("--models", models_dir, "Directory of class_<label>.mps files")->required();
  add_data_options(cl, cl_data, true, true);
  cl->get_option("--labels")->required();
  cl->add_option("--select", select, "Keep the M_f sites with the largest entanglement");
  cl->add_option("--ranking", ranking_text, "Cross-class ranking: max or mean")
      ->check(CLI::IsMember({"max", "mean"}))
      ->capture_default_str();
  add_theta(cl);
  cl->add_option("--report", report_path, "Report file")->required();

  // segment
  auto* sg = app.add_subcommand("segment", "Unsupervised patch segmentation of a PGM image");
  std::string image_path;
  std::size_t patch = 7;
  sg->add_option("--image", image_path, "Grayscale PGM (P2 or P5)")->required();
  sg->add_option("--patch", patch, "Patch side")->capture_default_str()->check(CLI::PositiveNumber);
  add_train_options(sg);
  add_theta(sg);
  sg->add_option("--out", out_prefix, "Output prefix")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) omp_set_num_threads(threads);
    tc.encoder.theta = theta;

    if (gen->parsed()) {
      const auto batch = noisy ? gen_noisy_strips(geom, gen_count, *noisy, gen_seed)
                               : gen_strips(geom);
      fs::create_directories(gen_out);
      write_csv_batch(batch, fs::path(gen_out) / "samples.csv");
      write_labels(batch.labels(), fs::path(gen_out) / "labels.txt");
      std::cout << "wrote " << batch.n_samples() << " samples of " << batch.n_features()
                << " features (" << geom.side << "x" << geom.side << ") to " << gen_out << "\n";
    } else if (tr->parsed()) {
      auto data = load_data(tr_data);
      SampleBatch batch = tr_class ? data.batch.with_label(*tr_class) : data.batch;
      if (batch.empty()) throw ArgumentError("no training samples selected");
      auto [mps, trace] = train(batch, tc);
      fs::path out(tr_out);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      save_mps(mps, out);
      write_metrics(trace, tr_metrics.empty() ? tr_out + ".metrics.tsv" : tr_metrics);
      print_trace(trace, nll_lower_bound(batch, tc.encoder));
      std::cout << "wrote " << tr_out << "\n";
    } else if (tcls->parsed()) {
      const auto data = load_data(tcls_data);
      std::vector<LossTrace> traces;
      const auto models = train_class_models(data.batch, tc, &traces);
      models.save(tcls_out);
      for (std::size_t c = 0; c < models.models.size(); ++c) {
        const auto label = std::to_string(models.models[c].label);
        write_metrics(traces[c], fs::path(tcls_out) / ("class_" + label + ".metrics.tsv"));
        std::cout << "class " << label << ": nll " << traces[c].initial << " -> "
                  << traces[c].final_loss() << "\n";
      }
    } else if (ee->parsed()) {
      const auto mps = load_mps(model_path);
      std::optional<GridShape> shape;
      if (!shape_text.empty()) shape = GridShape::parse(shape_text);
      const auto profile = entropy_profile(mps);
      write_heatmaps(profile.values, require_shape(shape, mps.size()), out_prefix, false);
    } else if (deltas->parsed()) {
      const auto mps = load_mps(model_path);
      const auto data = load_data(an_data);
      tc.encoder.d = mps.phys_dim();
      const auto map =
          delta_s_map(mps, pick_sample(data.batch, sample_index), tc.encoder, sample_index);
      write_heatmaps(map.values, require_shape(data.shape, mps.size()), out_prefix,
                     clip_negative);
    } else if (ds->parsed()) {
      const auto mps = load_mps(model_path);
      const auto data = load_data(an_data);
      tc.encoder.d = mps.phys_dim();
      const auto sample = pick_sample(data.batch, sample_index);
      std::size_t site = 0;
      if (site_text == "min" || site_text == "max") {
        const auto map = delta_s_map(mps, sample, tc.encoder);
        double best = site_text == "min" ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
        bool found = false;
        for (std::size_t m = 0; m < map.values.size(); ++m) {
          const double v = map.values[m];
          if (is_unsupported(v)) continue;
          if (site_text == "min" ? v < best : v > best) {
            best = v;
            site = m;
            found = true;
          }
        }
        if (!found) throw ArgumentError("no site has a supported measurement outcome");
      } else {
        site = std::stoul(site_text);
      }
      const auto profile = ds_profile(mps, sample, tc.encoder, site);
      std::vector<double> full(mps.size(), std::numeric_limits<double>::quiet_NaN());
      for (std::size_t m = 0, j = 0; m < mps.size(); ++m) {
        if (m != site) full[m] = profile[j++];
      }
      std::cout << "measured site " << site << "\n";
      write_heatmaps(full, require_shape(data.shape, mps.size()), out_prefix, false);
    } else if (rd->parsed()) {
      const auto mps = load_mps(model_path);
      const auto data = load_data(an_data);
      tc.encoder.d = mps.phys_dim();
      const auto shape = require_shape(data.shape, mps.size());
      const auto regions = RegionSpec::tiles(shape.rows, shape.cols, tile);
      const auto scores =
          region_delta_s_map(mps, pick_sample(data.batch, sample_index), tc.encoder, regions);
      std::vector<double> pixels(mps.size());
      for (std::size_t k = 0; k < regions.regions.size(); ++k) {
        for (auto m : regions.regions[k]) pixels[m] = scores[k];
      }
      write_heatmaps(pixels, shape, out_prefix, false);
    } else if (cl->parsed()) {
      const auto data = load_data(cl_data);
      const auto models = ClassModelSet::load(models_dir, tc.encoder);
      std::vector<std::string> echo = {
          "models " + models_dir, "data " + cl_data.data, "labels " + cl_data.labels,
          "theta " + std::to_string(theta), "d " + std::to_string(models.encoder.d)};
      EvalReport report;
      if (select) {
        const auto ranking =
            ranking_text == "mean" ? SelectionRanking::mean : SelectionRanking::max;
        const auto sel = select_features(models, *select, ranking);
        const auto sites = sel.selected();
        echo.push_back("select " + std::to_string(*select) + " ranking " + ranking_text);
        report = evaluate(models, data.batch, std::span<const std::size_t>(sites));
      } else {
        report = evaluate(models, data.batch);
      }
      report.write(report_path, echo);
      std::cout << "accuracy " << report.accuracy << " (" << report.correct << "/"
                << report.total << ")\n";
    } else if (sg->parsed()) {
      const auto image = read_pgm(image_path);
      const auto result = segment(image, patch, tc);
      std::cout << result.patches.patches.n_samples() << " patches of "
                << result.patches.patches.n_features() << " pixels, final nll "
                << result.trace.final_loss() << "\n";
      write_heatmaps(result.map.pixels, GridShape{image.rows, image.cols}, out_prefix, true);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
