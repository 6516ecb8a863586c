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


// Acceptance run: one PASS / FAIL / SKIP line per criterion.  Exit status is
// non-zero only for unexpected failures; criteria known to be unattainable
// print "FAIL (known)" and are documented in the README.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "dense_oracle.hpp"
#include "generators.hpp"
#include "mpsee/data.hpp"
#include "mpsee/entanglement.hpp"
#include "mpsee/errors.hpp"
#include "mpsee/pipelines.hpp"
#include "mpsee/training.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mpsee;
using Clock = std::chrono::steady_clock;

enum class Status { pass, fail, known_fail, skip };

struct Outcome {
  Status status = Status::pass;
  std::string detail;
};

int unexpected_failures = 0;

void report(const std::string& id, const std::string& title, double limit_s,
            const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {Status::fail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s && (o.status == Status::pass)) {
    o.status = Status::fail;
    o.detail += "; runtime limit " + std::to_string(limit_s) + " s exceeded";
  }
  const char* tag = "PASS";
  switch (o.status) {
    case Status::pass: break;
    case Status::fail: tag = "FAIL"; ++unexpected_failures; break;
    case Status::known_fail: tag = "FAIL (known)"; break;
    case Status::skip: tag = "SKIP"; break;
  }
  std::printf("%s  %-4s %s | %s | %.2f s\n", tag, id.c_str(), title.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Outcome check(bool ok, std::string detail) {
  return {ok ? Status::pass : Status::fail, std::move(detail)};
}

const EncoderConfig kBinary{2, 1.0};
const double kLn2 = std::log(2.0);

SampleBatch batch_of(std::vector<std::vector<double>> rows) {
  std::vector<double> f;
  for (const auto& r : rows) f.insert(f.end(), r.begin(), r.end());
  return SampleBatch(rows.size(), rows.front().size(), std::move(f));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

oracle::DenseState dense_of(const Mps& mps) {
  auto s = oracle::from_sites(mps.sites());
  const double z = std::sqrt(oracle::norm2(s));
  for (auto& a : s.amp) a /= z;
  return s;
}

// --- 1, 2: analytic states --------------------------------------------------

Outcome two_string_suite() {
  const auto mps = from_samples(batch_of({{0, 0, 1}, {0, 1, 0}}), kBinary, 4).state;
  const auto s = entropy_profile(mps).values;
  double err = std::max({std::abs(s[0]), std::abs(s[1] - kLn2), std::abs(s[2] - kLn2)});
  const std::vector<double> up{1.0, 0.0};
  const auto m = measure_site(mps, 2, up);
  const auto post = dense_of(m.state);  // expected [1,0] x [0,1] = |01>
  const double phi_err = std::abs(std::abs(post.amp[1]) - 1.0);
  const double w_err = std::abs(m.weight - 0.5);
  const std::vector<double> x{0, 0, 1};
  const double d1 = delta_s(mps, x, kBinary, 1), d2 = delta_s(mps, x, kBinary, 2);
  const double ds_err = std::max(std::abs(d1 + kLn2 / 2), std::abs(d2 + kLn2 / 2));
  const bool ok = err <= 1e-10 && phi_err <= 1e-10 && w_err <= 1e-10 && ds_err <= 1e-10;
  return check(ok, fmt("S=[%.3g, %.12f, %.12f]; weight %.12f; dS at entangled sites %.12f, %.12f",
                       s[0], s[1], s[2], m.weight, d1, d2));
}

Outcome three_string_suite() {
  const auto mps = from_samples(batch_of({{0, 1, 0}, {1, 0, 0}, {1, 1, 1}}), kBinary, 4).state;
  const auto s = entropy_profile(mps).values;
  const double target = std::log(3.0) - 2.0 / 3.0 * kLn2;
  const std::vector<double> up{1.0, 0.0};
  const auto m = measure_site(mps, 2, up);
  const auto after = entropy_profile(m.state).values;
  const double ds = delta_s(mps, std::vector<double>{1, 0, 0}, kBinary, 2);
  const bool ok = std::abs(s[0] - target) <= 1e-6 && std::abs(s[1] - target) <= 1e-6 &&
                  std::abs(after[0] - kLn2) <= 1e-10 && std::abs(after[1] - kLn2) <= 1e-10 &&
                  ds > 0;
  return check(ok, fmt("S1=S2=%.8f (target %.8f); after measuring: %.12f, %.12f; <dS>=%+.6f",
                       s[0], target, after[0], after[1], ds));
}

// --- 3: strips phenomenology -----------------------------------------------

Outcome strips_phenomenology() {
  const StripGeometry g;
  const auto batch = gen_strips(g);
  TrainConfig cfg;
  cfg.chi_max = 16;
  cfg.n_sweeps = 30;
  const auto [mps, trace] = train(batch, cfg);
  const auto s = entropy_profile(mps).values;
  double bg_s = 0.0, inf_sum = 0.0;
  std::size_t inf_n = 0;
  for (std::size_t p = 0; p < s.size(); ++p) {
    if (strip_role(g, p, 0) == StripRole::background) {
      bg_s = std::max(bg_s, s[p]);
    } else {
      inf_sum += s[p];
      ++inf_n;
    }
  }
  const double inf_mean = inf_sum / static_cast<double>(inf_n);
  const EntanglementAnalyzer analyzer(mps);
  double bg_ds = 0.0, worst_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < batch.n_samples(); ++n) {
    const auto map = delta_s_map(analyzer, batch.sample(n), cfg.encoder).values;
    std::vector<double> strip, rest;
    const auto col = static_cast<std::size_t>(batch.label(n));
    for (std::size_t p = 0; p < map.size(); ++p) {
      const double v = std::abs(map[p]);
      switch (strip_role(g, p, col)) {
        case StripRole::background: bg_ds = std::max(bg_ds, v); break;
        case StripRole::strip: strip.push_back(v); break;
        case StripRole::square: rest.push_back(v); break;
      }
    }
    worst_ratio = std::min(worst_ratio, median(strip) / median(rest));
  }
  const bool ok = bg_s <= 1e-3 && bg_ds <= 1e-10 && inf_mean >= 0.05 && inf_mean <= 0.5 &&
                  worst_ratio >= 5.0;
  return check(ok, fmt("NLL %.5f; max background S %.2e; max background |<dS>| %.2e; "
                       "informative mean S %.4f; min strip/non-strip median ratio %.2f",
                       trace.final_loss(), bg_s, bg_ds, inf_mean, worst_ratio));
}

// --- 4: dense oracle -------------------------------------------------------

Outcome oracle_equivalence() {
  gen::Rng rng(2026);
  double worst = 0.0;
  const int instances = 24;
  for (int trial = 0; trial < instances; ++trial) {
    const auto m = gen::uniform_index(rng, 2, 10);
    const auto d = gen::uniform_index(rng, 2, 3);
    const auto chi = gen::uniform_index(rng, 1, 8);
    const EncoderConfig cfg{d, gen::uniform(rng, 0.2, 1.0)};
    const auto mps = init_random(m, d, chi, static_cast<std::uint64_t>(trial));
    const auto ref = dense_of(mps);
    const auto raw = oracle::from_sites(mps.sites());
    const auto batch = gen::random_batch(rng, 4, m);
    double nll_ref = 0.0;
    for (std::size_t n = 0; n < 4; ++n) {
      const auto s = batch.sample(n);
      const std::vector<double> x(s.begin(), s.end());
      const auto f = oracle::encode_all(x, d, cfg.theta);
      const double a = amplitude(mps, encode_sample(x, cfg));
      worst = std::max(worst, std::abs(a - oracle::overlap(raw, f)));
      nll_ref -= std::log(oracle::probability(ref, f)) / 4.0;
    }
    worst = std::max(worst, std::abs(nll(mps, batch, cfg).value - nll_ref) /
                                std::max(1.0, std::abs(nll_ref)));
    const auto s = entropy_profile(mps).values;
    const auto s_ref = oracle::entropies(ref);
    for (std::size_t k = 0; k < m; ++k) worst = std::max(worst, std::abs(s[k] - s_ref[k]));
    const auto x = gen::random_sample(rng, m);
    const auto f = oracle::encode_all(x, d, cfg.theta);
    const EntanglementAnalyzer analyzer(mps);
    const auto map = delta_s_map(analyzer, x, cfg).values;
    for (std::size_t k = 0; k < m; ++k) {
      worst = std::max(worst, std::abs(analyzer.measure(k, f[k]).weight -
                                       oracle::measure(ref, k, f[k]).second));
      worst = std::max(worst, std::abs(map[k] - oracle::delta_s(ref, f, k)));
    }
  }
  return check(worst <= 1e-8, fmt("%d instances (M<=10, d in {2,3}, chi<=8); worst deviation %.2e",
                                  instances, worst));
}

// --- 5: gradient check -----------------------------------------------------

Outcome gradient_check() {
  gen::Rng rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto batch = gen::random_batch(rng, 3, 5);
    auto mps = init_random(5, 2, 4, static_cast<std::uint64_t>(100 + trial));
    const auto c = gen::uniform_index(rng, 0, 4);
    mps.move_center(c);
    const auto grad = local_gradient(mps, batch, {});
    double diff2 = 0.0, ref2 = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      auto plus = mps, minus = mps;
      auto tp = mps.site(c), tm = mps.site(c);
      tp[i] += 1e-6;
      tm[i] -= 1e-6;
      plus.set_center_tensor(tp);
      minus.set_center_tensor(tm);
      const double fd = (nll(plus, batch, {}).value - nll(minus, batch, {}).value) / 2e-6;
      diff2 += (grad[i] - fd) * (grad[i] - fd);
      ref2 += fd * fd;
    }
    worst = std::max(worst, std::sqrt(diff2 / ref2));
  }
  return check(worst <= 1e-4, fmt("5 configurations (M=5, N=3, chi=4); worst relative error %.2e",
                                  worst));
}

// --- 6: training bound and convergence -------------------------------------

Outcome distinct_batch_bound() {
  gen::Rng rng(6);
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 6; ++trial) {
    const auto n = gen::uniform_index(rng, 2, 10);
    const auto batch = gen::distinct_binary_batch(rng, n, 9);
    TrainConfig cfg;
    cfg.chi_max = 8;
    cfg.encoder = kBinary;
    cfg.n_sweeps = 20;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto [mps, trace] = train(batch, cfg);
    for (double l : trace.per_sweep) {
      worst_margin = std::min(worst_margin, l - std::log(static_cast<double>(n)));
    }
  }
  return check(worst_margin >= -1e-9,
               fmt("6 distinct binary batches at theta=1; min (NLL - ln N) over all sweeps %.3e",
                   worst_margin));
}

struct StripsRun {
  LossTrace trace;
  double bound = 0.0;
};

const StripsRun& strips_run() {
  static const StripsRun run = [] {
    const auto batch = gen_strips(StripGeometry{});
    TrainConfig cfg;
    cfg.n_sweeps = 30;
    StripsRun r;
    r.trace = train(batch, cfg).second;
    r.bound = nll_lower_bound(batch, cfg.encoder);
    return r;
  }();
  return run;
}

Outcome strips_convergence() {
  const auto& r = strips_run();
  const double ln_n = std::log(8.0);
  std::size_t reached = 0;
  for (std::size_t k = 0; k < r.trace.per_sweep.size() && !reached; ++k) {
    if (std::abs(r.trace.per_sweep[k] - ln_n) <= 0.1 * ln_n) reached = k + 1;
  }
  return check(reached > 0, fmt("strips (8 positions): NLL %.5f vs ln 8 = %.5f; within 10%% at "
                                "sweep %zu",
                                r.trace.final_loss(), ln_n, reached));
}

Outcome strips_log_n_bound() {
  const auto& r = strips_run();
  const double ln_n = std::log(8.0);
  const double low = *std::min_element(r.trace.per_sweep.begin(), r.trace.per_sweep.end());
  const bool literal = low >= ln_n - 1e-9;
  const bool general = low >= r.bound - 1e-9;
  Outcome o{literal ? Status::pass : (general ? Status::known_fail : Status::fail),
            fmt("strips at theta=0.5: min NLL %.6f vs ln 8 = %.6f; overlapping encodings give "
                "the lower bound H - ln(lambda_max(Gram)) = %.6f, which %s",
                low, ln_n, r.bound, general ? "holds" : "is violated")};
  return o;
}

// --- 7: feature selection on digits -----------------------------------------

Outcome feature_selection() {
  const char* env = std::getenv("MPSEE_MNIST_DIR");
  const fs::path dir = env && *env ? env : MPSEE_MNIST_DIR;
  const auto images = dir / "train-images-idx3-ubyte";
  if (dir.empty() || !fs::exists(images)) {
    return {Status::skip, "digit data not found in '" + dir.string() + "'"};
  }
  GridShape shape;
  auto train_all = load_idx(images, dir / "train-labels-idx1-ubyte");
  load_idx_images(images, &shape);
  auto test = load_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
  // Up to 500 training samples per class.
  std::vector<std::size_t> keep;
  std::vector<std::size_t> per_class(256, 0);
  for (std::size_t n = 0; n < train_all.n_samples(); ++n) {
    if (per_class[static_cast<std::size_t>(train_all.label(n))]++ < 500) keep.push_back(n);
  }
  auto train_set = downscale(train_all.subset(keep), shape, 2);
  test = downscale(test, shape, 2);
  TrainConfig cfg;
  cfg.chi_max = 8;
  const auto models = train_class_models(train_set, cfg);
  const auto m = train_set.n_features();
  const auto selection = select_features(models, m / 2);
  const auto top = selection.selected();
  const auto bottom = selection.bottom(m / 2);
  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), 0);
  const auto full = evaluate(models, test);
  const auto all_sel = evaluate(models, test, std::span<const std::size_t>(all));
  const auto top_r = evaluate(models, test, std::span<const std::size_t>(top));
  const auto bottom_r = evaluate(models, test, std::span<const std::size_t>(bottom));
  const bool ok = top_r.accuracy >= bottom_r.accuracy + 0.1 && all_sel.accuracy == full.accuracy;
  return check(ok, fmt("%zu train / %zu test at 14x14, chi=8: accuracy full %.3f, all-sites "
                       "restricted %.3f, top-%zu %.3f, bottom-%zu %.3f",
                       train_set.n_samples(), test.n_samples(), full.accuracy, all_sel.accuracy,
                       m / 2, top_r.accuracy, m / 2, bottom_r.accuracy));
}

// --- 8: segmentation shape ---------------------------------------------------

Outcome segmentation_shape() {
  const std::size_t patch = 7, side = 168, grid = side / patch;
  Image img{side, side, std::vector<double>(side * side, 1.0)};
  for (std::size_t p = 0; p < grid * grid; ++p) {
    const auto r0 = (p / grid) * patch, c0 = (p % grid) * patch;
    const auto col = (p * 3) % patch;
    for (std::size_t r = 0; r < patch; ++r) img.pixels[(r0 + r) * side + c0 + col] = 0.1;
  }
  TrainConfig cfg;
  cfg.chi_max = 8;
  const auto result = segment(img, patch, cfg);
  const auto dir = fs::temp_directory_path() / "mpsee_acceptance";
  fs::create_directories(dir);
  export_heatmap(result.map.pixels, GridShape{side, side}, dir / "segment.pgm", HeatmapFormat::pgm,
                 true);
  const auto back = read_pgm(dir / "segment.pgm");
  std::size_t negatives = 0, clipped = 0;
  for (std::size_t i = 0; i < back.pixels.size(); ++i) {
    if (result.map.pixels[i] < 0) {
      ++negatives;
      clipped += back.pixels[i] == 0.0;
    }
  }
  fs::remove_all(dir);
  const bool ok = result.patches.patches.n_samples() == 576 &&
                  result.patches.patches.n_features() == 49 && result.map.rows == side &&
                  result.map.cols == side && back.rows == side && back.cols == side &&
                  clipped == negatives;
  return check(ok, fmt("%zu patches x %zu features; map %zux%zu; %zu negative pixels, %zu shown "
                       "as 0",
                       result.patches.patches.n_samples(), result.patches.patches.n_features(),
                       result.map.rows, result.map.cols, negatives, clipped));
}

// --- 9: noisy strips ---------------------------------------------------------

struct NoisyScore {
  std::size_t samples_checked = 0;
  std::size_t samples_ok = 0;
  double worst_gap = std::numeric_limits<double>::infinity();  // min strip - max noise tile
};

NoisyScore noisy_exclusion(std::size_t n_train) {
  StripGeometry g;
  g.side = 12;
  g.rim = 3;
  const auto batch = gen_noisy_strips(g, n_train, 0.02, 7);
  TrainConfig cfg;
  const auto mps = train(batch, cfg).first;
  const auto tiles = RegionSpec::tiles(g.side, g.side, 3);
  NoisyScore score;
  for (std::size_t n = 0; n < batch.n_samples(); ++n) {
    const auto col = static_cast<std::size_t>(batch.label(n));
    const auto sample = batch.sample(n);
    const auto values = region_delta_s_map(mps, sample, cfg.encoder, tiles);
    double min_strip = std::numeric_limits<double>::infinity(), max_noise = -1.0;
    for (std::size_t t = 0; t < tiles.regions.size(); ++t) {
      bool strip = false, background = true;
      std::size_t noise = 0;
      for (auto p : tiles.regions[t]) {
        const auto role = strip_role(g, p, col);
        strip |= role == StripRole::strip;
        if (role != StripRole::background) {
          background = false;
        } else if (sample[p] != g.background_value) {
          ++noise;
        }
      }
      const double v = std::abs(values[t]);
      if (strip) min_strip = std::min(min_strip, v);
      if (background && noise == 1) max_noise = std::max(max_noise, v);
    }
    if (max_noise < 0) continue;
    ++score.samples_checked;
    score.samples_ok += max_noise < min_strip;
    score.worst_gap = std::min(score.worst_gap, min_strip - max_noise);
  }
  return score;
}

Outcome noisy_strips() {
  const auto big = noisy_exclusion(540);
  const auto small = noisy_exclusion(6);
  const bool ok = big.samples_checked > 0 && big.samples_ok == big.samples_checked &&
                  small.samples_ok == small.samples_checked;
  return check(ok, fmt("12x12 strips, 3x3 tiles, flip 0.02: N=540 %zu/%zu samples with an "
                       "isolated background noise pixel excluded (min gap %.2e); N=6 %zu/%zu",
                       big.samples_ok, big.samples_checked, big.worst_gap, small.samples_ok,
                       small.samples_checked));
}

// --- 10: performance -------------------------------------------------------

double time_delta_s_map(const Mps& mps, const std::vector<double>& x, int threads) {
  omp_set_num_threads(threads);
  const auto t0 = Clock::now();
  const auto map = delta_s_map(mps, x, {});
  (void)map;
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct PerfSetup {
  Mps mps = init_random(784, 2, 16, 3);
  std::vector<double> x;
  PerfSetup() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    x.resize(784);
    for (auto& v : x) v = u(rng);
  }
};

const PerfSetup& perf_setup() {
  static const PerfSetup setup;
  return setup;
}

double single_thread_seconds = 0.0;

Outcome perf_single_thread() {
  const auto& p = perf_setup();
  single_thread_seconds = time_delta_s_map(p.mps, p.x, 1);
  return check(single_thread_seconds <= 300.0,
               fmt("M=784, chi=16, d=2 single-threaded: %.2f s", single_thread_seconds));
}

Outcome perf_scaling() {
  const unsigned cores = std::thread::hardware_concurrency();
  if (cores < 4) {
    return {Status::skip, fmt("needs at least 4 cores, found %u", cores)};
  }
  const auto& p = perf_setup();
  const double t4 = time_delta_s_map(p.mps, p.x, 4);
  omp_set_num_threads(static_cast<int>(cores));
  const double speedup = single_thread_seconds / t4;
  return check(speedup >= 3.0, fmt("4 threads: %.2f s, speedup %.2fx", t4, speedup));
}

}  // namespace

int main() {
  std::printf("acceptance run (%u hardware threads)\n", std::thread::hardware_concurrency());
  report("1", "two-string analytic state", 1.0, two_string_suite);
  report("2", "three-string analytic state", 1.0, three_string_suite);
  report("3", "strips phenomenology", 120.0, strips_phenomenology);
  report("4", "dense-oracle equivalence", 60.0, oracle_equivalence);
  report("5", "gradient check", 10.0, gradient_check);
  report("6a", "ln N bound on distinct orthogonal batches", 0.0, distinct_batch_bound);
  report("6b", "strips convergence within 10% of ln N", 0.0, strips_convergence);
  report("6c", "ln N bound on the strips batch", 0.0, strips_log_n_bound);
  report("7", "entanglement feature selection", 900.0, feature_selection);
  report("8", "segmentation pipeline shape", 600.0, segmentation_shape);
  report("9", "noisy-strip background exclusion", 0.0, noisy_strips);
  report("10a", "delta_s_map runtime", 300.0, perf_single_thread);
  report("10b", "delta_s_map parallel scaling", 0.0, perf_scaling);
  std::printf("%d unexpected failure(s)\n", unexpected_failures);
  return unexpected_failures == 0 ? 0 : 1;
}
