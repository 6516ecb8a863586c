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

#include "mpsee/training.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <string>

#include "linalg.hpp"
#include "mpsee/errors.hpp"

namespace mpsee {

using detail::RowMatrix;

void TrainConfig::validate() const {
  encoder.validate();
  if (chi_max < 1) throw ArgumentError("chi_max must be positive");
  if (!(learning_rate >= 0.0 && learning_rate <= 1.0)) {
    throw ArgumentError("learning rate must lie in [0, 1]");
  }
  if (n_sweeps < 1) throw ArgumentError("n_sweeps must be at least 1");
  if (grad_clip < 0.0) throw ArgumentError("grad_clip must be non-negative");
}

namespace {

constexpr double kUnderflow = 1e-300;

// Per-sample boundary vectors of the chain, one N x bond matrix per bond.
// Each row is rescaled to unit max-abs; the log of the scale is kept apart
// so long chains never underflow.
struct Environment {
  RowMatrix vec;
  Eigen::VectorXd log_scale;
};

void rescale_rows(Environment& env) {
  for (Eigen::Index n = 0; n < env.vec.rows(); ++n) {
    const double peak = env.vec.row(n).cwiseAbs().maxCoeff();
    if (peak > 0.0) {
      env.vec.row(n) /= peak;
      env.log_scale(n) += std::log(peak);
    }
  }
}

class SweepEngine {
 public:
  SweepEngine(const SampleBatch& batch, const EncoderConfig& cfg, std::size_t n_sites)
      : n_(batch.n_samples()), d_(cfg.d), encoded_(n_sites) {
    if (batch.n_features() != n_sites) {
      throw ArgumentError("batch has " + std::to_string(batch.n_features()) +
                          " features, model has " + std::to_string(n_sites) + " sites");
    }
    if (n_ == 0) throw ArgumentError("empty training batch");
    for (auto& e : encoded_) e.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(d_));
    for (std::size_t n = 0; n < n_; ++n) {
      const auto state = encode_sample(batch.sample(n), cfg);
      for (std::size_t m = 0; m < n_sites; ++m) {
        const auto v = state.site(m);
        for (std::size_t s = 0; s < d_; ++s) {
          encoded_[m](static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s)) = v[s];
        }
      }
    }
    left_.resize(n_sites);
    right_.resize(n_sites);
    left_[0] = unit_env();
    right_[n_sites - 1] = unit_env();
  }

  // left_[m + 1] from left_[m] and site m.
  void grow_left(const Mps& mps, std::size_t m) {
    const auto& t = mps.site(m);
    const auto l = t.extent(0), r = t.extent(2);
    const RowMatrix tmp = left_[m].vec * detail::as_matrix(t, l, d_ * r);  // N x (d r)
    Environment next{RowMatrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(r)),
                     left_[m].log_scale};
    const auto& v = encoded_[m];
    for (std::size_t s = 0; s < d_; ++s) {
      const auto si = static_cast<Eigen::Index>(s);
      next.vec.noalias() += v.col(si).asDiagonal() *
                            tmp.middleCols(si * static_cast<Eigen::Index>(r),
                                           static_cast<Eigen::Index>(r));
    }
    rescale_rows(next);
    left_[m + 1] = std::move(next);
  }

  // right_[m - 1] from right_[m] and site m.
  void grow_right(const Mps& mps, std::size_t m) {
    const auto& t = mps.site(m);
    const auto l = t.extent(0), r = t.extent(2);
    // N x (l d): P[n, a d + s] = sum_b A[a, s, b] R[n, b]
    const RowMatrix tmp = right_[m].vec * detail::as_matrix(t, l * d_, r).transpose();
    Environment next{RowMatrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(l)),
                     right_[m].log_scale};
    const auto& v = encoded_[m];
    for (std::size_t n = 0; n < n_; ++n) {
      const auto ni = static_cast<Eigen::Index>(n);
      for (std::size_t a = 0; a < l; ++a) {
        double acc = 0.0;
        for (std::size_t s = 0; s < d_; ++s) {
          acc += v(ni, static_cast<Eigen::Index>(s)) * tmp(ni, static_cast<Eigen::Index>(a * d_ + s));
        }
        next.vec(ni, static_cast<Eigen::Index>(a)) = acc;
      }
    }
    rescale_rows(next);
    right_[m - 1] = std::move(next);
  }

  void build_right(const Mps& mps) {
    for (std::size_t m = mps.size() - 1; m > 0; --m) grow_right(mps, m);
  }

  void build_left_upto(const Mps& mps, std::size_t c) {
    for (std::size_t m = 0; m < c; ++m) grow_left(mps, m);
  }

  void build_right_downto(const Mps& mps, std::size_t c) {
    for (std::size_t m = mps.size() - 1; m > c; --m) grow_right(mps, m);
  }

  struct Local {
    DenseTensor gradient;
    double nll = 0.0;
  };

  // Gradient and NLL at center m; `want_gradient` false skips the
  // environment accumulation.
  Local local(const Mps& mps, std::size_t m, bool want_gradient) const {
    const auto& t = mps.site(m);
    const auto l = t.extent(0), r = t.extent(2);
    const auto ri = static_cast<Eigen::Index>(r);
    const auto& lenv = left_[m];
    const auto& renv = right_[m];
    const auto& v = encoded_[m];
    const RowMatrix tmp = lenv.vec * detail::as_matrix(t, l, d_ * r);  // N x (d r)

    const double z = t.frobenius_norm() * t.frobenius_norm();
    Eigen::VectorXd psi(static_cast<Eigen::Index>(n_));
    double sum_log = 0.0;
    for (std::size_t n = 0; n < n_; ++n) {
      const auto ni = static_cast<Eigen::Index>(n);
      double acc = 0.0;
      for (std::size_t s = 0; s < d_; ++s) {
        const auto si = static_cast<Eigen::Index>(s);
        acc += v(ni, si) * tmp.row(ni).segment(si * ri, ri).dot(renv.vec.row(ni));
      }
      if (!(std::abs(acc) >= kUnderflow)) {
        throw UnderflowError("amplitude of sample " + std::to_string(n) + " underflowed", n);
      }
      psi(ni) = acc;
      sum_log += std::log(std::abs(acc)) + lenv.log_scale(ni) + renv.log_scale(ni);
    }
    Local out;
    out.nll = -2.0 * sum_log / static_cast<double>(n_) + std::log(z);
    if (!want_gradient) return out;

    RowMatrix weights(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(d_) * ri);
    for (std::size_t s = 0; s < d_; ++s) {
      const auto si = static_cast<Eigen::Index>(s);
      weights.middleCols(si * ri, ri) =
          (v.col(si).array() / psi.array()).matrix().asDiagonal() * renv.vec;
    }
    const RowMatrix env_sum = lenv.vec.transpose() * weights;  // l x (d r)
    out.gradient = DenseTensor({l, d_, r});
    auto grad = detail::as_matrix(out.gradient, l, d_ * r);
    grad = (2.0 / z) * detail::as_matrix(t, l, d_ * r) -
           (2.0 / static_cast<double>(n_)) * env_sum;
    return out;
  }

 private:
  Environment unit_env() const {
    return {RowMatrix::Ones(static_cast<Eigen::Index>(n_), 1),
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_))};
  }

  std::size_t n_;
  std::size_t d_;
  std::vector<RowMatrix> encoded_;  // per site: N x d
  std::vector<Environment> left_;   // left_[m]: sites < m
  std::vector<Environment> right_;  // right_[m]: sites > m
};

void apply_update(Mps& mps, const DenseTensor& gradient, const TrainConfig& cfg) {
  const std::size_t c = *mps.center();
  DenseTensor next = mps.site(c);
  double step = cfg.learning_rate;
  if (cfg.grad_clip > 0.0) {
    const double g = gradient.frobenius_norm();
    if (g > cfg.grad_clip) step *= cfg.grad_clip / g;
  }
  if (step != 0.0) {
    for (std::size_t i = 0; i < next.size(); ++i) next[i] -= step * gradient[i];
  }
  mps.set_center_tensor(std::move(next));
  mps.normalize();
}

}  // namespace

NllResult nll(const Mps& mps, const SampleBatch& batch, const EncoderConfig& cfg) {
  if (batch.empty()) throw ArgumentError("nll of an empty batch");
  double acc = 0.0;
  for (std::size_t n = 0; n < batch.n_samples(); ++n) {
    const double lp = log_prob(mps, batch.sample(n), cfg);
    if (!std::isfinite(lp)) return {std::numeric_limits<double>::infinity(), n};
    acc -= lp;
  }
  return {acc / static_cast<double>(batch.n_samples()), std::nullopt};
}

double nll_lower_bound(const SampleBatch& batch, const EncoderConfig& cfg) {
  if (batch.empty()) throw ArgumentError("lower bound of an empty batch");
  std::map<std::vector<double>, std::size_t> counts;
  for (std::size_t n = 0; n < batch.n_samples(); ++n) {
    const auto s = batch.sample(n);
    ++counts[std::vector<double>(s.begin(), s.end())];
  }
  std::vector<ProductState> states;
  double entropy = 0.0;
  const double total = static_cast<double>(batch.n_samples());
  for (const auto& [features, count] : counts) {
    states.push_back(encode_sample(features, cfg));
    const double p = static_cast<double>(count) / total;
    entropy -= p * std::log(p);
  }
  const auto k = static_cast<Eigen::Index>(states.size());
  RowMatrix gram = RowMatrix::Identity(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      double overlap = 1.0;
      const auto& a = states[static_cast<std::size_t>(i)];
      const auto& b = states[static_cast<std::size_t>(j)];
      for (std::size_t m = 0; m < a.size() && overlap != 0.0; ++m) {
        double dot = 0.0;
        for (std::size_t s = 0; s < cfg.d; ++s) dot += a.site(m)[s] * b.site(m)[s];
        overlap *= dot;
      }
      gram(i, j) = gram(j, i) = overlap;
    }
  }
  Eigen::SelfAdjointEigenSolver<RowMatrix> solver(gram, Eigen::EigenvaluesOnly);
  return entropy - std::log(solver.eigenvalues().maxCoeff());
}

DenseTensor local_gradient(const Mps& mps, const SampleBatch& batch, const EncoderConfig& cfg) {
  if (!mps.center()) throw ArgumentError("local_gradient requires a canonical center");
  if (cfg.d != mps.phys_dim()) throw ArgumentError("encoder d does not match model");
  if (std::abs(mps.norm() - 1.0) > 1e-8) throw ArgumentError("local_gradient requires unit norm");
  const std::size_t c = *mps.center();
  SweepEngine engine(batch, cfg, mps.size());
  engine.build_left_upto(mps, c);
  engine.build_right_downto(mps, c);
  return engine.local(mps, c, true).gradient;
}

std::pair<Mps, double> sweep(Mps mps, const SampleBatch& batch, const TrainConfig& cfg) {
  cfg.validate();
  if (mps.center() != std::optional<std::size_t>{0}) {
    throw ArgumentError("sweep expects a model canonical at site 0");
  }
  if (cfg.encoder.d != mps.phys_dim()) throw ArgumentError("encoder d does not match model");
  const std::size_t n_sites = mps.size();
  SweepEngine engine(batch, cfg.encoder, n_sites);
  engine.build_right(mps);

  for (std::size_t m = 0; m < n_sites; ++m) {
    apply_update(mps, engine.local(mps, m, true).gradient, cfg);
    if (m + 1 < n_sites) {
      mps.move_center(m + 1);
      engine.grow_left(mps, m);
    }
  }
  for (std::size_t m = n_sites; m-- > 0;) {
    apply_update(mps, engine.local(mps, m, true).gradient, cfg);
    if (m > 0) {
      mps.move_center(m - 1);
      engine.grow_right(mps, m);
    }
  }
  const double loss = engine.local(mps, 0, false).nll;
  return {std::move(mps), loss};
}

std::pair<Mps, LossTrace> train(const SampleBatch& batch, const TrainConfig& cfg) {
  cfg.validate();
  if (batch.empty()) throw ArgumentError("cannot train on an empty batch");

  auto start = [&](std::uint64_t seed) {
    Mps mps = init_random(batch.n_features(), cfg.encoder.d, cfg.chi_max, seed);
    return std::pair{mps, nll(mps, batch, cfg.encoder).value};
  };
  auto [mps, loss] = start(cfg.seed);
  if (!std::isfinite(loss)) {
    std::tie(mps, loss) = start(cfg.seed + 0x9E3779B97F4A7C15ULL);
    if (!std::isfinite(loss)) throw Error("initial model assigns zero probability to a sample");
  }

  LossTrace trace;
  trace.initial = loss;
  TrainConfig run = cfg;
  for (std::size_t k = 0; k < cfg.n_sweeps; ++k) {
    auto [next, next_loss] = sweep(mps, batch, run);
    if (next_loss > loss + 1e-9) {
      run.learning_rate *= 0.5;
      std::tie(next, next_loss) = sweep(mps, batch, run);
    }
    mps = std::move(next);
    loss = next_loss;
    trace.per_sweep.push_back(loss);
  }
  trace.final_learning_rate = run.learning_rate;
  return {std::move(mps), std::move(trace)};
}

void write_metrics(const LossTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  for (std::size_t k = 0; k < trace.per_sweep.size(); ++k) {
    out << (k + 1) << '\t' << trace.per_sweep[k] << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace mpsee
