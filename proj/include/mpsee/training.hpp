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

#ifndef MPSEE_TRAINING_HPP
#define MPSEE_TRAINING_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "mpsee/feature_map.hpp"
#include "mpsee/mps.hpp"
#include "mpsee/sample_batch.hpp"
#include "mpsee/tensor.hpp"

namespace mpsee {

struct TrainConfig {
  std::size_t chi_max = 16;
  EncoderConfig encoder{};
  double learning_rate = 0.05;
  std::size_t n_sweeps = 30;
  std::uint64_t seed = 1;
  /// Maximum Frobenius norm of a local gradient step; 0 disables clipping.
  double grad_clip = 1.0;

  void validate() const;
};

struct LossTrace {
  /// NLL (nats) after each sweep.
  std::vector<double> per_sweep;
  double initial = 0.0;
  /// Learning rate in effect at the end of training (halved on rises).
  double final_learning_rate = 0.0;

  double final_loss() const { return per_sweep.empty() ? initial : per_sweep.back(); }
};

struct NllResult {
  double value = 0.0;
  /// First sample with zero amplitude, when value is +infinity.
  std::optional<std::size_t> zero_amplitude_sample;
};

/// Average negative log-likelihood -(1/N) sum_n ln P(x_n), in nats.
NllResult nll(const Mps& mps, const SampleBatch& batch, const EncoderConfig& cfg);

/// Lower bound on the NLL of any normalized state for this batch:
/// H(empirical) - ln(lambda_max(G)), with G the Gram matrix of the distinct
/// encoded samples.  Equals ln N for N distinct, mutually orthogonal
/// encodings.
double nll_lower_bound(const SampleBatch& batch, const EncoderConfig& cfg);

/// dL/dA at the canonical center of `mps`:
///   2 A - (2/N) sum_n E_n / psi_n
/// where E_n is the environment of the center for sample n.  Requires a
/// canonical center with unit norm.  Throws UnderflowError when a sample's
/// amplitude is below 1e-300 after environment rescaling.
DenseTensor local_gradient(const Mps& mps, const SampleBatch& batch, const EncoderConfig& cfg);

/// One right-then-left single-site sweep (0..M-1, then M-1..0).  The model
/// must be canonical at site 0; it comes back canonical at site 0 with unit
/// norm.  Returns the model and its NLL after the sweep.
std::pair<Mps, double> sweep(Mps mps, const SampleBatch& batch, const TrainConfig& cfg);

/// Random initialization followed by `n_sweeps` sweeps.  A sweep that raises
/// the NLL by more than 1e-9 is retried once from the previous model with
/// half the learning rate; the retry is kept either way and the halved rate
/// stays in effect.
std::pair<Mps, LossTrace> train(const SampleBatch& batch, const TrainConfig& cfg);

/// Writes one "sweep_index<TAB>nll" line per sweep, indices starting at 1.
void write_metrics(const LossTrace& trace, const std::filesystem::path& path);

}  // namespace mpsee

#endif  // MPSEE_TRAINING_HPP
