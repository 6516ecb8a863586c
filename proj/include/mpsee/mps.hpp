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

#ifndef MPSEE_MPS_HPP
#define MPSEE_MPS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "mpsee/feature_map.hpp"
#include "mpsee/sample_batch.hpp"
#include "mpsee/tensor.hpp"

namespace mpsee {

/// Open-boundary matrix product state with real site tensors.
///
/// Site m is a rank-3 tensor (left bond, physical, right bond); the outer
/// bonds of the chain have extent one.  When a canonical center c is set,
/// sites left of c are left-orthonormal, sites right of c are
/// right-orthonormal, and the norm of the state is the Frobenius norm of
/// site c.  A chain with zero sites stands for the scalar 1 and is only
/// produced by measuring every site.
class Mps {
 public:
  Mps(std::vector<DenseTensor> sites, std::size_t chi_max);
  /// The zero-site chain.
  static Mps trivial(std::size_t d, std::size_t chi_max);

  std::size_t size() const { return sites_.size(); }
  std::size_t phys_dim() const { return d_; }
  std::size_t chi_max() const { return chi_max_; }
  std::optional<std::size_t> center() const { return center_; }

  const DenseTensor& site(std::size_t m) const { return sites_.at(m); }
  const std::vector<DenseTensor>& sites() const { return sites_; }
  /// Extents of the M-1 internal bonds.
  std::vector<std::size_t> bond_dims() const;

  /// Global L2 norm; O(1) when a center is set.
  double norm() const;
  /// Scales the state to unit norm.
  void normalize();
  /// Gauge transformation bringing the canonical center to `c` (0-based).
  void move_center(std::size_t c);

  /// Overwrites the center tensor; shape must match.  Requires a center.
  void set_center_tensor(DenseTensor t);

  /// Contracts the unit vector `v` into the physical index of site m,
  /// removes that site and renormalizes.  Returns the probability of the
  /// outcome (squared norm of the projection relative to the input norm).
  /// Throws ZeroProbabilityError when the relative projected norm is below
  /// 1e-12.
  double project_site(std::size_t m, std::span<const double> v);

 private:
  friend Mps init_random(std::size_t, std::size_t, std::size_t, std::uint64_t);

  Mps(std::size_t d, std::size_t chi_max);
  // Full canonicalization sweep that rescales the carried factor to unit
  // norm after every step; the result is normalized.
  void canonicalize_normalized(std::size_t c);
  void shift_right(std::size_t m);
  void shift_left(std::size_t m);

  std::vector<DenseTensor> sites_;
  std::size_t d_ = 0;
  std::size_t chi_max_ = 1;
  std::optional<std::size_t> center_;
};

/// Copy of `mps` in mixed-canonical form around `center`.
Mps canonicalize(Mps mps, std::size_t center);

/// Random state: bond m has extent min(chi_max, d^m, d^(M-m)); entries are
/// uniform in (0,1) before canonicalization to site 0 and normalization.
Mps init_random(std::size_t n_sites, std::size_t d, std::size_t chi_max, std::uint64_t seed);

struct CompressedState {
  Mps state;
  double discarded_weight = 0.0;
  /// True when compression dropped more than 1e-8 of the weight.
  bool truncated() const { return discarded_weight > 1e-8; }
};

/// Normalized superposition of the encoded samples, sum_n v^[n] / sqrt(N),
/// compressed by sequential SVD to `chi_max`.  Meant for small batches (it
/// builds bond dimension N before compression).
CompressedState from_samples(const SampleBatch& batch, const EncoderConfig& cfg,
                             std::size_t chi_max);

/// ln|amplitude| and sign, evaluated with running rescaling so long chains
/// do not underflow.  sign == 0 means the amplitude is exactly zero.
struct LogAmplitude {
  double log_abs = 0.0;
  int sign = 0;
  double value() const;
};

LogAmplitude log_amplitude(const Mps& mps, const ProductState& encoded);
/// <encoded | mps>.
double amplitude(const Mps& mps, const ProductState& encoded);

/// 2 ln|<v(sample)|mps>| - ln <mps|mps>; -infinity for a zero amplitude.
double log_prob(const Mps& mps, std::span<const double> sample, const EncoderConfig& cfg);

inline constexpr std::size_t kMaxDenseSites = 12;

/// Full coefficient tensor, shape (d, ..., d).  Refuses chains longer than
/// kMaxDenseSites with SizeError.
DenseTensor to_dense(const Mps& mps);

/// Binary model file ("MPS1", little-endian).
void save_mps(const Mps& mps, const std::filesystem::path& path);
Mps load_mps(const std::filesystem::path& path);

}  // namespace mpsee

#endif  // MPSEE_MPS_HPP
