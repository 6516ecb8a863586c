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

#ifndef MPSEE_ENTANGLEMENT_HPP
#define MPSEE_ENTANGLEMENT_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mpsee/feature_map.hpp"
#include "mpsee/mps.hpp"
#include "mpsee/tensor.hpp"

namespace mpsee {

/// Single-site von Neumann entropies S_m (nats), one per site.
struct EntropyProfile {
  std::vector<double> values;
};

/// Marker for a measurement outcome the model gives zero probability.
inline bool is_unsupported(double value) { return std::isnan(value); }

/// Average entropy variation obtained by measuring each site according to
/// one sample.  values[m] is NaN where measuring site m has zero probability.
struct DeltaSMap {
  std::vector<double> values;
  std::optional<std::size_t> sample_id;
};

/// Disjoint groups of sites measured together.
struct RegionSpec {
  std::vector<std::vector<std::size_t>> regions;

  /// Throws ArgumentError on overlap or on sites >= n_sites.
  void validate(std::size_t n_sites) const;

  /// One region per site.
  static RegionSpec singletons(std::size_t n_sites);
  /// Disjoint tile x tile squares over a rows x cols raster (row-major site
  /// numbering); tiles on the right and bottom edges may be smaller.
  static RegionSpec tiles(std::size_t rows, std::size_t cols, std::size_t tile);
};

/// d x d reduced density matrix of site m.
DenseTensor single_site_rdm(const Mps& mps, std::size_t m);

/// -Tr(rho ln rho) over eigenvalues above 1e-12.  Throws ContractViolation
/// when the trace differs from one by more than 1e-6.
double von_neumann_entropy(const DenseTensor& rho);

EntropyProfile entropy_profile(const Mps& mps);

struct Measurement {
  Mps state;       // normalized posterior on the unmeasured sites
  double weight;   // probability of the outcome
};

/// Projects site m onto `v` (a unit vector) and renormalizes.  The result
/// keeps the original order of the remaining sites.  Throws
/// ZeroProbabilityError when the projected norm is below 1e-12.
Measurement measure_site(const Mps& mps, std::size_t m, std::span<const double> v);

/// Sequential measurement of `sites` (ascending order) with `vectors[i]`
/// applied to `sites[i]`.  The weight is the joint marginal probability.
Measurement measure_region(const Mps& mps, std::span<const std::size_t> sites,
                           std::span<const std::vector<double>> vectors);

/// ln of the joint marginal probability of observing `vectors` on `sites`
/// with every other site traced out; -infinity for a zero marginal.  Equals
/// ln(measure_region(...).weight) but costs a single transfer-matrix pass.
double marginal_log_prob(const Mps& mps, std::span<const std::size_t> sites,
                         std::span<const std::vector<double>> vectors);

/// Posterior entropies after projecting one site.
struct SiteMeasurement {
  std::size_t site = 0;
  double weight = 0.0;
  /// S'_m aligned to the original sites; NaN at the measured site.
  std::vector<double> entropies;
};

/// Caches the left-orthonormal, right-orthonormal and center gauges of a
/// state so that every single-site measurement costs one environment pass
/// (O(M d chi^3)) instead of a fresh canonicalization.
class EntanglementAnalyzer {
 public:
  explicit EntanglementAnalyzer(const Mps& mps);

  std::size_t size() const { return n_sites_; }
  std::size_t phys_dim() const { return d_; }
  const EntropyProfile& entropies() const { return entropies_; }

  /// Throws ZeroProbabilityError when the outcome norm is below 1e-12.
  SiteMeasurement measure(std::size_t site, std::span<const double> v) const;

  /// Average of S'_m - S_m over the unmeasured sites (0 for a one-site
  /// chain).
  double average_variation(const SiteMeasurement& measured) const;

 private:
  std::size_t n_sites_ = 0;
  std::size_t d_ = 0;
  std::vector<DenseTensor> left_;    // left-orthonormal gauge, (d, l, r)
  std::vector<DenseTensor> right_;   // right-orthonormal gauge, (d, l, r)
  std::vector<DenseTensor> center_;  // unit-norm center tensor at each site
  EntropyProfile entropies_;
};

/// Average variation from measuring site m according to sample[m].
/// Throws ZeroProbabilityError on an unsupported outcome.
double delta_s(const Mps& mps, std::span<const double> sample, const EncoderConfig& cfg,
               std::size_t m);

/// delta_s for every site, computed in parallel; unsupported sites are NaN.
DeltaSMap delta_s_map(const Mps& mps, std::span<const double> sample, const EncoderConfig& cfg,
                      std::optional<std::size_t> sample_id = std::nullopt);
DeltaSMap delta_s_map(const EntanglementAnalyzer& analyzer, std::span<const double> sample,
                      const EncoderConfig& cfg,
                      std::optional<std::size_t> sample_id = std::nullopt);

/// Unaveraged S'_m - S_m for every m != measured, in original site order
/// (length M - 1).
std::vector<double> ds_profile(const Mps& mps, std::span<const double> sample,
                               const EncoderConfig& cfg, std::size_t m);

/// Per region: measure all its sites according to the sample, then average
/// S'_m - S_m over the M - |region| unmeasured sites (0 when none remain).
/// Unsupported regions are NaN.
std::vector<double> region_delta_s_map(const Mps& mps, std::span<const double> sample,
                                       const EncoderConfig& cfg, const RegionSpec& regions);

}  // namespace mpsee

#endif  // MPSEE_ENTANGLEMENT_HPP
