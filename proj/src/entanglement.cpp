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

#include "mpsee/entanglement.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <string>

#include "linalg.hpp"
#include "parallel.hpp"
#include "mpsee/errors.hpp"

namespace mpsee {

using detail::ConstMatrixMap;
using detail::parallel_for;
using detail::RowMatrix;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinOutcomeNorm = 1e-12;

// rho[s, s'] = sum_{a,b} C[a,s,b] C[a,s',b] for a center tensor (l, d, r).
std::vector<double> center_rdm(const DenseTensor& center) {
  const auto d = center.extent(1);
  std::vector<double> rho(d * d, 0.0);
  for (std::size_t s = 0; s < d; ++s) {
    const auto a = detail::phys_slice(center, s);
    for (std::size_t t = s; t < d; ++t) {
      const double v = a.cwiseProduct(detail::phys_slice(center, t)).sum();
      rho[s * d + t] = rho[t * d + s] = v;
    }
  }
  return rho;
}

ConstMatrixMap slice_of(const DenseTensor& dlr, std::size_t s) {
  const auto l = dlr.extent(1), r = dlr.extent(2);
  return ConstMatrixMap(dlr.raw() + s * l * r, static_cast<Eigen::Index>(l),
                        static_cast<Eigen::Index>(r));
}

std::vector<double> encoded_site(double x, const EncoderConfig& cfg, std::size_t m) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("feature " + std::to_string(m) + " outside [0, 1]", m);
  }
  std::vector<double> v(cfg.d);
  encode_feature_into(x, cfg, v);
  return v;
}

void check_sample(const Mps& mps, std::span<const double> sample, const EncoderConfig& cfg) {
  cfg.validate();
  if (sample.size() != mps.size()) {
    throw ArgumentError("sample has " + std::to_string(sample.size()) + " features, model has " +
                        std::to_string(mps.size()) + " sites");
  }
  if (cfg.d != mps.phys_dim()) throw ArgumentError("encoder d does not match model");
}

}  // namespace

// --- regions ---------------------------------------------------------------

void RegionSpec::validate(std::size_t n_sites) const {
  std::vector<bool> seen(n_sites, false);
  for (const auto& region : regions) {
    for (auto m : region) {
      if (m >= n_sites) throw ArgumentError("region site " + std::to_string(m) + " out of range");
      if (seen[m]) throw ArgumentError("regions overlap at site " + std::to_string(m));
      seen[m] = true;
    }
  }
}

RegionSpec RegionSpec::singletons(std::size_t n_sites) {
  RegionSpec out;
  for (std::size_t m = 0; m < n_sites; ++m) out.regions.push_back({m});
  return out;
}

RegionSpec RegionSpec::tiles(std::size_t rows, std::size_t cols, std::size_t tile) {
  if (tile == 0) throw ArgumentError("tile size must be positive");
  RegionSpec out;
  for (std::size_t r0 = 0; r0 < rows; r0 += tile) {
    for (std::size_t c0 = 0; c0 < cols; c0 += tile) {
      std::vector<std::size_t> region;
      for (std::size_t r = r0; r < std::min(rows, r0 + tile); ++r) {
        for (std::size_t c = c0; c < std::min(cols, c0 + tile); ++c) region.push_back(r * cols + c);
      }
      out.regions.push_back(std::move(region));
    }
  }
  return out;
}

// --- entropies -------------------------------------------------------------

DenseTensor single_site_rdm(const Mps& mps, std::size_t m) {
  if (m >= mps.size()) throw ArgumentError("site " + std::to_string(m) + " out of range");
  const Mps work = canonicalize(mps, m);
  const auto& c = work.site(m);
  const double z = c.frobenius_norm() * c.frobenius_norm();
  auto rho = center_rdm(c);
  for (auto& x : rho) x /= z;
  return DenseTensor({mps.phys_dim(), mps.phys_dim()}, std::move(rho));
}

double von_neumann_entropy(const DenseTensor& rho) {
  if (rho.rank() != 2 || rho.extent(0) != rho.extent(1)) {
    throw ArgumentError("density matrix must be square");
  }
  const auto d = rho.extent(0);
  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) trace += rho[i * d + i];
  if (std::abs(trace - 1.0) > 1e-6) {
    throw ContractViolation("density matrix trace " + std::to_string(trace) + " is not 1");
  }
  double s = 0.0;
  for (double lambda : eigh(rho).eigenvalues) {
    if (lambda > 1e-12) s -= lambda * std::log(lambda);
  }
  return s;
}

EntropyProfile entropy_profile(const Mps& mps) {
  EntropyProfile out;
  if (mps.size() == 0) return out;
  Mps work = canonicalize(mps, 0);
  work.normalize();
  out.values.resize(mps.size());
  for (std::size_t m = 0; m < mps.size(); ++m) {
    if (m > 0) work.move_center(m);
    out.values[m] = detail::entropy_of_rdm(center_rdm(work.site(m)), mps.phys_dim());
  }
  return out;
}

// --- measurements ----------------------------------------------------------

Measurement measure_site(const Mps& mps, std::size_t m, std::span<const double> v) {
  Mps work = mps;
  const double weight = work.project_site(m, v);
  return {std::move(work), weight};
}

Measurement measure_region(const Mps& mps, std::span<const std::size_t> sites,
                           std::span<const std::vector<double>> vectors) {
  if (sites.size() != vectors.size()) throw ArgumentError("one vector per measured site needed");
  std::vector<std::size_t> order(sites.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sites[a] < sites[b]; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (sites[order[i]] >= mps.size()) throw ArgumentError("measured site out of range");
    if (i > 0 && sites[order[i]] == sites[order[i - 1]]) {
      throw ArgumentError("site " + std::to_string(sites[order[i]]) + " measured twice");
    }
  }
  Mps work = mps;
  double weight = 1.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto original = sites[order[k]];
    try {
      weight *= work.project_site(original - k, vectors[order[k]]);
    } catch (const ZeroProbabilityError&) {
      throw ZeroProbabilityError(
          "region measurement has zero probability at site " + std::to_string(original), original);
    }
  }
  return {std::move(work), weight};
}

double marginal_log_prob(const Mps& mps, std::span<const std::size_t> sites,
                         std::span<const std::vector<double>> vectors) {
  if (sites.size() != vectors.size()) throw ArgumentError("one vector per measured site needed");
  const std::size_t d = mps.phys_dim();
  std::vector<const std::vector<double>*> chosen(mps.size(), nullptr);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i] >= mps.size()) throw ArgumentError("measured site out of range");
    if (chosen[sites[i]]) throw ArgumentError("site measured twice");
    if (vectors[i].size() != d) throw ArgumentError("measurement vector has wrong dimension");
    chosen[sites[i]] = &vectors[i];
  }
  RowMatrix env = RowMatrix::Ones(1, 1);
  double log_scale = 0.0;
  RowMatrix proj;
  for (std::size_t m = 0; m < mps.size(); ++m) {
    const auto& t = mps.site(m);
    const auto r = static_cast<Eigen::Index>(t.extent(2));
    RowMatrix next = RowMatrix::Zero(r, r);
    if (const auto* v = chosen[m]) {
      proj = RowMatrix::Zero(static_cast<Eigen::Index>(t.extent(0)), r);
      for (std::size_t s = 0; s < d; ++s) {
        if ((*v)[s] != 0.0) proj.noalias() += (*v)[s] * detail::phys_slice(t, s);
      }
      next.noalias() = proj.transpose() * env * proj;
    } else {
      for (std::size_t s = 0; s < d; ++s) {
        const auto a = detail::phys_slice(t, s);
        next.noalias() += a.transpose() * (env * a);
      }
    }
    const double peak = next.cwiseAbs().maxCoeff();
    if (peak == 0.0) return -std::numeric_limits<double>::infinity();
    next /= peak;
    log_scale += std::log(peak);
    env = std::move(next);
  }
  const double value = env(0, 0);
  if (!(value > 0.0)) return -std::numeric_limits<double>::infinity();
  return log_scale + std::log(value) - 2.0 * std::log(mps.norm());
}

// --- analyzer --------------------------------------------------------------

EntanglementAnalyzer::EntanglementAnalyzer(const Mps& mps)
    : n_sites_(mps.size()), d_(mps.phys_dim()) {
  if (n_sites_ == 0) return;
  const std::array<std::size_t, 3> to_dlr{1, 0, 2};
  Mps work = canonicalize(mps, 0);
  work.normalize();
  left_.resize(n_sites_);
  right_.resize(n_sites_);
  center_.resize(n_sites_);
  entropies_.values.resize(n_sites_);
  for (std::size_t m = 1; m < n_sites_; ++m) right_[m] = work.site(m).permuted(to_dlr);
  for (std::size_t m = 0; m < n_sites_; ++m) {
    if (m > 0) {
      work.move_center(m);
      left_[m - 1] = work.site(m - 1).permuted(to_dlr);
    }
    center_[m] = work.site(m);
    entropies_.values[m] = detail::entropy_of_rdm(center_rdm(center_[m]), d_);
  }
}

SiteMeasurement EntanglementAnalyzer::measure(std::size_t site, std::span<const double> v) const {
  if (site >= n_sites_) throw ArgumentError("measured site out of range");
  if (v.size() != d_) throw ArgumentError("measurement vector has wrong dimension");
  const auto& c = center_[site];
  RowMatrix proj = RowMatrix::Zero(static_cast<Eigen::Index>(c.extent(0)),
                                   static_cast<Eigen::Index>(c.extent(2)));
  for (std::size_t s = 0; s < d_; ++s) {
    if (v[s] != 0.0) proj.noalias() += v[s] * detail::phys_slice(c, s);
  }
  const double kept = proj.norm();
  if (!(kept >= kMinOutcomeNorm)) {
    throw ZeroProbabilityError(
        "measuring site " + std::to_string(site) + " gives a zero-probability outcome", site);
  }
  proj /= kept;

  SiteMeasurement out;
  out.site = site;
  out.weight = kept * kept;
  out.entropies.assign(n_sites_, kNaN);
  std::vector<double> rho(d_ * d_);
  std::vector<RowMatrix> work(d_);

  // Sites to the left: propagate the right environment through the
  // left-orthonormal tensors.
  RowMatrix env = proj * proj.transpose();
  RowMatrix next;
  for (std::size_t m = site; m-- > 0;) {
    const auto& a = left_[m];
    for (std::size_t s = 0; s < d_; ++s) work[s].noalias() = slice_of(a, s) * env;
    for (std::size_t s = 0; s < d_; ++s) {
      for (std::size_t t = s; t < d_; ++t) {
        rho[s * d_ + t] = rho[t * d_ + s] = work[s].cwiseProduct(slice_of(a, t)).sum();
      }
    }
    out.entropies[m] = detail::entropy_of_rdm(rho, d_);
    if (m == 0) break;
    next.noalias() = work[0] * slice_of(a, 0).transpose();
    for (std::size_t s = 1; s < d_; ++s) next.noalias() += work[s] * slice_of(a, s).transpose();
    env.swap(next);
  }

  // Sites to the right: propagate the left environment through the
  // right-orthonormal tensors.
  env.noalias() = proj.transpose() * proj;
  for (std::size_t m = site + 1; m < n_sites_; ++m) {
    const auto& b = right_[m];
    for (std::size_t s = 0; s < d_; ++s) work[s].noalias() = env * slice_of(b, s);
    for (std::size_t s = 0; s < d_; ++s) {
      for (std::size_t t = s; t < d_; ++t) {
        rho[s * d_ + t] = rho[t * d_ + s] = work[s].cwiseProduct(slice_of(b, t)).sum();
      }
    }
    out.entropies[m] = detail::entropy_of_rdm(rho, d_);
    if (m + 1 == n_sites_) break;
    next.noalias() = slice_of(b, 0).transpose() * work[0];
    for (std::size_t s = 1; s < d_; ++s) next.noalias() += slice_of(b, s).transpose() * work[s];
    env.swap(next);
  }
  return out;
}

double EntanglementAnalyzer::average_variation(const SiteMeasurement& measured) const {
  if (n_sites_ <= 1) return 0.0;
  double acc = 0.0;
  for (std::size_t m = 0; m < n_sites_; ++m) {
    if (m != measured.site) acc += measured.entropies[m] - entropies_.values[m];
  }
  return acc / static_cast<double>(n_sites_ - 1);
}

// --- variations ------------------------------------------------------------

double delta_s(const Mps& mps, std::span<const double> sample, const EncoderConfig& cfg,
               std::size_t m) {
  check_sample(mps, sample, cfg);
  if (m >= mps.size()) throw ArgumentError("measured site out of range");
  const EntanglementAnalyzer analyzer(mps);
  return analyzer.average_variation(analyzer.measure(m, encoded_site(sample[m], cfg, m)));
}

DeltaSMap delta_s_map(const EntanglementAnalyzer& analyzer, std::span<const double> sample,
                      const EncoderConfig& cfg, std::optional<std::size_t> sample_id) {
  cfg.validate();
  if (sample.size() != analyzer.size()) throw ArgumentError("sample length does not match model");
  if (cfg.d != analyzer.phys_dim()) throw ArgumentError("encoder d does not match model");
  const auto encoded = encode_sample(sample, cfg);
  DeltaSMap out;
  out.sample_id = sample_id;
  out.values.assign(analyzer.size(), kNaN);
  parallel_for(analyzer.size(), [&](std::size_t m) {
    try {
      out.values[m] = analyzer.average_variation(analyzer.measure(m, encoded.site(m)));
    } catch (const ZeroProbabilityError&) {
      out.values[m] = kNaN;
    }
  });
  return out;
}

DeltaSMap delta_s_map(const Mps& mps, std::span<const double> sample, const EncoderConfig& cfg,
                      std::optional<std::size_t> sample_id) {
  check_sample(mps, sample, cfg);
  return delta_s_map(EntanglementAnalyzer(mps), sample, cfg, sample_id);
}

std::vector<double> ds_profile(const Mps& mps, std::span<const double> sample,
                               const EncoderConfig& cfg, std::size_t m) {
  check_sample(mps, sample, cfg);
  if (m >= mps.size()) throw ArgumentError("measured site out of range");
  const EntanglementAnalyzer analyzer(mps);
  const auto measured = analyzer.measure(m, encoded_site(sample[m], cfg, m));
  std::vector<double> out;
  out.reserve(mps.size() - 1);
  for (std::size_t k = 0; k < mps.size(); ++k) {
    if (k != m) out.push_back(measured.entropies[k] - analyzer.entropies().values[k]);
  }
  return out;
}

std::vector<double> region_delta_s_map(const Mps& mps, std::span<const double> sample,
                                       const EncoderConfig& cfg, const RegionSpec& regions) {
  check_sample(mps, sample, cfg);
  regions.validate(mps.size());
  const auto before = entropy_profile(mps);
  const auto encoded = encode_sample(sample, cfg);
  std::vector<double> out(regions.regions.size(), kNaN);
  parallel_for(regions.regions.size(), [&](std::size_t k) {
    const auto& region = regions.regions[k];
    std::vector<std::vector<double>> vectors;
    vectors.reserve(region.size());
    for (auto m : region) {
      const auto v = encoded.site(m);
      vectors.emplace_back(v.begin(), v.end());
    }
    try {
      const auto measured = measure_region(mps, region, vectors);
      const auto after = entropy_profile(measured.state);
      std::vector<bool> in_region(mps.size(), false);
      for (auto m : region) in_region[m] = true;
      double acc = 0.0;
      std::size_t j = 0;
      for (std::size_t m = 0; m < mps.size(); ++m) {
        if (in_region[m]) continue;
        acc += after.values[j++] - before.values[m];
      }
      out[k] = j == 0 ? 0.0 : acc / static_cast<double>(j);
    } catch (const ZeroProbabilityError&) {
      out[k] = kNaN;
    }
  });
  return out;
}

}  // namespace mpsee
