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

#ifndef MPSEE_FEATURE_MAP_HPP
#define MPSEE_FEATURE_MAP_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace mpsee {

/// Parameters of the qudit feature map.
///
/// A feature x in [0,1] is sent to the d-dimensional unit vector with
/// components v_s = sqrt(C(d-1, s)) cos(a)^(d-1-s) sin(a)^s, s = 0..d-1,
/// where a = theta * pi * x / 2.  d = 2, theta = 0.5 gives the usual
/// [cos(pi x / 4), sin(pi x / 4)] qubit encoding; theta = 1 maps 0 and 1 to
/// orthogonal basis states.
struct EncoderConfig {
  std::size_t d = 2;
  double theta = 0.5;

  void validate() const;
};

/// One unit vector per feature, stored contiguously (M x d).
class ProductState {
 public:
  ProductState(std::size_t n_sites, std::size_t d)
      : n_sites_(n_sites), d_(d), values_(n_sites * d, 0.0) {}

  std::size_t size() const { return n_sites_; }
  std::size_t phys_dim() const { return d_; }

  std::span<const double> site(std::size_t m) const {
    return std::span(values_).subspan(m * d_, d_);
  }
  std::span<double> site(std::size_t m) { return std::span(values_).subspan(m * d_, d_); }

  std::span<const double> values() const { return values_; }

 private:
  std::size_t n_sites_;
  std::size_t d_;
  std::vector<double> values_;
};

/// Throws DomainError for x outside [0,1] (feature index 0).
std::vector<double> encode_feature(double x, const EncoderConfig& cfg);

/// Writes the encoding of x into `out` (length cfg.d); no range check.
void encode_feature_into(double x, const EncoderConfig& cfg, std::span<double> out);

/// Encodes every feature; a DomainError names the offending feature index.
ProductState encode_sample(std::span<const double> sample, const EncoderConfig& cfg);

}  // namespace mpsee

#endif  // MPSEE_FEATURE_MAP_HPP
