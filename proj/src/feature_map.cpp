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

#include "mpsee/feature_map.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mpsee/errors.hpp"

namespace mpsee {

void EncoderConfig::validate() const {
  if (d < 2) throw ArgumentError("feature map dimension d must be at least 2");
  if (!(theta > 0.0 && theta <= 1.0)) throw ArgumentError("theta must lie in (0, 1]");
}

void encode_feature_into(double x, const EncoderConfig& cfg, std::span<double> out) {
  const double angle = cfg.theta * std::numbers::pi * x / 2.0;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const std::size_t n = cfg.d - 1;
  // C(n, k) by the multiplicative recurrence C(n, k+1) = C(n, k) (n-k)/(k+1).
  double binom = 1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    out[k] = std::sqrt(binom) * std::pow(c, static_cast<double>(n - k)) *
             std::pow(s, static_cast<double>(k));
    binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
}

std::vector<double> encode_feature(double x, const EncoderConfig& cfg) {
  cfg.validate();
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("feature value " + std::to_string(x) + " outside [0, 1]", 0);
  }
  std::vector<double> out(cfg.d);
  encode_feature_into(x, cfg, out);
  return out;
}

ProductState encode_sample(std::span<const double> sample, const EncoderConfig& cfg) {
  cfg.validate();
  ProductState state(sample.size(), cfg.d);
  for (std::size_t m = 0; m < sample.size(); ++m) {
    const double x = sample[m];
    if (!(x >= 0.0 && x <= 1.0)) {
      throw DomainError("feature " + std::to_string(m) + " has value " + std::to_string(x) +
                            " outside [0, 1]",
                        m);
    }
    encode_feature_into(x, cfg, state.site(m));
  }
  return state;
}

}  // namespace mpsee
