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

#include "mpsee/mps.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include "linalg.hpp"
#include "mpsee/errors.hpp"

namespace mpsee {

using detail::ConstMatrixMap;
using detail::RowMatrix;

namespace {

std::size_t capped_power(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t v = 1;
  for (std::size_t i = 0; i < exp && v < cap; ++i) v *= base;
  return std::min(v, cap);
}

}  // namespace

// --- Mps -------------------------------------------------------------------

Mps::Mps(std::size_t d, std::size_t chi_max) : d_(d), chi_max_(chi_max) {}

Mps::Mps(std::vector<DenseTensor> sites, std::size_t chi_max)
    : sites_(std::move(sites)), chi_max_(chi_max) {
  if (sites_.empty()) throw ArgumentError("an MPS needs at least one site");
  if (chi_max_ == 0) throw ArgumentError("chi_max must be positive");
  d_ = sites_.front().rank() == 3 ? sites_.front().extent(1) : 0;
  for (std::size_t m = 0; m < sites_.size(); ++m) {
    const auto& t = sites_[m];
    if (t.rank() != 3) throw DimensionError("site " + std::to_string(m) + " is not rank 3");
    if (t.extent(1) != d_) throw DimensionError("site " + std::to_string(m) + " has wrong d");
    if (m == 0 && t.extent(0) != 1) throw DimensionError("left boundary bond must be 1");
    if (m + 1 == sites_.size() && t.extent(2) != 1) {
      throw DimensionError("right boundary bond must be 1");
    }
    if (m > 0 && sites_[m - 1].extent(2) != t.extent(0)) {
      throw DimensionError("bond mismatch between sites " + std::to_string(m - 1) + " and " +
                           std::to_string(m));
    }
    if (t.extent(2) > chi_max_) {
      throw DimensionError("bond after site " + std::to_string(m) + " exceeds chi_max");
    }
  }
}

Mps Mps::trivial(std::size_t d, std::size_t chi_max) { return Mps(d, chi_max); }

std::vector<std::size_t> Mps::bond_dims() const {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m + 1 < sites_.size(); ++m) out.push_back(sites_[m].extent(2));
  return out;
}

double Mps::norm() const {
  if (sites_.empty()) return 1.0;
  if (center_) return sites_[*center_].frobenius_norm();
  // Transfer-matrix contraction, left to right, with running rescaling.
  RowMatrix env = RowMatrix::Ones(1, 1);
  double log_scale = 0.0;
  for (const auto& t : sites_) {
    const auto r = static_cast<Eigen::Index>(t.extent(2));
    RowMatrix next = RowMatrix::Zero(r, r);
    for (std::size_t s = 0; s < d_; ++s) {
      const auto a = detail::phys_slice(t, s);
      next.noalias() += a.transpose() * (env * a);
    }
    const double peak = next.cwiseAbs().maxCoeff();
    if (!(peak > 0.0)) return 0.0;
    env = next / peak;
    log_scale += std::log(peak);
  }
  if (!(env(0, 0) > 0.0)) return 0.0;
  return std::exp(0.5 * (log_scale + std::log(env(0, 0))));
}

void Mps::normalize() {
  if (sites_.empty()) return;
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ArgumentError("cannot normalize a zero-norm state");
  const std::size_t target = center_.value_or(0);
  for (auto& x : sites_[target].data()) x /= n;
}

void Mps::shift_right(std::size_t m) {
  auto& t = sites_[m];
  const auto l = t.extent(0), r = t.extent(2);
  const auto rows = static_cast<Eigen::Index>(l * d_), cols = static_cast<Eigen::Index>(r);
  const auto k = std::min(rows, cols);
  Eigen::HouseholderQR<RowMatrix> qr(detail::as_matrix(t, l * d_, r));
  RowMatrix q = qr.householderQ() * RowMatrix::Identity(rows, k);
  RowMatrix rf = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (rf(i, i) < 0.0) {
      rf.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  const auto kk = static_cast<std::size_t>(k);
  t = detail::from_matrix(q, {l, d_, kk});
  auto& next = sites_[m + 1];
  const auto r2 = next.extent(2);
  RowMatrix merged = rf * detail::as_matrix(next, r, d_ * r2);
  next = detail::from_matrix(merged, {kk, d_, r2});
}

void Mps::shift_left(std::size_t m) {
  auto& t = sites_[m];
  const auto l = t.extent(0), r = t.extent(2);
  const auto rows = static_cast<Eigen::Index>(d_ * r), cols = static_cast<Eigen::Index>(l);
  const auto k = std::min(rows, cols);
  // LQ of the l x (d r) matrix via QR of its transpose.
  Eigen::HouseholderQR<RowMatrix> qr(detail::as_matrix(t, l, d_ * r).transpose());
  RowMatrix q = qr.householderQ() * RowMatrix::Identity(rows, k);
  RowMatrix rf = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (rf(i, i) < 0.0) {
      rf.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  const auto kk = static_cast<std::size_t>(k);
  RowMatrix qt = q.transpose();
  t = detail::from_matrix(qt, {kk, d_, r});
  auto& prev = sites_[m - 1];
  const auto l2 = prev.extent(0);
  RowMatrix merged = detail::as_matrix(prev, l2 * d_, l) * rf.transpose();
  prev = detail::from_matrix(merged, {l2, d_, kk});
}

void Mps::move_center(std::size_t c) {
  if (c >= sites_.size()) throw ArgumentError("canonical center out of range");
  if (!center_) {
    for (std::size_t m = 0; m < c; ++m) shift_right(m);
    for (std::size_t m = sites_.size() - 1; m > c; --m) shift_left(m);
  } else {
    for (std::size_t m = *center_; m < c; ++m) shift_right(m);
    for (std::size_t m = *center_; m > c; --m) shift_left(m);
  }
  center_ = c;
}

void Mps::canonicalize_normalized(std::size_t c) {
  auto rescale = [](DenseTensor& t) {
    const double n = t.frobenius_norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw ArgumentError("cannot normalize a zero-norm state");
    for (auto& x : t.data()) x /= n;
  };
  for (std::size_t m = 0; m < c; ++m) {
    shift_right(m);
    rescale(sites_[m + 1]);
  }
  for (std::size_t m = sites_.size() - 1; m > c; --m) {
    shift_left(m);
    rescale(sites_[m - 1]);
  }
  rescale(sites_[c]);
  center_ = c;
}

void Mps::set_center_tensor(DenseTensor t) {
  if (!center_) throw ArgumentError("set_center_tensor requires a canonical center");
  if (t.shape() != sites_[*center_].shape()) throw DimensionError("center tensor shape mismatch");
  sites_[*center_] = std::move(t);
}

double Mps::project_site(std::size_t m, std::span<const double> v) {
  if (m >= sites_.size()) throw ArgumentError("measured site out of range");
  if (v.size() != d_) throw ArgumentError("measurement vector has wrong dimension");
  move_center(m);
  const double total = norm();
  const auto& t = sites_[m];
  const auto l = t.extent(0), r = t.extent(2);
  RowMatrix proj = RowMatrix::Zero(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r));
  for (std::size_t s = 0; s < d_; ++s) {
    if (v[s] != 0.0) proj.noalias() += v[s] * detail::phys_slice(t, s);
  }
  const double kept = proj.norm();
  if (!(total > 0.0) || !(kept / total >= 1e-12)) {
    throw ZeroProbabilityError("measuring site " + std::to_string(m) +
                                   " gives a zero-probability outcome",
                               m);
  }
  const double weight = (kept / total) * (kept / total);
  proj /= kept;

  if (sites_.size() == 1) {
    sites_.clear();
    center_.reset();
    return weight;
  }
  if (m > 0) {
    auto& prev = sites_[m - 1];
    const auto l2 = prev.extent(0);
    RowMatrix merged = detail::as_matrix(prev, l2 * d_, l) * proj;
    prev = detail::from_matrix(merged, {l2, d_, r});
    sites_.erase(sites_.begin() + static_cast<std::ptrdiff_t>(m));
    center_ = m - 1;
  } else {
    auto& next = sites_[1];
    const auto r2 = next.extent(2);
    RowMatrix merged = proj * detail::as_matrix(next, r, d_ * r2);
    next = detail::from_matrix(merged, {1, d_, r2});
    sites_.erase(sites_.begin());
    center_ = 0;
  }
  return weight;
}

Mps canonicalize(Mps mps, std::size_t center) {
  mps.move_center(center);
  return mps;
}

// --- construction ----------------------------------------------------------

Mps init_random(std::size_t n_sites, std::size_t d, std::size_t chi_max, std::uint64_t seed) {
  if (n_sites < 2) throw ArgumentError("init_random needs at least two sites");
  if (d < 2) throw ArgumentError("physical dimension must be at least 2");
  if (chi_max < 1) throw ArgumentError("chi_max must be positive");

  std::mt19937_64 rng(seed);
  // Open interval (0, 1).
  std::uniform_real_distribution<double> uniform(std::nextafter(0.0, 1.0), 1.0);

  std::vector<std::size_t> bonds(n_sites + 1, 1);
  for (std::size_t m = 1; m < n_sites; ++m) {
    bonds[m] = std::min(capped_power(d, m, chi_max), capped_power(d, n_sites - m, chi_max));
  }
  std::vector<DenseTensor> sites;
  sites.reserve(n_sites);
  for (std::size_t m = 0; m < n_sites; ++m) {
    DenseTensor t({bonds[m], d, bonds[m + 1]});
    for (auto& x : t.data()) x = uniform(rng);
    sites.push_back(std::move(t));
  }
  Mps mps(std::move(sites), chi_max);
  mps.canonicalize_normalized(0);
  return mps;
}

CompressedState from_samples(const SampleBatch& batch, const EncoderConfig& cfg,
                             std::size_t chi_max) {
  if (batch.empty()) throw ArgumentError("from_samples needs at least one sample");
  cfg.validate();
  const std::size_t n = batch.n_samples();
  const std::size_t m_sites = batch.n_features();
  const std::size_t d = cfg.d;
  if (m_sites == 0) throw ArgumentError("samples have no features");

  std::vector<ProductState> encoded;
  encoded.reserve(n);
  for (std::size_t i = 0; i < n; ++i) encoded.push_back(encode_sample(batch.sample(i), cfg));

  // Direct-sum construction: bond index = sample index.
  std::vector<DenseTensor> sites;
  sites.reserve(m_sites);
  const double weight = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t m = 0; m < m_sites; ++m) {
    const std::size_t l = (m == 0) ? 1 : n;
    const std::size_t r = (m + 1 == m_sites) ? 1 : n;
    DenseTensor t({l, d, r});
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = encoded[i].site(m);
      const std::size_t a = (l == 1) ? 0 : i;
      const std::size_t b = (r == 1) ? 0 : i;
      const double scale = (m + 1 == m_sites) ? weight : 1.0;
      for (std::size_t s = 0; s < d; ++s) t[(a * d + s) * r + b] += scale * v[s];
    }
    sites.push_back(std::move(t));
  }
  if (m_sites == 1) {
    Mps single(std::move(sites), chi_max);
    single.move_center(0);
    single.normalize();
    return {std::move(single), 0.0};
  }

  // Left-orthonormalize (QR), then truncate right to left with SVDs.
  Mps raw(std::move(sites), std::max(chi_max, n));
  raw.move_center(m_sites - 1);
  std::vector<DenseTensor> work = raw.sites();
  const double total = raw.norm() * raw.norm();

  constexpr double kRelativeCutoff = 1e-13;
  double discarded = 0.0;
  for (std::size_t m = m_sites - 1; m > 0; --m) {
    const auto& t = work[m];
    const std::array<std::size_t, 1> left{0};
    const std::array<std::size_t, 2> right{1, 2};
    auto split = svd_split(t, left, right, chi_max, kRelativeCutoff);
    discarded += split.discarded_weight;
    const auto k = split.singular.size();
    for (std::size_t i = 0; i < split.u.extent(0); ++i) {
      for (std::size_t j = 0; j < k; ++j) split.u[i * k + j] *= split.singular[j];
    }
    work[m] = std::move(split.v);
    const std::array<AxisPair, 1> pair{AxisPair{2, 0}};
    work[m - 1] = contract(work[m - 1], split.u, pair);
  }
  Mps out(std::move(work), chi_max);
  out.move_center(0);
  out.normalize();
  return {std::move(out), total > 0.0 ? discarded / total : 0.0};
}

// --- evaluation ------------------------------------------------------------

double LogAmplitude::value() const {
  return sign == 0 ? 0.0 : static_cast<double>(sign) * std::exp(log_abs);
}

LogAmplitude log_amplitude(const Mps& mps, const ProductState& encoded) {
  if (encoded.size() != mps.size()) {
    throw ArgumentError("encoded sample has " + std::to_string(encoded.size()) +
                        " sites, model has " + std::to_string(mps.size()));
  }
  if (mps.size() == 0) return {0.0, 1};
  if (encoded.phys_dim() != mps.phys_dim()) throw ArgumentError("encoding dimension mismatch");
  const std::size_t d = mps.phys_dim();
  Eigen::RowVectorXd env = Eigen::RowVectorXd::Ones(1);
  double log_scale = 0.0;
  for (std::size_t m = 0; m < mps.size(); ++m) {
    const auto& t = mps.site(m);
    const auto v = encoded.site(m);
    Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(t.extent(2)));
    for (std::size_t s = 0; s < d; ++s) {
      if (v[s] != 0.0) next.noalias() += v[s] * (env * detail::phys_slice(t, s));
    }
    const double peak = next.cwiseAbs().maxCoeff();
    if (peak == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    next /= peak;
    log_scale += std::log(peak);
    env = std::move(next);
  }
  const double final_value = env(0);
  if (final_value == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
  return {log_scale + std::log(std::abs(final_value)), final_value > 0.0 ? 1 : -1};
}

double amplitude(const Mps& mps, const ProductState& encoded) {
  return log_amplitude(mps, encoded).value();
}

double log_prob(const Mps& mps, std::span<const double> sample, const EncoderConfig& cfg) {
  if (cfg.d != mps.phys_dim()) throw ArgumentError("encoder d does not match model");
  const auto amp = log_amplitude(mps, encode_sample(sample, cfg));
  if (amp.sign == 0) return -std::numeric_limits<double>::infinity();
  return 2.0 * (amp.log_abs - std::log(mps.norm()));
}

DenseTensor to_dense(const Mps& mps) {
  if (mps.size() > kMaxDenseSites) {
    throw SizeError("to_dense refuses chains longer than " + std::to_string(kMaxDenseSites) +
                    " sites");
  }
  if (mps.size() == 0) return DenseTensor::scalar(1.0);
  const std::size_t d = mps.phys_dim();
  RowMatrix acc = RowMatrix::Ones(1, 1);  // (d^m) x bond
  for (std::size_t m = 0; m < mps.size(); ++m) {
    const auto& t = mps.site(m);
    const auto l = t.extent(0), r = t.extent(2);
    RowMatrix next = acc * detail::as_matrix(t, l, d * r);  // (d^m) x (d r)
    acc = Eigen::Map<RowMatrix>(next.data(), next.rows() * static_cast<Eigen::Index>(d),
                                static_cast<Eigen::Index>(r));
  }
  return detail::from_matrix(acc, Shape(mps.size(), d));
}

// --- serialization ---------------------------------------------------------

namespace {

constexpr std::array<char, 4> kMagic{'M', 'P', 'S', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename U>
  U get() {
    std::array<unsigned char, sizeof(U)> bytes{};
    in_.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (in_.gcount() != static_cast<std::streamsize>(bytes.size())) {
      throw FormatError("model file truncated at byte " + std::to_string(offset_));
    }
    offset_ += bytes.size();
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
    return value;
  }

  double get_double() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::size_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::size_t offset_ = 0;
};

}  // namespace

void save_mps(const Mps& mps, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mps.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mps.phys_dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mps.chi_max()));
  std::uint64_t count = 0;
  for (const auto& t : mps.sites()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.extent(0)));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.extent(2)));
    for (double x : t.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
    count += t.size();
  }
  put_le<std::uint64_t>(out, count);
  if (!out) throw IoError("write failed for " + path.string());
}

Mps load_mps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || magic != kMagic) throw FormatError("bad model magic (expected MPS1)");
  Reader reader(in);
  const auto version = reader.get<std::uint32_t>();
  if (version != kVersion) {
    throw FormatError("unsupported model version " + std::to_string(version));
  }
  const auto n_sites = reader.get<std::uint32_t>();
  const auto d = reader.get<std::uint32_t>();
  const auto chi_max = reader.get<std::uint32_t>();
  if (d == 0 || chi_max == 0) throw FormatError("model header has zero d or chi_max");

  std::vector<DenseTensor> sites;
  sites.reserve(n_sites);
  std::uint64_t count = 0;
  for (std::uint32_t m = 0; m < n_sites; ++m) {
    const auto l = reader.get<std::uint32_t>();
    const auto r = reader.get<std::uint32_t>();
    if (l == 0 || r == 0 || l > chi_max || r > chi_max) {
      throw FormatError("invalid bond extents at site " + std::to_string(m));
    }
    std::vector<double> data(static_cast<std::size_t>(l) * d * r);
    for (auto& x : data) x = reader.get_double();
    count += data.size();
    sites.emplace_back(Shape{l, d, r}, std::move(data));
  }
  if (reader.get<std::uint64_t>() != count) throw FormatError("model value count mismatch");
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in model");
  if (n_sites == 0) return Mps::trivial(d, chi_max);
  try {
    return Mps(std::move(sites), chi_max);
  } catch (const DimensionError& e) {
    throw FormatError(std::string("inconsistent model structure: ") + e.what());
  }
}

}  // namespace mpsee
