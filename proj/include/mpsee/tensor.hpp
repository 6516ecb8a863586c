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

#ifndef MPSEE_TENSOR_HPP
#define MPSEE_TENSOR_HPP

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace mpsee {

using Shape = std::vector<std::size_t>;

/// Dense real tensor with row-major storage.
///
/// A rank-0 tensor (empty shape) holds exactly one value.  Every extent must
/// be at least one, so `size() == product(shape)` always holds.
class DenseTensor {
 public:
  DenseTensor() : data_(1, 0.0) {}
  /// Zero-filled tensor of the given shape.
  explicit DenseTensor(Shape shape);
  DenseTensor(Shape shape, std::vector<double> data);

  static DenseTensor scalar(double value) { return DenseTensor({}, {value}); }
  static DenseTensor identity(std::size_t n);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double* raw() { return data_.data(); }
  const double* raw() const { return data_.data(); }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  double& at(std::initializer_list<std::size_t> index);
  double at(std::initializer_list<std::size_t> index) const;

  std::size_t flat_index(std::span<const std::size_t> index) const;

  /// Same data, new shape; the element count must match.
  DenseTensor reshaped(Shape shape) const&;
  DenseTensor reshaped(Shape shape) &&;

  /// Axis permutation: result axis i is input axis `order[i]`.
  DenseTensor permuted(std::span<const std::size_t> order) const;

  DenseTensor scaled(double alpha) const;
  double frobenius_norm() const;

  bool operator==(const DenseTensor& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

using AxisPair = std::pair<std::size_t, std::size_t>;

/// Sum over the paired axes.  The result carries the unpaired axes of `a`
/// (in order) followed by the unpaired axes of `b`.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const AxisPair> pairs);
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::initializer_list<AxisPair> pairs);

struct SvdSplit {
  DenseTensor u;                 // left axes..., k
  std::vector<double> singular;  // descending, length k
  DenseTensor v;                 // k, right axes...
  double discarded_weight = 0.0; // sum of squared dropped singular values
};

inline constexpr std::size_t kUnboundedRank = std::numeric_limits<std::size_t>::max();

/// Truncated SVD of `t` viewed as a matrix (left axes) x (right axes).
///
/// Kept values: at most `max_rank`, and only those strictly above
/// `cutoff * s_max`.  At least one value is always kept.
SvdSplit svd_split(const DenseTensor& t, std::span<const std::size_t> left_axes,
                   std::span<const std::size_t> right_axes,
                   std::size_t max_rank = kUnboundedRank, double cutoff = 0.0);

struct QrSplit {
  DenseTensor q;  // left axes..., k  with orthonormal columns
  DenseTensor r;  // k, right axes...
};

/// Thin QR of `t` viewed as (left axes) x (right axes); k = min(rows, cols).
QrSplit qr_split(const DenseTensor& t, std::span<const std::size_t> left_axes,
                 std::span<const std::size_t> right_axes);

struct EighResult {
  std::vector<double> eigenvalues;  // descending
  DenseTensor eigenvectors;         // n x n, column i pairs with eigenvalue i
};

/// Eigendecomposition of a real symmetric matrix.  The input is symmetrized
/// as (m + m^T)/2 before decomposition.
EighResult eigh(const DenseTensor& m);

}  // namespace mpsee

#endif  // MPSEE_TENSOR_HPP
