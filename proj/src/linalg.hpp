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

// Private Eigen glue shared by the library sources.

#ifndef MPSEE_SRC_LINALG_HPP
#define MPSEE_SRC_LINALG_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "mpsee/tensor.hpp"

namespace mpsee::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using StridedMap = Eigen::Map<RowMatrix, 0, Eigen::OuterStride<>>;
using ConstStridedMap = Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>>;

inline MatrixMap as_matrix(DenseTensor& t, std::size_t rows, std::size_t cols) {
  return MatrixMap(t.raw(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

inline ConstMatrixMap as_matrix(const DenseTensor& t, std::size_t rows, std::size_t cols) {
  return ConstMatrixMap(t.raw(), static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(cols));
}

/// Slice A^s of a site tensor laid out (left, phys, right): an l x r matrix.
inline ConstStridedMap phys_slice(const DenseTensor& site, std::size_t s) {
  const auto l = site.extent(0), d = site.extent(1), r = site.extent(2);
  return ConstStridedMap(site.raw() + s * r, static_cast<Eigen::Index>(l),
                         static_cast<Eigen::Index>(r), Eigen::OuterStride<>(d * r));
}

inline StridedMap phys_slice(DenseTensor& site, std::size_t s) {
  const auto l = site.extent(0), d = site.extent(1), r = site.extent(2);
  return StridedMap(site.raw() + s * r, static_cast<Eigen::Index>(l),
                    static_cast<Eigen::Index>(r), Eigen::OuterStride<>(d * r));
}

inline DenseTensor from_matrix(const RowMatrix& m, Shape shape) {
  return DenseTensor(std::move(shape), std::vector<double>(m.data(), m.data() + m.size()));
}

/// Von Neumann entropy (nats) of a d x d symmetric density matrix stored
/// row-major.  Eigenvalues at or below 1e-12 are dropped (0 ln 0 := 0).
double entropy_of_rdm(std::span<const double> rho, std::size_t d);

}  // namespace mpsee::detail

#endif  // MPSEE_SRC_LINALG_HPP
