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

#include "mpsee/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "linalg.hpp"
#include "mpsee/errors.hpp"

namespace mpsee {

namespace {

std::size_t product(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void check_extents(const Shape& shape) {
  for (auto e : shape) {
    if (e == 0) throw DimensionError("tensor extents must be positive");
  }
}

std::string shape_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

// Permutes `t` so that `left` axes come first, then `right`, and returns the
// matrix view dimensions.
struct MatrixView {
  DenseTensor tensor;
  std::size_t rows = 1;
  std::size_t cols = 1;
  Shape left_shape;
  Shape right_shape;
};

MatrixView matricize(const DenseTensor& t, std::span<const std::size_t> left,
                     std::span<const std::size_t> right) {
  if (left.size() + right.size() != t.rank()) {
    throw ArgumentError("axis partition does not cover all axes");
  }
  std::vector<bool> seen(t.rank(), false);
  std::vector<std::size_t> order;
  order.reserve(t.rank());
  MatrixView view;
  for (auto ax : left) {
    if (ax >= t.rank() || seen[ax]) throw ArgumentError("invalid axis in partition");
    seen[ax] = true;
    order.push_back(ax);
    view.left_shape.push_back(t.extent(ax));
  }
  for (auto ax : right) {
    if (ax >= t.rank() || seen[ax]) throw ArgumentError("invalid axis in partition");
    seen[ax] = true;
    order.push_back(ax);
    view.right_shape.push_back(t.extent(ax));
  }
  view.rows = product(view.left_shape);
  view.cols = product(view.right_shape);
  view.tensor = t.permuted(order);
  return view;
}

}  // namespace

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)) {
  check_extents(shape_);
  data_.assign(product(shape_), 0.0);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_extents(shape_);
  if (data_.size() != product(shape_)) {
    throw DimensionError("data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_string(shape_));
  }
}

DenseTensor DenseTensor::identity(std::size_t n) {
  DenseTensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t[i * n + i] = 1.0;
  return t;
}

std::size_t DenseTensor::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) throw ArgumentError("index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= shape_[i]) throw ArgumentError("index out of range");
    flat = flat * shape_[i] + index[i];
  }
  return flat;
}

double& DenseTensor::at(std::initializer_list<std::size_t> index) {
  return data_[flat_index(std::span(index.begin(), index.size()))];
}

double DenseTensor::at(std::initializer_list<std::size_t> index) const {
  return data_[flat_index(std::span(index.begin(), index.size()))];
}

DenseTensor DenseTensor::reshaped(Shape shape) const& {
  return DenseTensor(std::move(shape), data_);
}

DenseTensor DenseTensor::reshaped(Shape shape) && {
  return DenseTensor(std::move(shape), std::move(data_));
}

DenseTensor DenseTensor::permuted(std::span<const std::size_t> order) const {
  const std::size_t n = rank();
  if (order.size() != n) throw ArgumentError("permutation rank mismatch");
  std::vector<bool> seen(n, false);
  for (auto ax : order) {
    if (ax >= n || seen[ax]) throw ArgumentError("invalid permutation");
    seen[ax] = true;
  }
  if (std::is_sorted(order.begin(), order.end())) return *this;

  Shape out_shape(n);
  for (std::size_t i = 0; i < n; ++i) out_shape[i] = shape_[order[i]];
  // Input strides, reordered to follow output axes.
  std::vector<std::size_t> in_stride(n, 1);
  for (std::size_t i = n; i-- > 1;) in_stride[i - 1] = in_stride[i] * shape_[i];
  std::vector<std::size_t> stride(n);
  for (std::size_t i = 0; i < n; ++i) stride[i] = in_stride[order[i]];

  DenseTensor out(out_shape);
  std::vector<std::size_t> counter(n, 0);
  std::size_t src = 0;
  for (std::size_t dst = 0; dst < out.size(); ++dst) {
    out.data_[dst] = data_[src];
    for (std::size_t ax = n; ax-- > 0;) {
      if (++counter[ax] < out_shape[ax]) {
        src += stride[ax];
        break;
      }
      src -= stride[ax] * (out_shape[ax] - 1);
      counter[ax] = 0;
    }
  }
  return out;
}

DenseTensor DenseTensor::scaled(double alpha) const {
  DenseTensor out = *this;
  for (auto& x : out.data_) x *= alpha;
  return out;
}

double DenseTensor::frobenius_norm() const {
  double acc = 0.0;
  for (double x : data_) acc += x * x;
  return std::sqrt(acc);
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const AxisPair> pairs) {
  std::vector<bool> used_a(a.rank(), false), used_b(b.rank(), false);
  std::vector<std::size_t> paired_a, paired_b;
  for (const auto& [ia, ib] : pairs) {
    if (ia >= a.rank() || ib >= b.rank()) throw ArgumentError("contraction axis out of range");
    if (used_a[ia] || used_b[ib]) throw ArgumentError("axis paired twice");
    if (a.extent(ia) != b.extent(ib)) {
      throw DimensionError("paired axes differ in extent: " + std::to_string(a.extent(ia)) +
                           " vs " + std::to_string(b.extent(ib)));
    }
    used_a[ia] = used_b[ib] = true;
    paired_a.push_back(ia);
    paired_b.push_back(ib);
  }
  std::vector<std::size_t> free_a, free_b;
  for (std::size_t i = 0; i < a.rank(); ++i)
    if (!used_a[i]) free_a.push_back(i);
  for (std::size_t i = 0; i < b.rank(); ++i)
    if (!used_b[i]) free_b.push_back(i);

  const auto va = matricize(a, free_a, paired_a);
  const auto vb = matricize(b, paired_b, free_b);

  const auto ma = detail::as_matrix(va.tensor, va.rows, va.cols);
  const auto mb = detail::as_matrix(vb.tensor, vb.rows, vb.cols);
  detail::RowMatrix prod = ma * mb;

  Shape out_shape = va.left_shape;
  out_shape.insert(out_shape.end(), vb.right_shape.begin(), vb.right_shape.end());
  return detail::from_matrix(prod, std::move(out_shape));
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::initializer_list<AxisPair> pairs) {
  return contract(a, b, std::span(pairs.begin(), pairs.size()));
}

SvdSplit svd_split(const DenseTensor& t, std::span<const std::size_t> left_axes,
                   std::span<const std::size_t> right_axes, std::size_t max_rank,
                   double cutoff) {
  if (left_axes.empty() || right_axes.empty()) {
    throw ArgumentError("svd_split needs non-empty left and right axis sets");
  }
  if (max_rank == 0) throw ArgumentError("max_rank must be positive");
  const auto view = matricize(t, left_axes, right_axes);
  const auto m = detail::as_matrix(view.tensor, view.rows, view.cols);
  Eigen::JacobiSVD<detail::RowMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const auto full = static_cast<std::size_t>(sv.size());

  const double threshold = cutoff * (full ? sv(0) : 0.0);
  std::size_t keep = 0;
  while (keep < full && sv(static_cast<Eigen::Index>(keep)) > threshold) ++keep;
  keep = std::clamp<std::size_t>(std::min(keep, max_rank), 1, full);

  SvdSplit out;
  for (std::size_t i = 0; i < full; ++i) {
    const double s = sv(static_cast<Eigen::Index>(i));
    if (i < keep)
      out.singular.push_back(s);
    else
      out.discarded_weight += s * s;
  }
  const auto k = static_cast<Eigen::Index>(keep);
  detail::RowMatrix u = svd.matrixU().leftCols(k);
  detail::RowMatrix v = svd.matrixV().leftCols(k).transpose();

  Shape u_shape = view.left_shape;
  u_shape.push_back(keep);
  Shape v_shape{keep};
  v_shape.insert(v_shape.end(), view.right_shape.begin(), view.right_shape.end());
  out.u = detail::from_matrix(u, std::move(u_shape));
  out.v = detail::from_matrix(v, std::move(v_shape));
  return out;
}

QrSplit qr_split(const DenseTensor& t, std::span<const std::size_t> left_axes,
                 std::span<const std::size_t> right_axes) {
  if (left_axes.empty() || right_axes.empty()) {
    throw ArgumentError("qr_split needs non-empty left and right axis sets");
  }
  const auto view = matricize(t, left_axes, right_axes);
  const auto m = detail::as_matrix(view.tensor, view.rows, view.cols);
  const auto k = static_cast<Eigen::Index>(std::min(view.rows, view.cols));
  Eigen::HouseholderQR<detail::RowMatrix> qr(m);
  detail::RowMatrix q = qr.householderQ() * detail::RowMatrix::Identity(m.rows(), k);
  detail::RowMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  Shape q_shape = view.left_shape;
  q_shape.push_back(static_cast<std::size_t>(k));
  Shape r_shape{static_cast<std::size_t>(k)};
  r_shape.insert(r_shape.end(), view.right_shape.begin(), view.right_shape.end());
  return {detail::from_matrix(q, std::move(q_shape)), detail::from_matrix(r, std::move(r_shape))};
}

EighResult eigh(const DenseTensor& m) {
  if (m.rank() != 2 || m.extent(0) != m.extent(1)) {
    throw ArgumentError("eigh expects a square matrix");
  }
  const auto n = m.extent(0);
  const auto mat = detail::as_matrix(m, n, n);
  const detail::RowMatrix sym = 0.5 * (mat + mat.transpose());
  Eigen::SelfAdjointEigenSolver<detail::RowMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition did not converge");

  EighResult out;
  out.eigenvalues.resize(n);
  detail::RowMatrix vecs(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = static_cast<Eigen::Index>(n - 1 - i);
    out.eigenvalues[i] = solver.eigenvalues()(src);
    vecs.col(static_cast<Eigen::Index>(i)) = solver.eigenvectors().col(src);
  }
  out.eigenvectors = detail::from_matrix(vecs, {n, n});
  return out;
}

namespace detail {

double entropy_of_rdm(std::span<const double> rho, std::size_t d) {
  constexpr double kEigenFloor = 1e-12;
  double s = 0.0;
  auto add = [&](double lambda) {
    if (lambda > kEigenFloor) s -= lambda * std::log(lambda);
  };
  if (d == 2) {
    // Closed form; the small root comes from det/large to avoid cancellation.
    const double a = rho[0], c = rho[3], b = 0.5 * (rho[1] + rho[2]);
    const double half_tr = 0.5 * (a + c);
    const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    const double large = half_tr + disc;
    const double small = large > 0.0 ? (a * c - b * b) / large : 0.0;
    add(large);
    add(small);
    return s;
  }
  ConstMatrixMap m(rho.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const RowMatrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<RowMatrix> solver(sym, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) add(solver.eigenvalues()(i));
  return s;
}

}  // namespace detail

}  // namespace mpsee
