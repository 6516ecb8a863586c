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


#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "mpsee/errors.hpp"
#include "mpsee/tensor.hpp"

namespace {

using mpsee::AxisPair;
using mpsee::DenseTensor;

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
  EXPECT_EQ(a.shape(), b.shape());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

DenseTensor matmul(const DenseTensor& a, const DenseTensor& b) {
  return mpsee::contract(a, b, {AxisPair{1, 0}});
}

DenseTensor transpose(const DenseTensor& a) {
  const std::vector<std::size_t> order{1, 0};
  return a.permuted(order);
}

TEST(DenseTensor, RejectsZeroExtentAndBadData) {
  EXPECT_THROW(DenseTensor({2, 0}), mpsee::DimensionError);
  EXPECT_THROW(DenseTensor({2, 2}, {1.0, 2.0, 3.0}), mpsee::DimensionError);
  EXPECT_NO_THROW(DenseTensor({2, 2}, {1.0, 2.0, 3.0, 4.0}));
}

TEST(DenseTensor, RowMajorIndexing) {
  DenseTensor t({2, 3}, {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(t.at({1, 2}), 5.0);
  EXPECT_EQ(t.at({0, 1}), 1.0);
  EXPECT_THROW(t.at({2, 0}), mpsee::ArgumentError);
}

TEST(DenseTensor, PermuteMatchesExplicitTranspose) {
  gen::Rng rng(3);
  const auto t = gen::normal_tensor(rng, {2, 3, 4});
  const std::vector<std::size_t> order{2, 0, 1};
  const auto p = t.permuted(order);
  ASSERT_EQ(p.shape(), (mpsee::Shape{4, 2, 3}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(p.at({k, i, j}), t.at({i, j, k}));
}

TEST(Contract, IdentityTimesVector) {
  const auto r = mpsee::contract(DenseTensor::identity(2), DenseTensor({2}, {1.0, 0.0}),
                                 {AxisPair{1, 0}});
  EXPECT_EQ(r, DenseTensor({2}, {1.0, 0.0}));
}

TEST(Contract, DotProductGivesScalar) {
  const auto r = mpsee::contract(DenseTensor({2}, {1, 2}), DenseTensor({2}, {3, 4}),
                                 {AxisPair{0, 0}});
  EXPECT_EQ(r.rank(), 0u);
  EXPECT_DOUBLE_EQ(r[0], 11.0);
}

TEST(Contract, TwoAxesMatchTripleLoop) {
  gen::Rng rng(11);
  const auto a = gen::normal_tensor(rng, {3, 4, 5});
  const auto b = gen::normal_tensor(rng, {5, 4});
  const auto r = mpsee::contract(a, b, {AxisPair{2, 0}, AxisPair{1, 1}});
  ASSERT_EQ(r.shape(), (mpsee::Shape{3}));
  for (std::size_t i = 0; i < 3; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 5; ++k) acc += a.at({i, j, k}) * b.at({k, j});
    EXPECT_NEAR(r[i], acc, 1e-12);
  }
}

TEST(Contract, ShapeMismatchAndDoublePairing) {
  const DenseTensor a({2, 3}), b({2, 3});
  EXPECT_THROW(mpsee::contract(a, b, {AxisPair{1, 0}}), mpsee::DimensionError);
  EXPECT_THROW(mpsee::contract(a, b, {AxisPair{0, 0}, AxisPair{0, 1}}), mpsee::ArgumentError);
}

TEST(ContractProperty, Bilinear) {
  gen::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = gen::uniform_index(rng, 1, 5), k = gen::uniform_index(rng, 1, 5);
    const auto a = gen::normal_tensor(rng, {n, k, 2});
    const auto b = gen::normal_tensor(rng, {2, k});
    const double alpha = gen::uniform(rng, -3.0, 3.0);
    const std::vector<AxisPair> pairs{{1, 1}, {2, 0}};
    const auto lhs = mpsee::contract(a.scaled(alpha), b, pairs);
    const auto rhs = mpsee::contract(a, b, pairs).scaled(alpha);
    EXPECT_LE(max_abs_diff(lhs, rhs), 1e-12);
  }
}

TEST(SvdSplit, RankOneTruncationOfDiagonal) {
  const DenseTensor t({2, 2}, {3, 0, 0, 1});
  const std::vector<std::size_t> l{0}, r{1};
  const auto s = mpsee::svd_split(t, l, r, 1);
  ASSERT_EQ(s.singular.size(), 1u);
  EXPECT_NEAR(s.singular[0], 3.0, 1e-14);
  EXPECT_NEAR(s.discarded_weight, 1.0, 1e-14);
  auto us = s.u;
  for (std::size_t i = 0; i < us.size(); ++i) us[i] *= s.singular[0];
  EXPECT_LE(max_abs_diff(matmul(us, s.v), DenseTensor({2, 2}, {3, 0, 0, 0})), 1e-14);
}

TEST(SvdSplit, OrthogonalMatrixHasUnitSingularValues) {
  const double c = std::cos(0.3), s = std::sin(0.3);
  const DenseTensor q({2, 2}, {c, -s, s, c});
  const std::vector<std::size_t> l{0}, r{1};
  for (double v : mpsee::svd_split(q, l, r).singular) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(SvdSplit, EmptyPartitionRejected) {
  const DenseTensor t({2, 2});
  const std::vector<std::size_t> none, both{0, 1};
  EXPECT_THROW(mpsee::svd_split(t, none, both), mpsee::ArgumentError);
}

TEST(SvdSplit, CutoffIsRelativeToLargest) {
  const DenseTensor t({3, 3}, {10, 0, 0, 0, 1e-3, 0, 0, 0, 1e-7});
  const std::vector<std::size_t> l{0}, r{1};
  EXPECT_EQ(mpsee::svd_split(t, l, r, mpsee::kUnboundedRank, 1e-5).singular.size(), 2u);
}

TEST(SvdSplitProperty, ReconstructsAndIsOrthonormal) {
  gen::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = gen::uniform_index(rng, 1, 7), cols = gen::uniform_index(rng, 1, 7);
    const auto t = gen::normal_tensor(rng, {rows, cols});
    const std::vector<std::size_t> l{0}, r{1};
    const auto s = mpsee::svd_split(t, l, r);
    const auto k = s.singular.size();
    ASSERT_EQ(k, std::min(rows, cols));
    for (std::size_t i = 1; i < k; ++i) EXPECT_GE(s.singular[i - 1], s.singular[i]);
    EXPECT_LE(max_abs_diff(matmul(transpose(s.u), s.u), DenseTensor::identity(k)), 1e-12);
    EXPECT_LE(max_abs_diff(matmul(s.v, transpose(s.v)), DenseTensor::identity(k)), 1e-12);
    auto us = s.u;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < k; ++j) us.at({i, j}) *= s.singular[j];
    EXPECT_LE(max_abs_diff(matmul(us, s.v), t), 1e-12 * (1.0 + t.frobenius_norm()));
  }
}

TEST(SvdSplitProperty, TruncationErrorBoundedByDiscardedWeight) {
  gen::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = gen::normal_tensor(rng, {2, 3, 4});
    const std::vector<std::size_t> l{0, 2}, r{1};
    const auto rank = gen::uniform_index(rng, 1, 3);
    const auto s = mpsee::svd_split(t, l, r, rank);
    ASSERT_EQ(s.u.shape(), (mpsee::Shape{2, 4, s.singular.size()}));
    auto us = s.u;
    for (std::size_t i = 0; i < us.size(); ++i) us[i] *= s.singular[i % s.singular.size()];
    const auto back = mpsee::contract(us, s.v, {AxisPair{2, 0}});  // (2, 4, 3)
    const std::vector<std::size_t> order{0, 2, 1};
    const auto rebuilt = back.permuted(order);
    double err2 = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) err2 += std::pow(rebuilt[i] - t[i], 2);
    EXPECT_LE(err2, s.discarded_weight + 1e-10);
  }
}

TEST(QrSplit, ReconstructsWithOrthonormalQ) {
  gen::Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = gen::normal_tensor(rng, {gen::uniform_index(rng, 1, 6), 3});
    const std::vector<std::size_t> l{0}, r{1};
    const auto qr = mpsee::qr_split(t, l, r);
    const auto k = qr.q.extent(1);
    EXPECT_LE(max_abs_diff(matmul(transpose(qr.q), qr.q), DenseTensor::identity(k)), 1e-12);
    EXPECT_LE(max_abs_diff(matmul(qr.q, qr.r), t), 1e-12);
  }
}

TEST(Eigh, DiagonalSortedDescending) {
  const auto r = mpsee::eigh(DenseTensor({2, 2}, {1.0 / 3, 0, 0, 2.0 / 3}));
  EXPECT_NEAR(r.eigenvalues[0], 2.0 / 3, 1e-15);
  EXPECT_NEAR(r.eigenvalues[1], 1.0 / 3, 1e-15);
}

TEST(Eigh, PauliX) {
  const auto r = mpsee::eigh(DenseTensor({2, 2}, {0, 1, 1, 0}));
  EXPECT_NEAR(r.eigenvalues[0], 1.0, 1e-15);
  EXPECT_NEAR(r.eigenvalues[1], -1.0, 1e-15);
}

TEST(Eigh, NonSquareRejected) {
  EXPECT_THROW(mpsee::eigh(DenseTensor({2, 3})), mpsee::ArgumentError);
  EXPECT_THROW(mpsee::eigh(DenseTensor({4})), mpsee::ArgumentError);
}

TEST(EighProperty, ReconstructsRandomSymmetric) {
  gen::Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = gen::uniform_index(rng, 1, 6);
    auto a = gen::normal_tensor(rng, {n, n});
    const auto sym = a;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a.at({i, j}) = sym.at({i, j}) + sym.at({j, i});
    const auto r = mpsee::eigh(a);
    auto ql = r.eigenvectors;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ql.at({i, j}) *= r.eigenvalues[j];
    EXPECT_LE(max_abs_diff(matmul(ql, transpose(r.eigenvectors)), a), 1e-10);
    EXPECT_LE(max_abs_diff(matmul(transpose(r.eigenvectors), r.eigenvectors),
                           DenseTensor::identity(n)),
              1e-10);
  }
}

TEST(EighProperty, TraceOneDensityMatrixEigenvaluesSumToOne) {
  gen::Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = gen::uniform_index(rng, 2, 5);
    const auto b = gen::normal_tensor(rng, {n, n});
    auto rho = matmul(b, transpose(b));
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += rho.at({i, i});
    rho = rho.scaled(1.0 / tr);
    double sum = 0.0;
    for (double l : mpsee::eigh(rho).eigenvalues) sum += l;
    EXPECT_NEAR(sum, 1.0, 1e-10);
  }
}

}  // namespace
