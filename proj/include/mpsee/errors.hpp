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

#ifndef MPSEE_ERRORS_HPP
#define MPSEE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpsee {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor extents do not line up (contraction, reshape, site bonds).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid call arguments (bad index, empty partition, inconsistent sizes).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A feature value outside [0,1].
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::size_t feature_index)
      : Error(what), feature_index_(feature_index) {}

  std::size_t feature_index() const { return feature_index_; }

 private:
  std::size_t feature_index_;
};

/// Malformed model, IDX, PGM or CSV input.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Request exceeding a hard size guard (dense expansion of a long chain).
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A precondition on a numerical object was violated (e.g. trace of a
/// density matrix far from one).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A projective measurement whose outcome has (numerically) zero probability.
class ZeroProbabilityError : public Error {
 public:
  ZeroProbabilityError(const std::string& what, std::size_t site)
      : Error(what), site_(site) {}

  std::size_t site() const { return site_; }

 private:
  std::size_t site_;
};

/// A training sample whose amplitude vanished below representable range.
class UnderflowError : public Error {
 public:
  UnderflowError(const std::string& what, std::size_t sample)
      : Error(what), sample_(sample) {}

  std::size_t sample() const { return sample_; }

 private:
  std::size_t sample_;
};

}  // namespace mpsee

#endif  // MPSEE_ERRORS_HPP
