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


#ifndef MPSEE_SRC_PARALLEL_HPP
#define MPSEE_SRC_PARALLEL_HPP

#include <cstddef>
#include <exception>

namespace mpsee::detail {

// Runs body(i) for i in [0, n) across OpenMP threads; the first exception
// thrown by any iteration is rethrown afterwards.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr failure;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(mpsee_parallel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mpsee::detail

#endif  // MPSEE_SRC_PARALLEL_HPP
