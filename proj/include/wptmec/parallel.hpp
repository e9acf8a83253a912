// Copyright 2026 The wptmec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Index loops that run either serially or across OpenMP threads. Each index
// must write only its own output slot, so both paths produce identical
// results.

#ifndef WPTMEC_PARALLEL_HPP_
#define WPTMEC_PARALLEL_HPP_

#include <cstdint>
#include <exception>
#include <vector>

namespace wptmec {

enum class Execution { kSerial, kParallel };

// Calls body(i) for i in [0, n). The exception of the lowest failing index
// is rethrown after the loop.
template <class Body>
void for_each_index(std::int64_t n, Execution exec, Body&& body) {
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n > 0 ? n : 0));
  auto guarded = [&](std::int64_t i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<size_t>(i)] = std::current_exception();
    }
  };
#ifdef WPTMEC_HAVE_OPENMP
  if (exec == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) guarded(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) guarded(i);
  }
#else
  (void)exec;
  for (std::int64_t i = 0; i < n; ++i) guarded(i);
#endif
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace wptmec

#endif  // WPTMEC_PARALLEL_HPP_
