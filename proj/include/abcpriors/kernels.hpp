// Copyright 2026 The abcpriors Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Data-parallel element kernels. The OpenMP versions write each element into
// its own index slot and never reduce in parallel, so results are bit-identical
// to the serial reference for any thread count. Reductions stay serial.
// Exceptions thrown by the element callable are captured inside the parallel
// region and rethrown on the calling thread.

#include <omp.h>

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>

namespace abcpriors::kernels {

namespace detail {
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{0};
  return cap;
}

template <class Body>
void parallel_loop(std::size_t n, Body&& body) {
  const int cap = thread_cap().load();
  const int nt = cap > 0 ? cap : omp_get_max_threads();
  std::exception_ptr err = nullptr;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static) num_threads(nt)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      bool expected = false;
      if (failed.compare_exchange_strong(expected, true)) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}
}  // namespace detail

/// Global thread cap for the OpenMP kernels. 0 means the OpenMP default.
inline void set_max_threads(int n) { detail::thread_cap().store(n); }
inline int max_threads() { return detail::thread_cap().load(); }

/// out[i] = f(i) for i in [0, n). Serial reference.
template <class F>
void transform_indexed_serial(std::size_t n, double* out, F&& f) {
  for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
}

/// out[i] = f(i) for i in [0, n). OpenMP, bit-identical to the serial reference.
template <class F>
void transform_indexed(std::size_t n, double* out, F&& f) {
  detail::parallel_loop(n, [&](std::size_t i) { out[i] = f(i); });
}

/// flags[i] = f(i); used for accept/reject decisions over attempt indices.
template <class F>
void flags_indexed_serial(std::size_t n, std::uint8_t* flags, F&& f) {
  for (std::size_t i = 0; i < n; ++i) flags[i] = f(i) ? 1 : 0;
}

template <class F>
void flags_indexed(std::size_t n, std::uint8_t* flags, F&& f) {
  detail::parallel_loop(n, [&](std::size_t i) { flags[i] = f(i) ? 1 : 0; });
}

}  // namespace abcpriors::kernels
