// Copyright 2026 The Cellstore Authors
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

// Data-parallel kernels behind index probing and residual filtering.
//
// Each kernel has a serial reference next to its OpenMP version. Both return
// identical, order-preserving results; tests compare them and the benchmark
// target times them against each other.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cellstore::kernels {

using SlotId = std::uint32_t;
using SlotList = std::vector<SlotId>;

enum class ExecMode { Serial, Parallel };

/// Below this many elements the parallel kernels fall back to serial.
inline constexpr std::size_t kParallelThreshold = 1U << 14;

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <class Pred>
SlotList filter_serial(std::span<const SlotId> ids, Pred&& keep) {
  SlotList out;
  for (SlotId id : ids) {
    if (keep(id)) out.push_back(id);
  }
  return out;
}

template <class Pred>
SlotList filter_parallel(std::span<const SlotId> ids, Pred&& keep) {
#ifdef _OPENMP
  if (ids.size() < kParallelThreshold || max_threads() == 1) return filter_serial(ids, keep);
  const int nthreads = max_threads();
  std::vector<SlotList> partial(static_cast<std::size_t>(nthreads));
  const auto n = static_cast<std::int64_t>(ids.size());
#pragma omp parallel num_threads(nthreads)
  {
    const int t = omp_get_thread_num();
    const int nt = omp_get_num_threads();
    const std::int64_t lo = n * t / nt;
    const std::int64_t hi = n * (t + 1) / nt;
    auto& local = partial[static_cast<std::size_t>(t)];
    for (std::int64_t i = lo; i < hi; ++i) {
      if (keep(ids[static_cast<std::size_t>(i)])) local.push_back(ids[static_cast<std::size_t>(i)]);
    }
  }
  SlotList out;
  std::size_t total = 0;
  for (const auto& p : partial) total += p.size();
  out.reserve(total);
  for (const auto& p : partial) out.insert(out.end(), p.begin(), p.end());
  return out;
#else
  return filter_serial(ids, keep);
#endif
}

/// All slots in [0, count) satisfying `keep`, ascending.
template <class Pred>
SlotList scan_serial(SlotId count, Pred&& keep) {
  SlotList out;
  for (SlotId i = 0; i < count; ++i) {
    if (keep(i)) out.push_back(i);
  }
  return out;
}

template <class Pred>
SlotList scan_parallel(SlotId count, Pred&& keep) {
#ifdef _OPENMP
  if (count < kParallelThreshold || max_threads() == 1) return scan_serial(count, keep);
  const int nthreads = max_threads();
  std::vector<SlotList> partial(static_cast<std::size_t>(nthreads));
#pragma omp parallel num_threads(nthreads)
  {
    const int t = omp_get_thread_num();
    const int nt = omp_get_num_threads();
    const auto lo = static_cast<SlotId>(static_cast<std::uint64_t>(count) * t / nt);
    const auto hi = static_cast<SlotId>(static_cast<std::uint64_t>(count) * (t + 1) / nt);
    auto& local = partial[static_cast<std::size_t>(t)];
    for (SlotId i = lo; i < hi; ++i) {
      if (keep(i)) local.push_back(i);
    }
  }
  SlotList out;
  for (const auto& p : partial) out.insert(out.end(), p.begin(), p.end());
  return out;
#else
  return scan_serial(count, keep);
#endif
}

template <class Pred>
SlotList filter(ExecMode mode, std::span<const SlotId> ids, Pred&& keep) {
  return mode == ExecMode::Parallel ? filter_parallel(ids, keep) : filter_serial(ids, keep);
}

template <class Pred>
SlotList scan(ExecMode mode, SlotId count, Pred&& keep) {
  return mode == ExecMode::Parallel ? scan_parallel(count, keep) : scan_serial(count, keep);
}

namespace detail {

// First position >= lo whose element is >= target: doubles the step until the
// target is bracketed, then binary searches the bracket.
template <class T>
std::size_t gallop(std::span<const T> list, std::size_t lo, T target) {
  std::size_t step = 1;
  std::size_t hi = lo;
  while (hi < list.size() && list[hi] < target) {
    lo = hi + 1;
    hi += step;
    step <<= 1;
  }
  hi = std::min(hi, list.size());
  auto first = list.begin() + static_cast<std::ptrdiff_t>(lo);
  auto last = list.begin() + static_cast<std::ptrdiff_t>(hi);
  return static_cast<std::size_t>(std::lower_bound(first, last, target) - list.begin());
}

}  // namespace detail

/// Intersection of two sorted, duplicate-free lists. Walks the shorter list
/// and gallops through the longer one, so cost is O(m log(n/m)).
template <class T>
std::vector<T> intersect_sorted(std::span<const T> a, std::span<const T> b) {
  if (a.size() > b.size()) std::swap(a, b);
  std::vector<T> out;
  if (a.empty()) return out;
  out.reserve(a.size());
  std::size_t pos = 0;
  for (T x : a) {
    pos = detail::gallop(b, pos, x);
    if (pos == b.size()) break;
    if (b[pos] == x) out.push_back(x);
  }
  return out;
}

/// Intersection of any number of sorted lists, smallest first.
template <class T>
std::vector<T> intersect_all(std::vector<std::span<const T>> lists) {
  if (lists.empty()) return {};
  std::sort(lists.begin(), lists.end(), [](auto x, auto y) { return x.size() < y.size(); });
  std::vector<T> acc(lists.front().begin(), lists.front().end());
  for (std::size_t i = 1; i < lists.size() && !acc.empty(); ++i) {
    acc = intersect_sorted<T>(acc, lists[i]);
  }
  return acc;
}

/// Union of sorted lists; duplicates collapse.
template <class T>
std::vector<T> union_sorted(const std::vector<std::span<const T>>& lists) {
  if (lists.size() == 1) return std::vector<T>(lists.front().begin(), lists.front().end());
  std::vector<T> out;
  std::size_t total = 0;
  for (auto l : lists) total += l.size();
  out.reserve(total);
  for (auto l : lists) out.insert(out.end(), l.begin(), l.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace cellstore::kernels
