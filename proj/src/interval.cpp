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

#include "cellstore/interval.hpp"

#include "cellstore/error.hpp"

namespace cellstore {

std::optional<ValueKind> Interval::kind() const {
  if (low && high && low->kind() != high->kind()) {
    fail(ErrorCode::KindMismatch, "interval bounds have different kinds");
  }
  if (low) return low->kind();
  if (high) return high->kind();
  return std::nullopt;
}

bool Interval::is_empty() const {
  if (!low || !high) return false;
  auto c = low->compare(*high);
  return c > 0 || (c == 0 && (low_open || high_open));
}

bool Interval::contains(const AspectValue& v) const {
  auto k = kind();
  if (k && v.kind() != *k) return false;
  if (low) {
    auto c = v.compare(*low);
    if (c < 0 || (c == 0 && low_open)) return false;
  }
  if (high) {
    auto c = v.compare(*high);
    if (c > 0 || (c == 0 && high_open)) return false;
  }
  return true;
}

}  // namespace cellstore
