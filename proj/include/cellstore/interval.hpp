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

#include <optional>

#include "cellstore/aspect_value.hpp"

namespace cellstore {

/// Interval over one value kind; a missing bound is infinite.
struct Interval {
  std::optional<AspectValue> low;
  std::optional<AspectValue> high;
  bool low_open = false;
  bool high_open = false;

  bool bounded() const noexcept { return low.has_value() && high.has_value(); }

  /// True when low > high, or equal bounds with an open side.
  bool is_empty() const;

  /// Membership. A value of a different kind than the bounds is never a
  /// member; bounds of different kinds throw KindMismatch.
  bool contains(const AspectValue& v) const;

  /// Kind of the bounds, if any bound is present. Throws KindMismatch.
  std::optional<ValueKind> kind() const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace cellstore
