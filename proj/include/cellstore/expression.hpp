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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cellstore/decimal.hpp"

namespace cellstore {

/// Arithmetic over named quantities: `+ - * /` (also U+2212, U+00D7,
/// U+00F7), parentheses, unary minus, decimal literals, bare identifiers and
/// bracketed names such as `[Cost of sales]`.
class Expression {
 public:
  /// Throws BadRule with the column of the offending token.
  static Expression parse(std::string_view text);

  /// nullopt when a name has no value or a division by zero occurs.
  std::optional<Decimal> evaluate(const std::function<std::optional<Decimal>(const std::string&)>& lookup) const;

  /// Referenced names in first-use order, without duplicates.
  const std::vector<std::string>& names() const { return names_; }
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::vector<std::string> names_;
  std::string text_;
};

}  // namespace cellstore
