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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cellstore {

/// Exact decimal number with up to 34 significant digits.
///
/// Values are kept normalized (no trailing zeros in the coefficient), so two
/// numerically equal decimals have identical representation and identical
/// canonical text. Arithmetic results with more than 34 significant digits
/// are rounded half-to-even.
class Decimal {
 public:
  static constexpr int kPrecision = 34;
  static constexpr int kMaxExponent = 100000;

  constexpr Decimal() = default;
  Decimal(std::int64_t value);  // NOLINT(google-explicit-constructor)

  /// Accepts `[+-]digits[.digits][(e|E)[+-]digits]`. Throws BadCanonicalForm.
  static Decimal parse(std::string_view text);
  static std::optional<Decimal> try_parse(std::string_view text) noexcept;

  /// Canonical text: no leading '+', no trailing fractional zeros, plain
  /// notation unless the exponent is extreme (then `d.dddE+n`).
  std::string to_string() const;

  bool is_zero() const noexcept { return coefficient_ == 0; }
  bool is_negative() const noexcept { return coefficient_ < 0; }
  bool is_integer() const noexcept { return exponent_ >= 0; }
  int exponent() const noexcept { return exponent_; }
  __int128 coefficient() const noexcept { return coefficient_; }
  int digits() const noexcept;

  Decimal abs() const noexcept;
  Decimal operator-() const noexcept;

  friend Decimal operator+(const Decimal& a, const Decimal& b);
  friend Decimal operator-(const Decimal& a, const Decimal& b);
  friend Decimal operator*(const Decimal& a, const Decimal& b);
  /// Throws DivisionByZero.
  friend Decimal operator/(const Decimal& a, const Decimal& b);

  Decimal& operator+=(const Decimal& other) { return *this = *this + other; }
  Decimal& operator-=(const Decimal& other) { return *this = *this - other; }

  friend bool operator==(const Decimal& a, const Decimal& b) noexcept {
    return a.coefficient_ == b.coefficient_ && a.exponent_ == b.exponent_;
  }
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) noexcept;

  std::size_t hash() const noexcept;

 private:
  Decimal(__int128 coefficient, int exponent) : coefficient_(coefficient), exponent_(exponent) {}
  friend struct DecimalAccess;

  __int128 coefficient_ = 0;
  int exponent_ = 0;
};

}  // namespace cellstore
