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
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "cellstore/decimal.hpp"

namespace cellstore {

enum class ValueKind : std::uint8_t { Text, Number, Date, DateTime, Boolean };

std::string_view to_string(ValueKind kind) noexcept;
/// Accepts "text", "number", "date", "dateTime" (also "datetime"), "boolean".
std::optional<ValueKind> parse_kind(std::string_view name) noexcept;

/// Calendar date, proleptic Gregorian, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  static Date from_days(std::int32_t days) { Date d; d.days_ = days; return d; }
  static Date from_ymd(int year, unsigned month, unsigned day);
  /// Strict `YYYY-MM-DD`. Throws BadCanonicalForm.
  static Date parse(std::string_view text);
  std::int32_t days() const noexcept { return days_; }
  std::string to_string() const;
  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  std::int32_t days_ = 0;
};

/// UTC instant with microsecond resolution.
class DateTime {
 public:
  constexpr DateTime() = default;
  static DateTime from_micros(std::int64_t micros) { DateTime d; d.micros_ = micros; return d; }
  /// `YYYY-MM-DDTHH:MM:SS[.ffffff][Z|(+|-)HH:MM]`; offsets normalize to UTC.
  static DateTime parse(std::string_view text);
  std::int64_t micros() const noexcept { return micros_; }
  std::string to_string() const;
  friend auto operator<=>(const DateTime&, const DateTime&) = default;

 private:
  std::int64_t micros_ = 0;
};

/// A typed dimension value (or cell value).
///
/// Equality is kind-sensitive: text "2012-09-30" and date 2012-09-30 differ.
/// Ordering only exists within a kind; compare() throws KindMismatch across
/// kinds.
class AspectValue {
 public:
  AspectValue() : data_(std::string()) {}
  AspectValue(std::string text) : data_(std::move(text)) {}  // NOLINT
  AspectValue(const char* text) : data_(std::string(text)) {}  // NOLINT
  AspectValue(Decimal number) : data_(number) {}  // NOLINT
  AspectValue(Date date) : data_(date) {}  // NOLINT
  AspectValue(DateTime instant) : data_(instant) {}  // NOLINT
  static AspectValue boolean(bool b) { AspectValue v; v.data_ = b; return v; }
  static AspectValue number(std::string_view text) { return AspectValue(Decimal::parse(text)); }
  static AspectValue date(std::string_view text) { return AspectValue(Date::parse(text)); }

  /// Parses `text` as `kind`. Throws BadCanonicalForm.
  static AspectValue parse(ValueKind kind, std::string_view text);

  ValueKind kind() const noexcept { return static_cast<ValueKind>(data_.index()); }
  bool is_number() const noexcept { return kind() == ValueKind::Number; }

  const std::string& as_text() const { return std::get<std::string>(data_); }
  const Decimal& as_number() const { return std::get<Decimal>(data_); }
  Date as_date() const { return std::get<Date>(data_); }
  DateTime as_datetime() const { return std::get<DateTime>(data_); }
  bool as_boolean() const { return std::get<bool>(data_); }

  /// Canonical lexical form; parse(kind(), canonical()) == *this.
  std::string canonical() const;

  /// Throws KindMismatch when kinds differ.
  std::strong_ordering compare(const AspectValue& other) const;

  friend bool operator==(const AspectValue& a, const AspectValue& b) noexcept {
    return a.data_ == b.data_;
  }

  std::size_t hash() const noexcept;

 private:
  std::variant<std::string, Decimal, Date, DateTime, bool> data_;
};

/// Sorts before every value of its kind; lets ordered containers seek to
/// the start of a kind.
struct KindFloor {
  ValueKind kind;
};

/// Total order over all values: by kind first, then within kind. Used for
/// ordered containers only; range predicates use AspectValue::compare.
struct KindThenValueLess {
  using is_transparent = void;
  bool operator()(const AspectValue& a, const AspectValue& b) const {
    if (a.kind() != b.kind()) return a.kind() < b.kind();
    return a.compare(b) < 0;
  }
  bool operator()(const AspectValue& a, const KindFloor& f) const { return a.kind() < f.kind; }
  bool operator()(const KindFloor& f, const AspectValue& b) const { return f.kind <= b.kind(); }
};

}  // namespace cellstore

template <>
struct std::hash<cellstore::AspectValue> {
  std::size_t operator()(const cellstore::AspectValue& v) const noexcept { return v.hash(); }
};
