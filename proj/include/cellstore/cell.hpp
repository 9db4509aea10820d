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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cellstore/aspect_value.hpp"

namespace cellstore {

inline constexpr std::string_view kConceptDimension = "Concept";
inline constexpr std::string_view kValueColumn = "Value";

/// Dimensional coordinates of a cell, ordered by dimension name (bytewise).
using Aspects = std::map<std::string, AspectValue, std::less<>>;

/// Canonical identity of an aspect map.
///
/// Encoding: for each dimension in name order, `name US kind value RS`, where
/// US/RS are the bytes 0x1F/0x1E and any of 0x1D..0x1F occurring inside a name
/// or value is preceded by the escape byte 0x1D. The kind is one letter so
/// that text "1" and number 1 never share a key.
class CellKey {
 public:
  CellKey() = default;
  explicit CellKey(std::string bytes) : bytes_(std::move(bytes)) {}

  const std::string& bytes() const noexcept { return bytes_; }
  bool empty() const noexcept { return bytes_.empty(); }

  std::string to_hex() const;
  /// Throws ParseError on malformed hex.
  static CellKey from_hex(std::string_view hex);

  /// Inverse of canonical_key. Throws CorruptRecord on malformed bytes.
  Aspects decode() const;

  /// Human-readable `Dim=value, ...` rendering for audit trails and logs.
  std::string display() const;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;

 private:
  std::string bytes_;
};

/// Throws EmptyAspects or MissingConcept.
CellKey canonical_key(const Aspects& aspects);

struct AuditTrail {
  std::string rule_id;
  std::vector<CellKey> input_keys;
  std::string formula_text;
  std::uint64_t computed_at = 0;

  friend bool operator==(const AuditTrail&, const AuditTrail&) = default;
};

struct Cell {
  Aspects aspects;
  AspectValue value;
  /// Sequence number assigned by the store; doubles as the cell id.
  std::uint64_t ingested_at = 0;
  std::string source;
  /// Present only on imputed cells.
  std::optional<AuditTrail> audit;
  /// Dimensions whose value was injected from a hypercube default.
  std::vector<std::string> injected;
  /// Set when a map rewrite made this cell's key equal another result's key.
  bool key_collision = false;

  CellKey key() const { return canonical_key(aspects); }
  bool is_injected(std::string_view dimension) const;
  const AspectValue* find(std::string_view dimension) const;

  friend bool operator==(const Cell&, const Cell&) = default;
};

enum class ViolationKind {
  EmptyAspects,
  MissingConcept,
  EmptyDimensionName,
  ReservedDimensionName,
  DuplicateDimension,
  BadCanonicalForm,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::string dimension;
  std::string message;
};

/// A not-yet-typed input record: declared kinds plus lexical forms, as read
/// from fact files, CSV rows or HTTP bodies.
struct RawValue {
  ValueKind kind = ValueKind::Text;
  std::string text;
};

struct CellDraft {
  std::vector<std::pair<std::string, RawValue>> aspects;
  RawValue value;
  std::string source;
};

/// All invariant violations of `cell`; empty means valid.
std::vector<Violation> validate_cell(const Cell& cell);
std::vector<Violation> validate_cell(const CellDraft& draft);

/// Builds a Cell from a draft that validate_cell accepted. Throws
/// BadCanonicalForm / MissingConcept / EmptyAspects otherwise.
Cell to_cell(const CellDraft& draft);

}  // namespace cellstore
