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

#include "cellstore/cell.hpp"

#include <algorithm>
#include <set>

#include "cellstore/error.hpp"

namespace cellstore {

namespace {

constexpr char kEscape = '\x1D';
constexpr char kRecordSep = '\x1E';
constexpr char kUnitSep = '\x1F';

void append_escaped(std::string& out, std::string_view s) {
  for (char c : s) {
    if (c == kEscape || c == kRecordSep || c == kUnitSep) out.push_back(kEscape);
    out.push_back(c);
  }
}

char kind_tag(ValueKind kind) {
  switch (kind) {
    case ValueKind::Text: return 't';
    case ValueKind::Number: return 'n';
    case ValueKind::Date: return 'd';
    case ValueKind::DateTime: return 'T';
    case ValueKind::Boolean: return 'b';
  }
  return 't';
}

std::optional<ValueKind> kind_from_tag(char tag) {
  switch (tag) {
    case 't': return ValueKind::Text;
    case 'n': return ValueKind::Number;
    case 'd': return ValueKind::Date;
    case 'T': return ValueKind::DateTime;
    case 'b': return ValueKind::Boolean;
    default: return std::nullopt;
  }
}

}  // namespace

CellKey canonical_key(const Aspects& aspects) {
  if (aspects.empty()) fail(ErrorCode::EmptyAspects, "aspect map is empty");
  if (aspects.find(kConceptDimension) == aspects.end()) {
    fail(ErrorCode::MissingConcept, "aspect map has no Concept dimension");
  }
  std::string out;
  out.reserve(aspects.size() * 24);
  for (const auto& [name, value] : aspects) {
    append_escaped(out, name);
    out.push_back(kUnitSep);
    out.push_back(kind_tag(value.kind()));
    append_escaped(out, value.canonical());
    out.push_back(kRecordSep);
  }
  return CellKey(std::move(out));
}

std::string CellKey::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes_.size() * 2);
  for (unsigned char c : bytes_) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xF]);
  }
  return out;
}

CellKey CellKey::from_hex(std::string_view hex) {
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    fail(ErrorCode::ParseError, "bad hex in cell key");
  };
  if (hex.size() % 2 != 0) fail(ErrorCode::ParseError, "odd-length hex cell key");
  std::string bytes;
  bytes.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    bytes.push_back(static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
  }
  return CellKey(std::move(bytes));
}

Aspects CellKey::decode() const {
  Aspects out;
  std::size_t i = 0;
  auto corrupt = [] { fail(ErrorCode::CorruptRecord, "malformed cell key"); };
  auto read_until = [&](char stop) {
    std::string s;
    while (true) {
      if (i >= bytes_.size()) corrupt();
      char c = bytes_[i++];
      if (c == kEscape) {
        if (i >= bytes_.size()) corrupt();
        s.push_back(bytes_[i++]);
      } else if (c == stop) {
        return s;
      } else if (c == kUnitSep || c == kRecordSep) {
        corrupt();
      } else {
        s.push_back(c);
      }
    }
  };
  while (i < bytes_.size()) {
    std::string name = read_until(kUnitSep);
    if (i >= bytes_.size()) corrupt();
    auto kind = kind_from_tag(bytes_[i++]);
    if (!kind) corrupt();
    std::string text = read_until(kRecordSep);
    out.insert_or_assign(std::move(name), AspectValue::parse(*kind, text));
  }
  return out;
}

std::string CellKey::display() const {
  std::string out;
  for (const auto& [name, value] : decode()) {
    if (!out.empty()) out += ", ";
    out += name + '=' + value.canonical();
  }
  return out;
}

bool Cell::is_injected(std::string_view dimension) const {
  return std::find(injected.begin(), injected.end(), dimension) != injected.end();
}

const AspectValue* Cell::find(std::string_view dimension) const {
  auto it = aspects.find(dimension);
  return it == aspects.end() ? nullptr : &it->second;
}

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::EmptyAspects: return "EmptyAspects";
    case ViolationKind::MissingConcept: return "MissingConcept";
    case ViolationKind::EmptyDimensionName: return "EmptyDimensionName";
    case ViolationKind::ReservedDimensionName: return "ReservedDimensionName";
    case ViolationKind::DuplicateDimension: return "DuplicateDimension";
    case ViolationKind::BadCanonicalForm: return "BadCanonicalForm";
  }
  return "Unknown";
}

namespace {

void check_names(const std::vector<std::string_view>& names, std::vector<Violation>& out) {
  if (names.empty()) {
    out.push_back({ViolationKind::EmptyAspects, "", "cell has no aspects"});
    return;
  }
  bool has_concept = false;
  std::set<std::string_view> seen;
  for (auto name : names) {
    if (name.empty()) out.push_back({ViolationKind::EmptyDimensionName, "", "dimension name is empty"});
    if (name == kValueColumn) {
      out.push_back({ViolationKind::ReservedDimensionName, std::string(name), "'Value' is reserved"});
    }
    if (name == kConceptDimension) has_concept = true;
    if (!seen.insert(name).second) {
      out.push_back({ViolationKind::DuplicateDimension, std::string(name), "dimension appears twice"});
    }
  }
  if (!has_concept) out.push_back({ViolationKind::MissingConcept, "", "cell has no Concept dimension"});
}

}  // namespace

std::vector<Violation> validate_cell(const Cell& cell) {
  std::vector<Violation> out;
  std::vector<std::string_view> names;
  for (const auto& [name, value] : cell.aspects) names.push_back(name);
  check_names(names, out);
  return out;
}

std::vector<Violation> validate_cell(const CellDraft& draft) {
  std::vector<Violation> out;
  std::vector<std::string_view> names;
  for (const auto& [name, raw] : draft.aspects) {
    names.push_back(name);
    try {
      AspectValue::parse(raw.kind, raw.text);
    } catch (const Error& e) {
      out.push_back({ViolationKind::BadCanonicalForm, name, e.what()});
    }
  }
  check_names(names, out);
  try {
    AspectValue::parse(draft.value.kind, draft.value.text);
  } catch (const Error& e) {
    out.push_back({ViolationKind::BadCanonicalForm, std::string(kValueColumn), e.what()});
  }
  return out;
}

Cell to_cell(const CellDraft& draft) {
  auto violations = validate_cell(draft);
  if (!violations.empty()) {
    const auto& v = violations.front();
    ErrorCode code = ErrorCode::BadCanonicalForm;
    if (v.kind == ViolationKind::MissingConcept) code = ErrorCode::MissingConcept;
    if (v.kind == ViolationKind::EmptyAspects) code = ErrorCode::EmptyAspects;
    fail(code, std::string(to_string(v.kind)) + ": " + v.message);
  }
  Cell cell;
  for (const auto& [name, raw] : draft.aspects) {
    cell.aspects.emplace(name, AspectValue::parse(raw.kind, raw.text));
  }
  cell.value = AspectValue::parse(draft.value.kind, draft.value.text);
  cell.source = draft.source;
  return cell;
}

}  // namespace cellstore
