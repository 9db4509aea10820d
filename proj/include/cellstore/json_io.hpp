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

#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>

#include "cellstore/aspect_value.hpp"
#include "cellstore/cell.hpp"

namespace cellstore {

/// Document type used for every JSON surface. Object member order is
/// preserved, which keeps hypercube dimension order and makes serialized
/// documents deterministic.
using Json = nlohmann::ordered_json;

/// Parses JSON keeping fractional and oversized numbers exact: they are held
/// as decimal nodes (see decimal_json) instead of binary doubles.
/// Throws ParseError.
Json parse_json(std::string_view text);

/// Serializes, writing decimal nodes as bare JSON numbers.
std::string dump_json(const Json& doc, int indent = -1);

/// A JSON node holding an exact decimal.
Json decimal_json(const Decimal& d);
bool is_decimal_json(const Json& node) noexcept;
/// Accepts decimal nodes and JSON integers. Throws BadCanonicalForm.
Decimal decimal_from_json(const Json& node);

/// Typed value encoding used by all non-fact documents: strings are text,
/// numbers are numbers, booleans are booleans, and other kinds are written as
/// `{"type": "date", "value": "2012-09-30"}`. A `hint` retypes bare strings.
AspectValue value_from_json(const Json& node, std::optional<ValueKind> hint = std::nullopt);
Json value_to_json(const AspectValue& value);

Json aspects_to_json(const Aspects& aspects);
Aspects aspects_from_json(const Json& node);

/// `{"id", "aspects", "value", "source", "injected", "keyCollision",
/// "audit"}`; empty members are omitted.
Json cell_to_json(const Cell& cell);
Json audit_to_json(const AuditTrail& audit);

std::string_view require_string(const Json& node, std::string_view what);

}  // namespace cellstore
