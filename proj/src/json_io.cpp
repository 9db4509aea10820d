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

#include "cellstore/json_io.hpp"

#include "cellstore/error.hpp"

namespace cellstore {

namespace {

constexpr std::uint64_t kDecimalSubtype = 0xDE;

/// DOM builder that stores the raw lexeme of non-integral numbers.
class ExactDomParser : public nlohmann::detail::json_sax_dom_parser<Json> {
 public:
  using Base = nlohmann::detail::json_sax_dom_parser<Json>;
  using Base::Base;

  bool number_float(double /*unused*/, const std::string& lexeme) {
    Json::binary_t bin(std::vector<std::uint8_t>(lexeme.begin(), lexeme.end()), kDecimalSubtype);
    return Base::binary(bin);
  }
};

void dump_into(std::string& out, const Json& node, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  if (node.is_object()) {
    if (node.empty()) {
      out += "{}";
      return;
    }
    out.push_back('{');
    bool first = true;
    for (auto it = node.begin(); it != node.end(); ++it) {
      if (!first) out.push_back(',');
      first = false;
      newline(depth + 1);
      out += Json(it.key()).dump(-1, ' ', false, Json::error_handler_t::replace);
      out += indent < 0 ? ":" : ": ";
      dump_into(out, it.value(), indent, depth + 1);
    }
    newline(depth);
    out.push_back('}');
  } else if (node.is_array()) {
    if (node.empty()) {
      out += "[]";
      return;
    }
    out.push_back('[');
    bool first = true;
    for (const auto& item : node) {
      if (!first) out.push_back(',');
      first = false;
      newline(depth + 1);
      dump_into(out, item, indent, depth + 1);
    }
    newline(depth);
    out.push_back(']');
  } else if (is_decimal_json(node)) {
    out += decimal_from_json(node).to_string();
  } else {
    out += node.dump(-1, ' ', false, Json::error_handler_t::replace);
  }
}

}  // namespace

Json parse_json(std::string_view text) {
  Json result;
  ExactDomParser sax(result, true);
  try {
    Json::sax_parse(text, &sax);
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, e.what());
  }
  return result;
}

std::string dump_json(const Json& doc, int indent) {
  std::string out;
  dump_into(out, doc, indent, 0);
  return out;
}

Json decimal_json(const Decimal& d) {
  std::string text = d.to_string();
  return Json::binary(std::vector<std::uint8_t>(text.begin(), text.end()), kDecimalSubtype);
}

bool is_decimal_json(const Json& node) noexcept {
  return node.is_binary() && node.get_binary().has_subtype() && node.get_binary().subtype() == kDecimalSubtype;
}

Decimal decimal_from_json(const Json& node) {
  if (is_decimal_json(node)) {
    const auto& bin = node.get_binary();
    return Decimal::parse(std::string_view(reinterpret_cast<const char*>(bin.data()), bin.size()));
  }
  if (node.is_number_unsigned()) return Decimal::parse(std::to_string(node.get<std::uint64_t>()));
  if (node.is_number_integer()) return Decimal(node.get<std::int64_t>());
  fail(ErrorCode::BadCanonicalForm, "expected a number, got " + node.dump());
}

AspectValue value_from_json(const Json& node, std::optional<ValueKind> hint) {
  if (node.is_object()) {
    if (!node.contains("type") || !node.contains("value") || node.size() != 2) {
      fail(ErrorCode::BadCanonicalForm, "typed value must be {\"type\", \"value\"}");
    }
    auto kind = parse_kind(require_string(node["type"], "value type"));
    if (!kind) fail(ErrorCode::BadCanonicalForm, "unknown value type " + node["type"].dump());
    const Json& inner = node["value"];
    if (inner.is_string()) return AspectValue::parse(*kind, inner.get<std::string>());
    return value_from_json(inner, kind);
  }
  if (node.is_string()) {
    return AspectValue::parse(hint.value_or(ValueKind::Text), node.get_ref<const std::string&>());
  }
  if (node.is_boolean()) {
    if (hint && *hint != ValueKind::Boolean) fail(ErrorCode::BadCanonicalForm, "boolean where " + std::string(to_string(*hint)) + " expected");
    return AspectValue::boolean(node.get<bool>());
  }
  if (node.is_number() || is_decimal_json(node)) {
    if (hint && *hint != ValueKind::Number) fail(ErrorCode::BadCanonicalForm, "number where " + std::string(to_string(*hint)) + " expected");
    if (node.is_number_float()) {
      // Only reachable for documents built in code rather than parsed.
      fail(ErrorCode::BadCanonicalForm, "binary floating-point values are not exact decimals");
    }
    return AspectValue(decimal_from_json(node));
  }
  fail(ErrorCode::BadCanonicalForm, "unsupported JSON value " + node.dump());
}

Json value_to_json(const AspectValue& value) {
  switch (value.kind()) {
    case ValueKind::Text: return value.as_text();
    case ValueKind::Number: return decimal_json(value.as_number());
    case ValueKind::Boolean: return value.as_boolean();
    case ValueKind::Date:
    case ValueKind::DateTime:
      return Json{{"type", std::string(to_string(value.kind()))}, {"value", value.canonical()}};
  }
  return nullptr;
}

Json aspects_to_json(const Aspects& aspects) {
  Json out = Json::object();
  for (const auto& [name, value] : aspects) out[name] = value_to_json(value);
  return out;
}

Aspects aspects_from_json(const Json& node) {
  if (!node.is_object()) fail(ErrorCode::ParseError, "aspects must be a JSON object");
  Aspects out;
  for (auto it = node.begin(); it != node.end(); ++it) out.insert_or_assign(it.key(), value_from_json(it.value()));
  return out;
}

Json audit_to_json(const AuditTrail& audit) {
  Json inputs = Json::array();
  for (const auto& k : audit.input_keys) inputs.push_back(k.display());
  return Json{{"rule", audit.rule_id}, {"inputs", std::move(inputs)}, {"formula", audit.formula_text},
              {"computedAt", audit.computed_at}};
}

Json cell_to_json(const Cell& cell) {
  Json doc = Json::object();
  if (cell.ingested_at != 0) doc["id"] = cell.ingested_at;
  doc["aspects"] = aspects_to_json(cell.aspects);
  doc["value"] = value_to_json(cell.value);
  if (!cell.source.empty()) doc["source"] = cell.source;
  if (!cell.injected.empty()) doc["injected"] = cell.injected;
  if (cell.key_collision) doc["keyCollision"] = true;
  if (cell.audit) doc["audit"] = audit_to_json(*cell.audit);
  return doc;
}

std::string_view require_string(const Json& node, std::string_view what) {
  if (!node.is_string()) fail(ErrorCode::ParseError, std::string(what) + " must be a string");
  return node.get_ref<const std::string&>();
}

}  // namespace cellstore
