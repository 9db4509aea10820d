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

#include "cellstore/facts.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "cellstore/detail/gas_state.hpp"
#include "cellstore/error.hpp"

namespace cellstore {

namespace {

constexpr std::size_t kImportBatch = 50000;

std::optional<ValueKind> kind_member(const Json& types, std::string_view name) {
  if (!types.is_object()) return std::nullopt;
  auto it = types.find(name);
  if (it == types.end()) return std::nullopt;
  auto k = parse_kind(require_string(*it, "type"));
  if (!k) fail(ErrorCode::ParseError, "unknown type '" + it->get<std::string>() + "'");
  return k;
}

// Kind a bare JSON scalar of `v`'s shape decodes to without any sidecar.
ValueKind native_kind(const AspectValue& v, std::optional<ValueKind> configured) {
  switch (v.kind()) {
    case ValueKind::Number:
    case ValueKind::Boolean: return v.kind();
    default: return configured.value_or(ValueKind::Text);
  }
}

}  // namespace

Cell parse_fact(std::string_view line, const StoreConfig& config) {
  const Json doc = parse_json(line);
  if (!doc.is_object()) fail(ErrorCode::ParseError, "fact must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& k = it.key();
    if (k != "Aspects" && k != "Value" && k != "Aspects:types" && k != "Value:type") {
      fail(ErrorCode::ParseError, "unknown fact member '" + k + "'");
    }
  }
  if (!doc.contains("Aspects")) fail(ErrorCode::ParseError, "fact has no Aspects");
  if (!doc.contains("Value")) fail(ErrorCode::ParseError, "fact has no Value");
  const Json& aspects = doc["Aspects"];
  if (!aspects.is_object()) fail(ErrorCode::ParseError, "Aspects must be an object");
  const Json types = doc.contains("Aspects:types") ? doc["Aspects:types"] : Json();
  if (!types.is_null() && !types.is_object()) fail(ErrorCode::ParseError, "Aspects:types must be an object");

  Cell cell;
  for (auto it = aspects.begin(); it != aspects.end(); ++it) {
    std::optional<ValueKind> hint = kind_member(types, it.key());
    if (!hint) {
      auto configured = config.dimension_types.find(it.key());
      if (configured != config.dimension_types.end() && it.value().is_string()) hint = configured->second;
    }
    cell.aspects.insert_or_assign(it.key(), value_from_json(it.value(), hint));
  }
  std::optional<ValueKind> value_hint;
  if (doc.contains("Value:type")) {
    value_hint = parse_kind(require_string(doc["Value:type"], "Value:type"));
    if (!value_hint) fail(ErrorCode::ParseError, "unknown Value:type");
  }
  cell.value = value_from_json(doc["Value"], value_hint);
  return cell;
}

std::string format_fact(const Cell& cell, const StoreConfig& config) {
  Json aspects = Json::object();
  Json types = Json::object();
  for (const auto& [name, v] : cell.aspects) {
    if (v.kind() == ValueKind::Number) aspects[name] = decimal_json(v.as_number());
    else if (v.kind() == ValueKind::Boolean) aspects[name] = v.as_boolean();
    else aspects[name] = v.canonical();
    auto configured = config.dimension_types.find(name);
    std::optional<ValueKind> conf;
    if (configured != config.dimension_types.end()) conf = configured->second;
    if (native_kind(v, conf) != v.kind()) types[name] = std::string(to_string(v.kind()));
  }
  Json doc = Json::object();
  doc["Aspects"] = std::move(aspects);
  if (!types.empty()) doc["Aspects:types"] = std::move(types);
  const auto& v = cell.value;
  if (v.kind() == ValueKind::Number) doc["Value"] = decimal_json(v.as_number());
  else if (v.kind() == ValueKind::Boolean) doc["Value"] = v.as_boolean();
  else doc["Value"] = v.canonical();
  if (v.kind() == ValueKind::Date || v.kind() == ValueKind::DateTime) doc["Value:type"] = std::string(to_string(v.kind()));
  return dump_json(doc);
}

IngestReport import_facts(CellGas& gas, std::istream& in, std::string_view source) {
  const StoreConfig config = gas.config();
  IngestReport total;
  std::vector<Cell> batch;
  std::vector<std::size_t> lines;  // line number of each batch entry
  auto flush = [&] {
    if (batch.empty()) return;
    auto r = gas.ingest(batch, source);
    total.accepted += r.accepted;
    total.collisions += r.collisions;
    total.identical_duplicates += r.identical_duplicates;
    for (auto& rej : r.rejected) total.rejected.push_back({lines[rej.record - 1], std::move(rej.violation)});
    batch.clear();
    lines.clear();
  };
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      batch.push_back(parse_fact(line, config));
      lines.push_back(number);
    } catch (const Error& e) {
      total.rejected.push_back({number, std::string(to_string(e.code())) + ": " + e.what()});
    }
    if (batch.size() >= kImportBatch) flush();
  }
  flush();
  std::sort(total.rejected.begin(), total.rejected.end(),
            [](const Rejection& a, const Rejection& b) { return a.record < b.record; });
  return total;
}

IngestReport import_facts(CellGas& gas, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return import_facts(gas, in, path.filename().string());
}

std::size_t export_facts(const Snapshot& snapshot, std::ostream& out, const std::optional<Hypercube>& cube) {
  const auto& state = snapshot.state();
  const auto& config = snapshot.config();
  std::size_t written = 0;
  if (cube) {
    QueryOptions opts;
    opts.result_cap = std::numeric_limits<std::size_t>::max();
    for (auto id : evaluate_ids(*cube, snapshot, opts)) {
      out << format_fact(*snapshot.cell(id), config) << '\n';
      ++written;
    }
  } else {
    for (detail::SlotId s = 0; s < state.slots.size(); ++s) {
      if (!state.slots[s].live) continue;
      out << format_fact(state.to_cell(s), config) << '\n';
      ++written;
    }
  }
  return written;
}

std::size_t export_facts(const Snapshot& snapshot, const std::filesystem::path& path, const std::optional<Hypercube>& cube) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  auto n = export_facts(snapshot, out, cube);
  out.flush();
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
  return n;
}

}  // namespace cellstore
