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

#include "cellstore/hypercube.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "cellstore/csv.hpp"
#include "cellstore/detail/gas_state.hpp"
#include "cellstore/error.hpp"

namespace cellstore {

using detail::GasState;
using detail::SlotId;
using detail::SlotList;

bool Enumeration::contains(const AspectValue& v) const {
  return std::find(values.begin(), values.end(), v) != values.end();
}

bool range_contains(const DimensionRange& range, const AspectValue& v) {
  return std::visit(
      [&](const auto& r) -> bool {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, AnyValue>) return true;
        else return r.contains(v);
      },
      range);
}

// ---------------------------------------------------------------------------
// Construction and JSON

Hypercube::Hypercube(std::vector<HypercubeDimension> dimensions) : dims_(std::move(dimensions)) {
  std::set<std::string_view> seen;
  bool has_concept = false;
  for (auto& d : dims_) {
    if (d.name.empty()) fail(ErrorCode::ParseError, "hypercube dimension with empty name");
    if (!seen.insert(d.name).second) fail(ErrorCode::ParseError, "hypercube dimension '" + d.name + "' listed twice");
    if (d.name == kConceptDimension) has_concept = true;
    if (auto* e = std::get_if<Enumeration>(&d.range)) {
      if (e->values.empty()) fail(ErrorCode::EmptyEnumeration, "dimension '" + d.name + "' has an empty enumeration");
      std::vector<AspectValue> unique;
      for (auto& v : e->values) {
        if (std::find(unique.begin(), unique.end(), v) == unique.end()) unique.push_back(v);
      }
      e->values = std::move(unique);
    } else if (auto* i = std::get_if<Interval>(&d.range)) {
      try {
        i->kind();
      } catch (const Error&) {
        fail(ErrorCode::BadInterval, "dimension '" + d.name + "' has bounds of different kinds");
      }
      if (i->low && i->high && i->low->compare(*i->high) > 0) {
        fail(ErrorCode::BadInterval, "dimension '" + d.name + "' has low > high");
      }
    }
    if (d.default_value && !range_contains(d.range, *d.default_value)) {
      fail(ErrorCode::DefaultOutsideRange,
           "default '" + d.default_value->canonical() + "' of dimension '" + d.name + "' is outside its range");
    }
  }
  if (!has_concept) fail(ErrorCode::MissingConceptDimension, "hypercube has no Concept dimension");
}

const HypercubeDimension* Hypercube::find(std::string_view name) const {
  for (const auto& d : dims_) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::vector<std::string> Hypercube::dimension_names() const {
  std::vector<std::string> out;
  out.reserve(dims_.size());
  for (const auto& d : dims_) out.push_back(d.name);
  return out;
}

Hypercube Hypercube::from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("dimensions") || !doc["dimensions"].is_object()) {
    fail(ErrorCode::ParseError, "hypercube document needs a \"dimensions\" object");
  }
  std::vector<HypercubeDimension> dims;
  for (auto it = doc["dimensions"].begin(); it != doc["dimensions"].end(); ++it) {
    const Json& node = it.value();
    if (!node.is_object()) fail(ErrorCode::ParseError, "dimension '" + it.key() + "' must be an object");
    HypercubeDimension d;
    d.name = it.key();
    std::optional<ValueKind> hint;
    if (node.contains("type")) {
      hint = parse_kind(require_string(node["type"], "dimension type"));
      if (!hint) fail(ErrorCode::ParseError, "unknown type for dimension '" + d.name + "'");
    }
    std::string kind = node.contains("kind") ? std::string(require_string(node["kind"], "dimension kind"))
                                             : (node.contains("values") ? "enum" : "any");
    for (auto m = node.begin(); m != node.end(); ++m) {
      static const std::set<std::string> known{"kind", "type", "values", "low", "high", "lowOpen", "highOpen", "default"};
      if (!known.count(m.key())) fail(ErrorCode::ParseError, "unknown member '" + m.key() + "' in dimension '" + d.name + "'");
    }
    if (kind == "enum") {
      Enumeration e;
      if (!node.contains("values") || !node["values"].is_array()) {
        fail(ErrorCode::ParseError, "enum dimension '" + d.name + "' needs a \"values\" array");
      }
      for (const auto& v : node["values"]) e.values.push_back(value_from_json(v, hint));
      d.range = std::move(e);
    } else if (kind == "interval") {
      Interval i;
      if (node.contains("low") && !node["low"].is_null()) i.low = value_from_json(node["low"], hint);
      if (node.contains("high") && !node["high"].is_null()) i.high = value_from_json(node["high"], hint);
      i.low_open = node.value("lowOpen", false);
      i.high_open = node.value("highOpen", false);
      d.range = std::move(i);
    } else if (kind == "any") {
      d.range = AnyValue{};
    } else {
      fail(ErrorCode::ParseError, "unknown range kind '" + kind + "' for dimension '" + d.name + "'");
    }
    if (node.contains("default") && !node["default"].is_null()) d.default_value = value_from_json(node["default"], hint);
    dims.push_back(std::move(d));
  }
  return Hypercube(std::move(dims));
}

Json Hypercube::to_json() const {
  Json dims = Json::object();
  for (const auto& d : dims_) {
    Json node = Json::object();
    if (const auto* e = std::get_if<Enumeration>(&d.range)) {
      node["kind"] = "enum";
      Json values = Json::array();
      for (const auto& v : e->values) values.push_back(value_to_json(v));
      node["values"] = std::move(values);
    } else if (const auto* i = std::get_if<Interval>(&d.range)) {
      node["kind"] = "interval";
      if (i->low) node["low"] = value_to_json(*i->low);
      if (i->high) node["high"] = value_to_json(*i->high);
      if (i->low_open) node["lowOpen"] = true;
      if (i->high_open) node["highOpen"] = true;
    } else {
      node["kind"] = "any";
    }
    if (d.default_value) node["default"] = value_to_json(*d.default_value);
    dims[d.name] = std::move(node);
  }
  return Json{{"dimensions", std::move(dims)}};
}

// ---------------------------------------------------------------------------
// Membership

std::optional<Cell> match_cell(const Hypercube& cube, const Cell& cell) {
  for (const auto& [name, value] : cell.aspects) {
    const auto* d = cube.find(name);
    if (d == nullptr || !range_contains(d->range, value)) return std::nullopt;
  }
  Cell adjusted = cell;
  for (const auto& d : cube.dimensions()) {
    if (cell.aspects.count(d.name)) continue;
    if (!d.default_value) return std::nullopt;
    adjusted.aspects.emplace(d.name, *d.default_value);
    adjusted.injected.push_back(d.name);
  }
  return adjusted;
}

std::optional<std::uint64_t> estimate_cardinality(const Hypercube& cube) {
  std::uint64_t product = 1;
  for (const auto& d : cube.dimensions()) {
    std::uint64_t n = 0;
    if (const auto* e = std::get_if<Enumeration>(&d.range)) {
      n = e->values.size();
    } else if (const auto* i = std::get_if<Interval>(&d.range)) {
      if (!i->bounded() || i->low->kind() != ValueKind::Date) return std::nullopt;
      const auto lo = static_cast<std::int64_t>(i->low->as_date().days()) + (i->low_open ? 1 : 0);
      const auto hi = static_cast<std::int64_t>(i->high->as_date().days()) - (i->high_open ? 1 : 0);
      n = hi < lo ? 0 : static_cast<std::uint64_t>(hi - lo + 1);
    } else {
      return std::nullopt;
    }
    if (n != 0 && product > std::numeric_limits<std::uint64_t>::max() / n) {
      product = std::numeric_limits<std::uint64_t>::max();
    } else {
      product *= n;
    }
  }
  return product;
}

// ---------------------------------------------------------------------------
// Evaluation over the store indexes

namespace {

/// A hypercube resolved against one snapshot's dictionaries.
struct CompiledCube {
  struct Dim {
    const HypercubeDimension* spec = nullptr;
    std::optional<std::uint32_t> dim_id;
    std::vector<std::uint8_t> accept;  // by value id
    std::vector<std::uint32_t> accepted_ids;
    bool any = false;
  };
  std::vector<Dim> dims;
  std::vector<std::int32_t> cube_index;  // store dim id -> index in dims, or -1
  std::size_t required = 0;              // dimensions without a default
  bool impossible = false;               // a required dimension no cell carries
};

CompiledCube compile(const Hypercube& cube, const GasState& state) {
  CompiledCube cc;
  cc.cube_index.assign(state.dims.size(), -1);
  for (const auto& spec : cube.dimensions()) {
    CompiledCube::Dim d;
    d.spec = &spec;
    d.dim_id = state.find_dim(spec.name);
    if (!spec.default_value) ++cc.required;
    if (!d.dim_id) {
      if (!spec.default_value) cc.impossible = true;
      cc.dims.push_back(std::move(d));
      continue;
    }
    const auto& index = state.dims[*d.dim_id];
    d.accept.assign(index.values.size(), 0);
    auto mark = [&](std::uint32_t id) {
      if (!d.accept[id]) {
        d.accept[id] = 1;
        d.accepted_ids.push_back(id);
      }
    };
    if (const auto* e = std::get_if<Enumeration>(&spec.range)) {
      for (const auto& v : e->values) {
        if (auto id = state.find_value(*d.dim_id, v)) mark(*id);
      }
    } else if (const auto* i = std::get_if<Interval>(&spec.range)) {
      const auto kind = i->kind();
      if (index.range && !i->is_empty()) {
        auto it = i->low ? index.range->lower_bound(*i->low)
                         : (kind ? index.range->lower_bound(KindFloor{*kind}) : index.range->begin());
        for (; it != index.range->end(); ++it) {
          if (kind && it->first.kind() != *kind) break;
          if (i->high && it->first.compare(*i->high) > 0) break;
          if (i->contains(it->first)) mark(it->second);
        }
      } else {
        for (std::uint32_t id = 0; id < index.values.size(); ++id) {
          if (i->contains(index.values[id])) mark(id);
        }
      }
    } else {
      d.any = true;
      std::fill(d.accept.begin(), d.accept.end(), 1);
    }
    cc.cube_index[*d.dim_id] = static_cast<std::int32_t>(cc.dims.size());
    cc.dims.push_back(std::move(d));
  }
  return cc;
}

bool slot_matches(const CompiledCube& cc, const GasState& state, SlotId slot) {
  if (!state.slots[slot].live) return false;
  std::size_t required_seen = 0;
  for (const auto& r : state.refs_of(slot)) {
    const auto idx = cc.cube_index[r.dim];
    if (idx < 0) return false;  // dimension outside the hypercube
    const auto& d = cc.dims[static_cast<std::size_t>(idx)];
    if (!d.accept[r.value]) return false;
    if (!d.spec->default_value) ++required_seen;
  }
  return required_seen == cc.required;
}

/// Candidate slots from the index probes, or nullopt when no required
/// dimension can be probed (full scan).
std::optional<SlotList> probe(const CompiledCube& cc, const GasState& state) {
  struct Probe {
    const CompiledCube::Dim* dim;
    std::size_t cost;
  };
  std::vector<Probe> probes;
  for (const auto& d : cc.dims) {
    if (d.spec->default_value || !d.dim_id) continue;
    const auto& index = state.dims[*d.dim_id];
    std::size_t cost = 0;
    if (d.any) {
      cost = index.carriers.size();
    } else {
      for (auto id : d.accepted_ids) cost += index.postings[id].size();
    }
    probes.push_back({&d, cost});
  }
  if (probes.empty()) return std::nullopt;
  std::sort(probes.begin(), probes.end(), [](const Probe& a, const Probe& b) { return a.cost < b.cost; });

  auto lists_of = [&](const CompiledCube::Dim& d) {
    const auto& index = state.dims[*d.dim_id];
    std::vector<std::span<const SlotId>> lists;
    if (d.any) {
      lists.emplace_back(index.carriers);
    } else {
      for (auto id : d.accepted_ids) lists.emplace_back(index.postings[id]);
    }
    return lists;
  };

  SlotList candidates = kernels::union_sorted(lists_of(*probes.front().dim));
  for (std::size_t i = 1; i < probes.size() && !candidates.empty(); ++i) {
    const auto& p = probes[i];
    auto lists = lists_of(*p.dim);
    if (lists.size() == 1) {
      // A single posting list intersects by galloping without materializing.
      candidates = kernels::intersect_sorted<SlotId>(candidates, lists.front());
    } else if (p.cost <= candidates.size()) {
      candidates = kernels::intersect_sorted<SlotId>(candidates, kernels::union_sorted(lists));
    }
    // Otherwise the residual check is cheaper than building the union.
  }
  return candidates;
}

/// Cost of the cheapest posting probe, or the slot count for a scan.
std::size_t probe_cost(const CompiledCube& cc, const GasState& state) {
  std::size_t best = state.slots.size();
  for (const auto& d : cc.dims) {
    if (d.spec->default_value || !d.dim_id) continue;
    const auto& index = state.dims[*d.dim_id];
    std::size_t cost = 0;
    if (d.any) {
      cost = index.carriers.size();
    } else {
      for (auto id : d.accepted_ids) cost += index.postings[id].size();
    }
    best = std::min(best, cost);
  }
  return best;
}

constexpr std::size_t kMaxKeyLookups = 4096;

/// Live slots found by looking up every full key the cube admits, or
/// nullopt when some dimension is open-ended or the keys outnumber what a
/// posting probe would touch.
std::optional<SlotList> key_lookups(const CompiledCube& cc, const GasState& state) {
  // Per dimension: accepted value ids, plus "absent" when a default exists.
  struct Choice {
    std::uint32_t dim = 0;
    std::vector<std::optional<std::uint32_t>> options;
  };
  std::vector<Choice> choices;
  std::size_t combos = 1;
  for (const auto& d : cc.dims) {
    if (d.any) return std::nullopt;
    Choice c;
    if (d.dim_id) {
      c.dim = *d.dim_id;
      for (auto id : d.accepted_ids) c.options.emplace_back(id);
    }
    if (d.spec->default_value) c.options.emplace_back(std::nullopt);
    if (c.options.empty()) return SlotList{};
    combos *= c.options.size();
    if (combos > kMaxKeyLookups) return std::nullopt;
    choices.push_back(std::move(c));
  }
  // A hash probe costs several posting steps.
  if (combos * 8 >= probe_cost(cc, state)) return std::nullopt;
  std::sort(choices.begin(), choices.end(), [](const Choice& a, const Choice& b) { return a.dim < b.dim; });

  SlotList out;
  std::vector<std::size_t> pos(choices.size(), 0);
  std::vector<detail::AspectRef> refs;
  while (true) {
    refs.clear();
    for (std::size_t i = 0; i < choices.size(); ++i) {
      if (const auto& v = choices[i].options[pos[i]]) refs.push_back({choices[i].dim, *v});
    }
    if (!refs.empty()) {
      const SlotId slot = state.find_live(refs);
      if (slot != detail::kNoSlot) out.push_back(slot);
    }
    std::size_t i = 0;
    while (i < choices.size() && ++pos[i] == choices[i].options.size()) pos[i++] = 0;
    if (i == choices.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

SlotList matching_slots(const Hypercube& cube, const Snapshot& snapshot, const QueryOptions& options) {
  const GasState& state = snapshot.state();
  const CompiledCube cc = compile(cube, state);
  if (cc.impossible) return {};
  auto keep = [&](SlotId s) { return slot_matches(cc, state, s); };
  SlotList matched;
  if (auto found = key_lookups(cc, state)) {
    matched = kernels::filter(options.mode, *found, keep);
  } else if (auto candidates = probe(cc, state)) {
    matched = kernels::filter(options.mode, *candidates, keep);
  } else {
    matched = kernels::scan(options.mode, static_cast<SlotId>(state.slots.size()), keep);
  }
  const std::size_t cap = options.result_cap.value_or(snapshot.config().result_cap);
  if (matched.size() > cap) {
    fail(ErrorCode::ResultTooLarge,
         "hypercube result has " + std::to_string(matched.size()) + " cells, cap is " + std::to_string(cap));
  }
  return matched;
}

}  // namespace

std::vector<std::uint64_t> evaluate_ids(const Hypercube& cube, const Snapshot& snapshot, const QueryOptions& options) {
  const auto slots = matching_slots(cube, snapshot, options);
  std::vector<std::uint64_t> out;
  out.reserve(slots.size());
  for (auto s : slots) out.push_back(snapshot.state().slots[s].seq);
  return out;
}

std::vector<Cell> evaluate(const Hypercube& cube, const Snapshot& snapshot, const QueryOptions& options) {
  const GasState& state = snapshot.state();
  const auto slots = matching_slots(cube, snapshot, options);
  std::vector<std::pair<CellKey, Cell>> keyed;
  keyed.reserve(slots.size());
  for (auto s : slots) {
    Cell c = state.to_cell(s);
    for (const auto& d : cube.dimensions()) {
      if (c.aspects.count(d.name)) continue;
      c.aspects.emplace(d.name, *d.default_value);
      c.injected.push_back(d.name);
    }
    auto key = canonical_key(c.aspects);
    keyed.emplace_back(std::move(key), std::move(c));
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second.ingested_at < b.second.ingested_at;
  });
  std::vector<Cell> out;
  out.reserve(keyed.size());
  for (auto& [key, cell] : keyed) out.push_back(std::move(cell));
  return out;
}

// ---------------------------------------------------------------------------
// Materialization

MaterializedTable materialize(std::span<const Cell> cells, const Hypercube& cube) {
  MaterializedTable table;
  table.columns = cube.dimension_names();
  table.columns.emplace_back(kValueColumn);
  std::vector<std::pair<CellKey, const Cell*>> keyed;
  keyed.reserve(cells.size());
  for (const auto& c : cells) {
    bool same = c.aspects.size() == cube.dimensions().size();
    for (const auto& d : cube.dimensions()) same = same && c.aspects.count(d.name) > 0;
    if (!same) {
      fail(ErrorCode::AspectMismatch, "cell " + canonical_key(c.aspects).display() +
                                          " does not have exactly the hypercube's dimensions");
    }
    keyed.emplace_back(canonical_key(c.aspects), &c);
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [key, c] : keyed) {
    MaterializedTable::Row row;
    for (const auto& d : cube.dimensions()) row.coordinates.push_back(c->aspects.find(d.name)->second);
    row.value = c->value;
    row.injected = c->injected;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<Cell> MaterializedTable::to_cells() const {
  std::vector<Cell> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    Cell c;
    for (std::size_t i = 0; i < row.coordinates.size(); ++i) c.aspects.emplace(columns[i], row.coordinates[i]);
    c.value = row.value;
    c.injected = row.injected;
    out.push_back(std::move(c));
  }
  return out;
}

Json MaterializedTable::to_json() const {
  Json rows_json = Json::array();
  for (const auto& row : rows) {
    Json r = Json::array();
    for (const auto& v : row.coordinates) r.push_back(value_to_json(v));
    r.push_back(value_to_json(row.value));
    rows_json.push_back(std::move(r));
  }
  Json doc{{"columns", columns}, {"rows", std::move(rows_json)}};
  Json injected = Json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& dim : rows[i].injected) injected.push_back(Json{{"row", i}, {"dimension", dim}});
  }
  if (!injected.empty()) doc["injected"] = std::move(injected);
  return doc;
}

MaterializedTable MaterializedTable::from_json(const Json& doc) {
  MaterializedTable t;
  for (const auto& c : doc.at("columns")) t.columns.emplace_back(require_string(c, "column name"));
  if (t.columns.empty() || t.columns.back() != kValueColumn) {
    fail(ErrorCode::ParseError, "materialized table must end with a Value column");
  }
  for (const auto& r : doc.at("rows")) {
    if (!r.is_array() || r.size() != t.columns.size()) fail(ErrorCode::ParseError, "row width differs from header");
    Row row;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) row.coordinates.push_back(value_from_json(r[i]));
    row.value = value_from_json(r.back());
    t.rows.push_back(std::move(row));
  }
  if (doc.contains("injected")) {
    for (const auto& inj : doc["injected"]) {
      t.rows.at(inj.at("row").get<std::size_t>()).injected.emplace_back(require_string(inj.at("dimension"), "dimension"));
    }
  }
  return t;
}

std::string MaterializedTable::to_csv() const {
  std::string out = csv::format_row(columns);
  for (const auto& row : rows) {
    csv::Row fields;
    for (const auto& v : row.coordinates) fields.push_back(v.canonical());
    fields.push_back(row.value.canonical());
    out += csv::format_row(fields);
  }
  return out;
}

}  // namespace cellstore
