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

#include "cellstore/views.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "cellstore/error.hpp"

namespace cellstore {

namespace {

const std::map<std::string, Aggregator>& aggregator_names() {
  static const std::map<std::string, Aggregator> m{{"sum", Aggregator::Sum}, {"count", Aggregator::Count},
                                                   {"min", Aggregator::Min}, {"max", Aggregator::Max},
                                                   {"avg", Aggregator::Avg}};
  return m;
}

std::string_view aggregator_name(Aggregator a) {
  for (const auto& [name, v] : aggregator_names()) {
    if (v == a) return name;
  }
  return "sum";
}

std::vector<std::string> names_from(const Json& doc, const char* member) {
  std::vector<std::string> out;
  if (!doc.contains(member)) return out;
  if (!doc[member].is_array()) fail(ErrorCode::BadSpreadsheetDef, std::string(member) + " must be an array");
  for (const auto& n : doc[member]) out.emplace_back(require_string(n, member));
  return out;
}

std::string tuple_key(const std::vector<AspectValue>& t) {
  std::string out;
  for (const auto& v : t) {
    const auto c = v.canonical();
    out += std::to_string(static_cast<int>(v.kind())) + std::to_string(c.size()) + ':' + c;
  }
  return out;
}

}  // namespace

SpreadsheetDef SpreadsheetDef::from_json(const Json& doc) {
  if (!doc.is_object()) fail(ErrorCode::BadSpreadsheetDef, "spreadsheet definition must be an object");
  SpreadsheetDef def;
  if (doc.contains("name")) def.name = std::string(require_string(doc["name"], "name"));
  if (doc.contains("slicers")) {
    if (!doc["slicers"].is_object()) fail(ErrorCode::BadSpreadsheetDef, "slicers must be an object");
    for (auto it = doc["slicers"].begin(); it != doc["slicers"].end(); ++it) {
      def.slicers.emplace_back(it.key(), value_from_json(it.value()));
    }
  }
  def.rows = names_from(doc, "rows");
  def.columns = names_from(doc, "columns");
  if (doc.contains("aggregator")) {
    auto a = aggregator_names().find(std::string(require_string(doc["aggregator"], "aggregator")));
    if (a == aggregator_names().end()) fail(ErrorCode::BadSpreadsheetDef, "unknown aggregator");
    def.aggregator = a->second;
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    static const std::set<std::string> known{"name", "slicers", "rows", "columns", "aggregator"};
    if (!known.count(it.key())) fail(ErrorCode::BadSpreadsheetDef, "unknown member '" + it.key() + "'");
  }
  return def;
}

Json SpreadsheetDef::to_json() const {
  Json slicers_json = Json::object();
  for (const auto& [d, v] : slicers) slicers_json[d] = value_to_json(v);
  Json doc{{"name", name}, {"slicers", std::move(slicers_json)}, {"rows", rows}, {"columns", columns}};
  if (aggregator) doc["aggregator"] = std::string(aggregator_name(*aggregator));
  return doc;
}

SpreadsheetDef auto_layout(const Hypercube& cube, std::span<const Cell> cells) {
  SpreadsheetDef def;
  for (const auto& d : cube.dimensions()) {
    std::optional<AspectValue> only;
    bool single = !cells.empty();
    for (const auto& c : cells) {
      const auto* v = c.find(d.name);
      if (!v || (only && *only != *v)) {
        single = false;
        break;
      }
      only = *v;
    }
    if (d.name == kConceptDimension) def.rows.push_back(d.name);
    else if (single) def.slicers.emplace_back(d.name, *only);
    else def.columns.push_back(d.name);
  }
  return def;
}

Hypercube def_to_hypercube(const SpreadsheetDef& def, const Hypercube& cube) {
  std::set<std::string> used;
  auto use = [&](const std::string& dim) {
    if (!cube.find(dim)) fail(ErrorCode::UnknownDimension, "dimension '" + dim + "' is not in the hypercube");
    if (!used.insert(dim).second) fail(ErrorCode::BadSpreadsheetDef, "dimension '" + dim + "' is used twice");
  };
  for (const auto& [d, v] : def.slicers) use(d);
  for (const auto& d : def.rows) use(d);
  for (const auto& d : def.columns) use(d);
  std::vector<HypercubeDimension> dims = cube.dimensions();
  for (auto& d : dims) {
    auto s = std::find_if(def.slicers.begin(), def.slicers.end(), [&](const auto& p) { return p.first == d.name; });
    if (s == def.slicers.end()) continue;
    if (!range_contains(d.range, s->second)) {
      fail(ErrorCode::BadSpreadsheetDef, "slicer value '" + s->second.canonical() + "' is outside " + d.name);
    }
    d.range = Enumeration{{s->second}};
    if (d.default_value && *d.default_value != s->second) d.default_value.reset();
  }
  return Hypercube(std::move(dims));
}

std::size_t GridView::populated() const {
  std::size_t n = 0;
  for (const auto& r : cells) {
    for (const auto& c : r) n += c.has_value();
  }
  return n;
}

Json GridView::to_json() const {
  auto tuple_json = [](const std::vector<std::vector<AspectValue>>& headers) {
    Json out = Json::array();
    for (const auto& t : headers) {
      Json row = Json::array();
      for (const auto& v : t) row.push_back(value_to_json(v));
      out.push_back(std::move(row));
    }
    return out;
  };
  Json slicers_json = Json::array();
  for (const auto& [d, v] : slicers) slicers_json.push_back(Json{{"dimension", d}, {"value", value_to_json(v)}});
  Json grid = Json::array();
  for (const auto& r : cells) {
    Json row = Json::array();
    for (const auto& c : r) {
      if (!c) {
        row.push_back(nullptr);
        continue;
      }
      Json cell{{"value", value_to_json(c->value)}, {"contributors", c->contributors}};
      if (c->contributors == 1) cell["key"] = c->keys.front().to_hex();
      if (c->imputed) cell["imputed"] = true;
      if (c->l_shape) cell["lShape"] = true;
      if (c->key_collision) cell["keyCollision"] = true;
      if (c->check) cell["check"] = std::string(to_string(*c->check));
      row.push_back(std::move(cell));
    }
    grid.push_back(std::move(row));
  }
  return Json{{"name", name},
              {"slicers", std::move(slicers_json)},
              {"rowDimensions", row_dimensions},
              {"columnDimensions", column_dimensions},
              {"rowCaption", row_caption},
              {"rowHeaders", tuple_json(row_headers)},
              {"columnHeaders", tuple_json(column_headers)},
              {"cells", std::move(grid)}};
}

GridView render(const SpreadsheetDef& def, const Hypercube& cube, std::span<const Cell> cells, const RenderOptions& options) {
  const Hypercube restricted = def_to_hypercube(def, cube);
  GridView view;
  view.name = def.name;
  view.slicers = def.slicers;
  view.row_dimensions = def.rows;
  view.column_dimensions = def.columns;
  view.row_caption = def.rows.size() == 1 && def.rows[0] == kConceptDimension ? "Line items" : "";

  // Cells that belong to this view (slicers applied, original coordinates).
  std::vector<const Cell*> in_view;
  for (const auto& c : cells) {
    bool ok = true;
    for (const auto& [d, v] : def.slicers) {
      const auto* cv = c.find(d);
      if (!cv || *cv != v) {
        ok = false;
        break;
      }
    }
    if (ok) in_view.push_back(&c);
  }

  // Rank of each value per dimension: preferred order, then enumeration order, then sorted.
  auto rank_of = [&](const std::string& dim) {
    std::vector<AspectValue> order;
    if (auto it = options.header_order.find(dim); it != options.header_order.end()) order = it->second;
    if (const auto* d = restricted.find(dim)) {
      if (const auto* e = std::get_if<Enumeration>(&d->range)) {
        for (const auto& v : e->values) {
          if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
        }
      }
    }
    return order;
  };
  auto tuple_less = [&](const std::vector<std::string>& dims) {
    std::vector<std::vector<AspectValue>> orders;
    for (const auto& d : dims) orders.push_back(rank_of(d));
    return [orders](const std::vector<AspectValue>& a, const std::vector<AspectValue>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        const auto& o = orders[i];
        auto ia = std::find(o.begin(), o.end(), a[i]);
        auto ib = std::find(o.begin(), o.end(), b[i]);
        if (ia != ib) return ia < ib;  // listed values first, in listed order
        return KindThenValueLess{}(a[i], b[i]);
      }
      return false;
    };
  };
  auto tuple_of = [](const Cell& c, const std::vector<std::string>& dims) {
    std::vector<AspectValue> t;
    for (const auto& d : dims) t.push_back(*c.find(d));
    return t;
  };

  std::map<std::string, std::vector<AspectValue>> rows_seen, cols_seen;
  for (const Cell* c : in_view) {
    auto r = tuple_of(*c, def.rows);
    auto k = tuple_of(*c, def.columns);
    rows_seen.emplace(tuple_key(r), std::move(r));
    cols_seen.emplace(tuple_key(k), std::move(k));
  }
  for (auto& [k, t] : rows_seen) view.row_headers.push_back(t);
  for (auto& [k, t] : cols_seen) view.column_headers.push_back(t);
  std::stable_sort(view.row_headers.begin(), view.row_headers.end(), tuple_less(def.rows));
  std::stable_sort(view.column_headers.begin(), view.column_headers.end(), tuple_less(def.columns));
  std::unordered_map<std::string, std::size_t> row_index, col_index;
  for (std::size_t i = 0; i < view.row_headers.size(); ++i) row_index[tuple_key(view.row_headers[i])] = i;
  for (std::size_t j = 0; j < view.column_headers.size(); ++j) col_index[tuple_key(view.column_headers[j])] = j;

  std::vector<std::vector<std::vector<const Cell*>>> slots(
      view.row_headers.size(), std::vector<std::vector<const Cell*>>(view.column_headers.size()));
  for (const Cell* c : in_view) {
    slots[row_index[tuple_key(tuple_of(*c, def.rows))]][col_index[tuple_key(tuple_of(*c, def.columns))]].push_back(c);
  }

  std::unordered_map<std::string, CheckStatus> check_of;
  for (const auto& ch : options.checks) {
    auto key = canonical_key(ch.target).bytes();
    auto it = check_of.find(key);
    // A failure anywhere wins over a pass.
    if (it == check_of.end() || ch.status == CheckStatus::Fail) check_of[key] = ch.status;
  }

  const bool all_numbers = std::all_of(in_view.begin(), in_view.end(),
                                       [](const Cell* c) { return c->value.kind() == ValueKind::Number; });
  const Aggregator agg = def.aggregator.value_or(all_numbers ? Aggregator::Sum : Aggregator::Count);

  view.cells.assign(view.row_headers.size(), std::vector<std::optional<GridCell>>(view.column_headers.size()));
  for (std::size_t i = 0; i < slots.size(); ++i) {
    for (std::size_t j = 0; j < slots[i].size(); ++j) {
      const auto& contributors = slots[i][j];
      if (contributors.empty()) continue;
      GridCell g;
      g.contributors = contributors.size();
      for (const Cell* c : contributors) {
        g.keys.push_back(c->key());
        g.imputed = g.imputed || c->audit.has_value();
        g.key_collision = g.key_collision || c->key_collision;
      }
      if (contributors.size() == 1 && agg != Aggregator::Count) {
        g.value = contributors.front()->value;
      } else if (agg == Aggregator::Count) {
        g.value = Decimal(static_cast<std::int64_t>(contributors.size()));
      } else {
        for (const Cell* c : contributors) {
          if (c->value.kind() != ValueKind::Number) {
            fail(ErrorCode::NonNumericInput, "cannot aggregate non-numeric " + c->key().display());
          }
        }
        Decimal acc = contributors.front()->value.as_number();
        for (std::size_t k = 1; k < contributors.size(); ++k) {
          const Decimal& v = contributors[k]->value.as_number();
          switch (agg) {
            case Aggregator::Sum:
            case Aggregator::Avg: acc += v; break;
            case Aggregator::Min: acc = std::min(acc, v); break;
            case Aggregator::Max: acc = std::max(acc, v); break;
            case Aggregator::Count: break;
          }
        }
        if (agg == Aggregator::Avg) acc = acc / Decimal(static_cast<std::int64_t>(contributors.size()));
        g.value = acc;
      }
      for (const auto& d : restricted.dimensions()) {
        if (!d.default_value) continue;
        for (const Cell* c : contributors) {
          const auto* v = c->find(d.name);
          if (v && *v == *d.default_value) g.l_shape = true;
        }
      }
      if (contributors.size() == 1) {
        if (auto it = check_of.find(g.keys.front().bytes()); it != check_of.end()) g.check = it->second;
      }
      view.cells[i][j] = std::move(g);
    }
  }
  return view;
}

Cell plan_write_back(const SpreadsheetDef& def, const Hypercube& cube, std::span<const Cell> current,
                     const Aspects& coordinates, const AspectValue& value) {
  const Hypercube restricted = def_to_hypercube(def, cube);
  Aspects target;
  for (const auto& [d, v] : def.slicers) target.insert_or_assign(d, v);
  for (const auto& [d, v] : coordinates) {
    const auto* dim = restricted.find(d);
    if (!dim) fail(ErrorCode::UnknownDimension, "dimension '" + d + "' is not in the hypercube");
    if (!range_contains(dim->range, v)) {
      fail(ErrorCode::BadSpreadsheetDef, "value '" + v.canonical() + "' is outside " + d);
    }
    target.insert_or_assign(d, v);
  }
  for (const auto& d : restricted.dimensions()) {
    if (target.count(d.name)) continue;
    if (!d.default_value) fail(ErrorCode::IncompleteCoordinates, "no value for dimension '" + d.name + "'");
    target.emplace(d.name, *d.default_value);
  }
  std::vector<const Cell*> contributors;
  for (const auto& c : current) {
    bool match = true;
    for (const auto& [d, v] : target) {
      const auto* cv = c.find(d);
      if (!cv || *cv != v) {
        match = false;
        break;
      }
    }
    if (match) contributors.push_back(&c);
  }
  if (contributors.size() > 1) {
    fail(ErrorCode::AmbiguousSlot, std::to_string(contributors.size()) + " cells share the slot " +
                                       canonical_key(target).display());
  }
  Cell out;
  out.aspects = target;
  out.value = value;
  // A default coordinate is stored implicitly when the existing cell had it
  // injected, or when there is no existing cell.
  for (const auto& d : restricted.dimensions()) {
    if (!d.default_value || target.at(d.name) != *d.default_value) continue;
    const bool implicit = contributors.empty() || contributors.front()->is_injected(d.name);
    if (implicit) out.aspects.erase(d.name);
  }
  return out;
}

}  // namespace cellstore
