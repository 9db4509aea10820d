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

#include "cellstore/relational.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cellstore/csv.hpp"
#include "cellstore/error.hpp"

namespace cellstore {

namespace {

bool field_less(const RelationalTable::Field& a, const RelationalTable::Field& b) {
  if (!a || !b) return !a && b;
  return KindThenValueLess{}(*a, *b);
}

bool key_less(const std::vector<RelationalTable::Field>& a, const std::vector<RelationalTable::Field>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), field_less);
}

void sort_and_check(RelationalTable& t) {
  std::sort(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) { return key_less(a.key, b.key); });
  for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
    if (t.rows[i].key == t.rows[i + 1].key) {
      std::string k;
      for (const auto& f : t.rows[i].key) k += (k.empty() ? "" : ", ") + (f ? f->canonical() : std::string("null"));
      fail(ErrorCode::DuplicatePrimaryKey, "primary key (" + k + ") appears twice");
    }
  }
}

Json field_json(const RelationalTable::Field& f) { return f ? value_to_json(*f) : Json(nullptr); }

std::string table_prefix(const std::string& name) {
  if (name.empty()) fail(ErrorCode::BadTable, "prefixed dimensions need a table name");
  return name + ".";
}

std::vector<Cell> strip_prefix(std::span<const Cell> cells, const RelationalOptions& options) {
  const auto prefix = table_prefix(options.name);
  std::vector<Cell> out;
  out.reserve(cells.size());
  for (const auto& c : cells) {
    Cell s = c;
    s.aspects.clear();
    for (const auto& [name, v] : c.aspects) {
      if (name == options.concept_dimension) {
        s.aspects.emplace(name, v);
      } else if (name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0) {
        s.aspects.emplace(name.substr(prefix.size()), v);
      } else {
        fail(ErrorCode::BadTable, "dimension '" + name + "' lacks the prefix '" + prefix + "'");
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<std::string> RelationalTable::header() const {
  std::vector<std::string> h = pk_columns;
  for (const auto& v : value_columns) h.push_back(v.canonical());
  return h;
}

RelationalTable to_relational(std::span<const Cell> cells, const RelationalOptions& options) {
  if (options.prefix_dimensions) {
    const auto stripped = strip_prefix(cells, options);
    RelationalOptions plain = options;
    plain.prefix_dimensions = false;
    return to_relational(stripped, plain);
  }
  RelationalTable t;
  t.name = options.name;
  std::set<std::string> dims;
  std::set<AspectValue, KindThenValueLess> concepts;
  for (const auto& c : cells) {
    const auto* cv = c.find(options.concept_dimension);
    if (!cv) fail(ErrorCode::MissingConcept, "cell " + c.key().display() + " has no " + options.concept_dimension);
    concepts.insert(*cv);
    for (const auto& [name, v] : c.aspects) {
      if (name != options.concept_dimension) dims.insert(name);
    }
  }
  if (options.pk_order) {
    t.pk_columns = *options.pk_order;
    for (const auto& d : dims) {
      if (std::find(t.pk_columns.begin(), t.pk_columns.end(), d) == t.pk_columns.end()) {
        fail(ErrorCode::BadTable, "dimension '" + d + "' missing from the primary-key order");
      }
    }
  } else {
    t.pk_columns.assign(dims.begin(), dims.end());
  }
  t.value_columns.assign(concepts.begin(), concepts.end());

  std::map<std::vector<RelationalTable::Field>, std::size_t,
           bool (*)(const std::vector<RelationalTable::Field>&, const std::vector<RelationalTable::Field>&)>
      row_of(key_less);
  for (const auto& c : cells) {
    std::vector<RelationalTable::Field> key;
    key.reserve(t.pk_columns.size());
    for (const auto& col : t.pk_columns) {
      const auto* v = c.find(col);
      key.push_back(v ? RelationalTable::Field(*v) : std::nullopt);
    }
    auto [it, inserted] = row_of.emplace(key, t.rows.size());
    if (inserted) t.rows.push_back({std::move(key), std::vector<RelationalTable::Field>(t.value_columns.size())});
    auto& row = t.rows[it->second];
    const auto* cv = c.find(options.concept_dimension);
    const auto col = static_cast<std::size_t>(
        std::lower_bound(t.value_columns.begin(), t.value_columns.end(), *cv, KindThenValueLess{}) - t.value_columns.begin());
    if (row.values[col]) {
      fail(ErrorCode::DuplicateCellInGroup, "two cells for " + c.key().display());
    }
    row.values[col] = c.value;
  }
  sort_and_check(t);
  return t;
}

RelationalTable to_relational(const MaterializedTable& table, const RelationalOptions& options) {
  RelationalOptions opts = options;
  if (!opts.pk_order) {
    std::vector<std::string> order;
    for (std::size_t i = 0; i < table.dimension_count(); ++i) {
      if (table.columns[i] == opts.concept_dimension) continue;
      std::string col = table.columns[i];
      if (opts.prefix_dimensions) {
        const auto prefix = table_prefix(opts.name);
        if (col.compare(0, prefix.size(), prefix) == 0) col.erase(0, prefix.size());
      }
      order.push_back(std::move(col));
    }
    opts.pk_order = std::move(order);
  }
  const auto cells = table.to_cells();
  return to_relational(cells, opts);
}

std::vector<Cell> from_relational(const RelationalTable& table, const RelationalOptions& options) {
  for (const auto& row : table.rows) {
    if (row.key.size() != table.pk_columns.size() || row.values.size() != table.value_columns.size()) {
      fail(ErrorCode::BadTable, "row width differs from the table header");
    }
  }
  {
    RelationalTable copy = table;
    sort_and_check(copy);
  }
  const std::string prefix = options.prefix_dimensions ? table_prefix(table.name) : std::string();
  std::vector<std::pair<CellKey, Cell>> keyed;
  for (const auto& row : table.rows) {
    Aspects base;
    for (std::size_t i = 0; i < row.key.size(); ++i) {
      if (row.key[i]) base.emplace(prefix + table.pk_columns[i], *row.key[i]);
    }
    for (std::size_t j = 0; j < row.values.size(); ++j) {
      if (!row.values[j]) continue;
      Cell c;
      c.aspects = base;
      c.aspects.insert_or_assign(options.concept_dimension, table.value_columns[j]);
      c.value = *row.values[j];
      auto key = canonical_key(c.aspects);
      keyed.emplace_back(std::move(key), std::move(c));
    }
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Cell> out;
  out.reserve(keyed.size());
  for (auto& [k, c] : keyed) out.push_back(std::move(c));
  return out;
}

Json RelationalTable::to_json() const {
  Json cols = Json::array();
  for (const auto& v : value_columns) cols.push_back(value_to_json(v));
  Json rows_json = Json::array();
  for (const auto& r : rows) {
    Json key = Json::array();
    for (const auto& f : r.key) key.push_back(field_json(f));
    Json values = Json::array();
    for (const auto& f : r.values) values.push_back(field_json(f));
    rows_json.push_back(Json{{"key", std::move(key)}, {"values", std::move(values)}});
  }
  return Json{{"name", name}, {"pkColumns", pk_columns}, {"valueColumns", std::move(cols)}, {"rows", std::move(rows_json)}};
}

RelationalTable RelationalTable::from_json(const Json& doc) {
  RelationalTable t;
  if (doc.contains("name")) t.name = std::string(require_string(doc["name"], "table name"));
  for (const auto& c : doc.at("pkColumns")) t.pk_columns.emplace_back(require_string(c, "pk column"));
  for (const auto& c : doc.at("valueColumns")) t.value_columns.push_back(value_from_json(c));
  auto field = [](const Json& j) { return j.is_null() ? Field() : Field(value_from_json(j)); };
  for (const auto& r : doc.at("rows")) {
    Row row;
    for (const auto& f : r.at("key")) row.key.push_back(field(f));
    for (const auto& f : r.at("values")) row.values.push_back(field(f));
    if (row.key.size() != t.pk_columns.size() || row.values.size() != t.value_columns.size()) {
      fail(ErrorCode::BadTable, "row width differs from the table header");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Json RelationalTable::descriptor() const {
  Json types = Json::object();
  auto kind_of_column = [&](auto get) -> std::optional<ValueKind> {
    std::optional<ValueKind> k;
    for (const auto& r : rows) {
      const Field& f = get(r);
      if (!f) continue;
      if (k && *k != f->kind()) fail(ErrorCode::BadTable, "column mixes value kinds; CSV cannot carry it");
      k = f->kind();
    }
    return k;
  };
  for (std::size_t i = 0; i < pk_columns.size(); ++i) {
    auto k = kind_of_column([&](const Row& r) -> const Field& { return r.key[i]; });
    if (k && *k != ValueKind::Text) types[pk_columns[i]] = std::string(to_string(*k));
  }
  for (std::size_t j = 0; j < value_columns.size(); ++j) {
    if (value_columns[j].kind() != ValueKind::Text) fail(ErrorCode::BadTable, "CSV value columns need text concepts");
    auto k = kind_of_column([&](const Row& r) -> const Field& { return r.values[j]; });
    if (k && *k != ValueKind::Number) types[value_columns[j].as_text()] = std::string(to_string(*k));
  }
  return Json{{"name", name}, {"pkColumns", pk_columns}, {"types", std::move(types)}};
}

std::string RelationalTable::to_csv() const {
  (void)descriptor();  // rejects tables CSV cannot represent
  std::string out = csv::format_row(header());
  for (const auto& r : rows) {
    csv::Row fields;
    for (const auto& f : r.key) fields.push_back(f ? f->canonical() : std::string());
    for (const auto& f : r.values) fields.push_back(f ? f->canonical() : std::string());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const Field& f = i < r.key.size() ? r.key[i] : r.values[i - r.key.size()];
      if (f && fields[i].empty()) fail(ErrorCode::BadTable, "empty text would read back as null");
    }
    out += csv::format_row(fields);
  }
  return out;
}

RelationalTable RelationalTable::from_csv(std::string_view text, const Json& descriptor) {
  if (!descriptor.is_object() || !descriptor.contains("pkColumns")) {
    fail(ErrorCode::BadTable, "table descriptor needs pkColumns");
  }
  RelationalTable t;
  if (descriptor.contains("name")) t.name = std::string(require_string(descriptor["name"], "table name"));
  std::map<std::string, ValueKind, std::less<>> types;
  if (descriptor.contains("types")) {
    for (auto it = descriptor["types"].begin(); it != descriptor["types"].end(); ++it) {
      auto k = parse_kind(require_string(it.value(), "column type"));
      if (!k) fail(ErrorCode::BadTable, "unknown type for column '" + it.key() + "'");
      types[it.key()] = *k;
    }
  }
  auto rows = csv::parse(text);
  // A trailing blank line parses as one empty field.
  while (!rows.empty() && rows.back().size() == 1 && rows.back()[0].empty()) rows.pop_back();
  if (rows.empty()) fail(ErrorCode::BadTable, "CSV has no header row");
  const auto& header = rows.front();
  std::vector<std::string> pk;
  for (const auto& c : descriptor["pkColumns"]) pk.emplace_back(require_string(c, "pk column"));
  std::set<std::string> seen;
  for (const auto& h : header) {
    if (!seen.insert(h).second) fail(ErrorCode::BadTable, "column '" + h + "' appears twice");
  }
  std::vector<std::size_t> pk_index;
  for (const auto& p : pk) {
    auto it = std::find(header.begin(), header.end(), p);
    if (it == header.end()) fail(ErrorCode::BadTable, "primary-key column '" + p + "' not in header");
    pk_index.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  std::vector<std::size_t> value_index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (std::find(pk_index.begin(), pk_index.end(), i) != pk_index.end()) continue;
    value_index.push_back(i);
  }
  std::vector<std::pair<AspectValue, std::size_t>> value_cols;
  for (auto i : value_index) value_cols.emplace_back(AspectValue(header[i]), i);
  std::sort(value_cols.begin(), value_cols.end(),
            [](const auto& a, const auto& b) { return KindThenValueLess{}(a.first, b.first); });
  t.pk_columns = pk;
  for (const auto& [v, i] : value_cols) t.value_columns.push_back(v);

  auto kind_of = [&](const std::string& col, ValueKind fallback) {
    auto it = types.find(col);
    return it == types.end() ? fallback : it->second;
  };
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    if (fields.size() != header.size()) {
      fail(ErrorCode::BadTable, "row " + std::to_string(r + 1) + " has " + std::to_string(fields.size()) +
                                    " fields, header has " + std::to_string(header.size()));
    }
    Row row;
    for (std::size_t k = 0; k < pk.size(); ++k) {
      const auto& f = fields[pk_index[k]];
      row.key.push_back(f.empty() ? Field() : Field(AspectValue::parse(kind_of(pk[k], ValueKind::Text), f)));
    }
    for (const auto& [concept_value, i] : value_cols) {
      const auto& f = fields[i];
      row.values.push_back(f.empty() ? Field() : Field(AspectValue::parse(kind_of(header[i], ValueKind::Number), f)));
    }
    t.rows.push_back(std::move(row));
  }
  sort_and_check(t);
  return t;
}

}  // namespace cellstore
