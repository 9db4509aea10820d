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

// Reference implementations the tests compare the library against. They
// share only the value types with the code under test.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cellstore/hypercube.hpp"
#include "cellstore/maps.hpp"
#include "cellstore/relational.hpp"

namespace oracle {

using namespace cellstore;

inline bool in_range(const DimensionRange& range, const AspectValue& v) {
  if (std::holds_alternative<AnyValue>(range)) return true;
  if (const auto* e = std::get_if<Enumeration>(&range)) {
    for (const auto& x : e->values) {
      if (x == v) return true;
    }
    return false;
  }
  const auto& i = std::get<Interval>(range);
  const AspectValue* bound = i.low ? &*i.low : (i.high ? &*i.high : nullptr);
  if (bound != nullptr && bound->kind() != v.kind()) return false;
  if (i.low) {
    auto c = v.compare(*i.low);
    if (c < 0 || (c == 0 && i.low_open)) return false;
  }
  if (i.high) {
    auto c = v.compare(*i.high);
    if (c > 0 || (c == 0 && i.high_open)) return false;
  }
  return true;
}

/// Brute-force hypercube evaluation: test every cell, inject defaults,
/// sort by the key bytes.
inline std::vector<Cell> evaluate(const Hypercube& cube, const std::vector<Cell>& cells) {
  std::vector<Cell> out;
  for (const auto& c : cells) {
    bool ok = true;
    for (const auto& [name, v] : c.aspects) {
      const auto* d = cube.find(name);
      if (d == nullptr || !in_range(d->range, v)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    Cell adj = c;
    for (const auto& d : cube.dimensions()) {
      if (c.aspects.count(d.name)) continue;
      if (!d.default_value) {
        ok = false;
        break;
      }
      adj.aspects.emplace(d.name, *d.default_value);
      adj.injected.push_back(d.name);
    }
    if (ok) out.push_back(std::move(adj));
  }
  std::stable_sort(out.begin(), out.end(), [](const Cell& a, const Cell& b) { return a.key() < b.key(); });
  return out;
}

/// Random cells over a small vocabulary so hypercubes hit nontrivial sets.
/// Dimensions other than Concept are present with probability 0.8.
struct RandomGas {
  std::vector<std::string> dims{"Entity", "Region", "Unit", "Segment"};
  int values_per_dim = 12;
  int concepts = 15;

  std::vector<Cell> cells(std::mt19937_64& rng, std::size_t n) const {
    std::vector<Cell> out;
    std::uniform_int_distribution<int> concept_id(0, concepts - 1);
    std::uniform_int_distribution<int> val(0, values_per_dim - 1);
    std::uniform_int_distribution<int> day(0, 40);
    std::bernoulli_distribution present(0.8);
    for (std::size_t i = 0; i < n; ++i) {
      Cell c;
      c.aspects.emplace("Concept", "C" + std::to_string(concept_id(rng)));
      c.aspects.emplace("Period", Date::from_days(15000 + day(rng)));
      for (const auto& d : dims) {
        if (present(rng)) c.aspects.emplace(d, d.substr(0, 1) + std::to_string(val(rng)));
      }
      c.value = Decimal(static_cast<std::int64_t>(rng() % 100000));
      out.push_back(std::move(c));
    }
    return out;
  }

  Hypercube cube(std::mt19937_64& rng) const {
    std::vector<HypercubeDimension> out;
    std::uniform_int_distribution<int> pick(0, 3);
    auto enumerate = [&](const std::string& prefix, int n) {
      Enumeration e;
      std::uniform_int_distribution<int> count(1, 4);
      std::uniform_int_distribution<int> v(0, n - 1);
      for (int k = count(rng); k > 0; --k) e.values.emplace_back(prefix + std::to_string(v(rng)));
      return e;
    };
    HypercubeDimension concept_dim{"Concept", AnyValue{}, std::nullopt};
    if (pick(rng) != 0) concept_dim.range = enumerate("C", concepts);
    out.push_back(concept_dim);
    HypercubeDimension period{"Period", AnyValue{}, std::nullopt};
    if (pick(rng) < 2) {
      std::uniform_int_distribution<int> day(0, 40);
      int a = day(rng), b = day(rng);
      Interval i;
      i.low = AspectValue(Date::from_days(15000 + std::min(a, b)));
      i.high = AspectValue(Date::from_days(15000 + std::max(a, b)));
      i.low_open = pick(rng) == 0;
      i.high_open = pick(rng) == 0;
      if (!(i.low_open || i.high_open) || a != b) period.range = i;
    }
    out.push_back(period);
    for (const auto& d : dims) {
      const int mode = pick(rng);
      if (mode == 0) continue;  // dimension left out: its carriers are excluded
      HypercubeDimension hd{d, AnyValue{}, std::nullopt};
      if (mode >= 2) hd.range = enumerate(d.substr(0, 1), values_per_dim);
      if (mode == 3) {
        const auto& vals = std::get<Enumeration>(hd.range).values;
        hd.default_value = vals.front();
      } else if (mode == 1 && pick(rng) == 0) {
        hd.default_value = AspectValue(d.substr(0, 1) + "0");
      }
      out.push_back(std::move(hd));
    }
    return Hypercube(std::move(out));
  }
};

/// Rewrite every stored cell first, then filter by brute force.
inline std::vector<Cell> rewrite_then_filter(const Hypercube& cube, const Map& map, const std::vector<Cell>& cells) {
  std::vector<Cell> rewritten;
  for (const auto& c : cells) {
    Cell r = c;
    for (auto& [dim, v] : r.aspects) {
      for (const auto& e : map.entries()) {
        if (e.dimension != dim) continue;
        if (std::find(e.synonyms.begin(), e.synonyms.end(), v) != e.synonyms.end()) v = e.canonical;
      }
    }
    rewritten.push_back(std::move(r));
  }
  return evaluate(cube, rewritten);
}

inline AspectValue random_value(std::mt19937_64& rng, ValueKind kind) {
  switch (kind) {
    case ValueKind::Number: {
      const auto scale = static_cast<int>(rng() % 4);
      std::string s = std::to_string(static_cast<std::int64_t>(rng() % 2000000) - 1000000);
      if (scale) s += "e-" + std::to_string(scale);
      return AspectValue::number(s);
    }
    case ValueKind::Date: return AspectValue(Date::from_days(static_cast<std::int32_t>(rng() % 20000)));
    case ValueKind::Boolean: return AspectValue::boolean(rng() % 2);
    default: {
      static const char* words[] = {"alpha", "beta", "gamma, delta", "say \"hi\"", "line\nbreak", "x"};
      return AspectValue(std::string(words[rng() % 6]) + std::to_string(rng() % 5));
    }
  }
}

/// Random table with null keys and null values; rows sorted by key.
inline RelationalTable random_table(std::mt19937_64& rng) {
  RelationalTable t;
  t.name = "t";
  const ValueKind pk_kinds[] = {ValueKind::Text, ValueKind::Number, ValueKind::Date};
  std::vector<ValueKind> kinds;
  const std::size_t npk = 1 + rng() % 3;
  for (std::size_t i = 0; i < npk; ++i) {
    t.pk_columns.push_back("D" + std::to_string(i));
    kinds.push_back(pk_kinds[rng() % 3]);
  }
  const std::size_t nval = 1 + rng() % 4;
  std::vector<ValueKind> value_kinds;
  for (std::size_t j = 0; j < nval; ++j) {
    t.value_columns.emplace_back("Concept" + std::to_string(j));
    value_kinds.push_back(rng() % 5 == 0 ? ValueKind::Boolean : ValueKind::Number);
  }
  std::set<std::string> keys;
  const std::size_t nrows = 1 + rng() % 30;
  for (std::size_t r = 0; r < nrows; ++r) {
    RelationalTable::Row row;
    std::string key_text;
    for (std::size_t i = 0; i < npk; ++i) {
      // Occasional null key field: the dimension is absent on those cells.
      if (rng() % 8 == 0) {
        row.key.push_back(std::nullopt);
        key_text += "|null";
      } else {
        row.key.push_back(random_value(rng, kinds[i]));
        key_text += "|" + row.key.back()->canonical();
      }
    }
    if (!keys.insert(key_text).second) continue;
    bool any = false;
    for (std::size_t j = 0; j < nval; ++j) {
      if (rng() % 3 == 0) {
        row.values.push_back(std::nullopt);
      } else {
        row.values.push_back(random_value(rng, value_kinds[j]));
        any = true;
      }
    }
    if (!any) row.values[0] = random_value(rng, value_kinds[0]);
    t.rows.push_back(std::move(row));
  }
  // Every concept column carries at least one value.
  for (std::size_t j = 0; j < nval; ++j) {
    bool any = std::any_of(t.rows.begin(), t.rows.end(), [&](const auto& r) { return r.values[j].has_value(); });
    if (!any) t.rows[rng() % t.rows.size()].values[j] = random_value(rng, value_kinds[j]);
  }
  std::sort(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.key.begin(), a.key.end(), b.key.begin(), b.key.end(), [](const auto& x, const auto& y) {
      if (!x || !y) return !x && y;
      return KindThenValueLess{}(*x, *y);
    });
  });
  return t;
}

}  // namespace oracle
