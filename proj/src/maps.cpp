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

#include "cellstore/maps.hpp"

#include <algorithm>
#include <unordered_set>

#include "cellstore/error.hpp"

namespace cellstore {

Map::Map(std::string name, std::vector<Entry> entries) : name_(std::move(name)), entries_(std::move(entries)) {
  index();
}

void Map::index() {
  lookup_.clear();
  std::map<std::string, std::unordered_set<AspectValue>, std::less<>> canonicals;
  for (const auto& e : entries_) {
    if (e.dimension.empty()) fail(ErrorCode::ParseError, "map entry without dimension");
    canonicals[e.dimension].insert(e.canonical);
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    auto& bucket = lookup_[e.dimension];
    for (const auto& syn : e.synonyms) {
      if (syn == e.canonical) continue;
      if (canonicals[e.dimension].count(syn)) {
        fail(ErrorCode::AmbiguousMap, "'" + syn.canonical() + "' on " + e.dimension +
                                          " is both a synonym and a canonical value");
      }
      auto clash = std::find_if(bucket.begin(), bucket.end(), [&](const auto& p) { return p.first == syn; });
      if (clash != bucket.end()) {
        if (entries_[clash->second].canonical == e.canonical) continue;
        fail(ErrorCode::AmbiguousMap, "'" + syn.canonical() + "' on " + e.dimension + " maps to both '" +
                                          entries_[clash->second].canonical.canonical() + "' and '" +
                                          e.canonical.canonical() + "'");
      }
      bucket.emplace_back(syn, i);
    }
  }
}

Map Map::from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    fail(ErrorCode::ParseError, "map document needs an \"entries\" array");
  }
  std::string name = doc.contains("name") ? std::string(require_string(doc["name"], "map name")) : std::string();
  std::vector<Entry> entries;
  for (const auto& e : doc["entries"]) {
    if (!e.is_object()) fail(ErrorCode::ParseError, "map entry must be an object");
    std::optional<ValueKind> hint;
    if (e.contains("type")) {
      hint = parse_kind(require_string(e["type"], "map entry type"));
      if (!hint) fail(ErrorCode::ParseError, "unknown map entry type");
    }
    Entry entry;
    entry.dimension = std::string(require_string(e.at("dimension"), "map entry dimension"));
    entry.canonical = value_from_json(e.at("canonical"), hint);
    if (!e.contains("synonyms") || !e["synonyms"].is_array()) fail(ErrorCode::ParseError, "map entry needs synonyms");
    for (const auto& s : e["synonyms"]) entry.synonyms.push_back(value_from_json(s, hint));
    entries.push_back(std::move(entry));
  }
  return Map(std::move(name), std::move(entries));
}

Json Map::to_json() const {
  Json entries = Json::array();
  for (const auto& e : entries_) {
    Json syn = Json::array();
    for (const auto& s : e.synonyms) syn.push_back(value_to_json(s));
    entries.push_back(Json{{"dimension", e.dimension}, {"canonical", value_to_json(e.canonical)}, {"synonyms", syn}});
  }
  Json doc = Json::object();
  if (!name_.empty()) doc["name"] = name_;
  doc["entries"] = std::move(entries);
  return doc;
}

const AspectValue* Map::canonical_of(std::string_view dimension, const AspectValue& value) const {
  auto it = lookup_.find(dimension);
  if (it == lookup_.end()) return nullptr;
  for (const auto& [syn, idx] : it->second) {
    if (syn == value) return &entries_[idx].canonical;
  }
  return nullptr;
}

Hypercube Map::widen(const Hypercube& cube) const {
  std::vector<HypercubeDimension> dims = cube.dimensions();
  for (auto& d : dims) {
    auto it = lookup_.find(d.name);
    if (it == lookup_.end()) continue;
    if (d.default_value && canonical_of(d.name, *d.default_value)) {
      fail(ErrorCode::AmbiguousMap, "default '" + d.default_value->canonical() + "' of " + d.name + " is a synonym");
    }
    if (auto* e = std::get_if<Enumeration>(&d.range)) {
      std::vector<AspectValue> extra;
      for (const auto& [syn, idx] : it->second) {
        if (e->contains(entries_[idx].canonical) && !e->contains(syn)) extra.push_back(syn);
      }
      e->values.insert(e->values.end(), extra.begin(), extra.end());
    } else if (std::holds_alternative<Interval>(d.range)) {
      // A synonym outside the interval may still map into it.
      for (const auto& [syn, idx] : it->second) {
        if (range_contains(d.range, entries_[idx].canonical) && !range_contains(d.range, syn)) {
          d.range = AnyValue{};
          break;
        }
      }
    }
  }
  return Hypercube(std::move(dims));
}

Cell Map::rewrite(Cell cell, bool* rewritten) const {
  bool changed = false;
  for (auto& [name, value] : cell.aspects) {
    if (const auto* c = canonical_of(name, value)) {
      value = *c;
      changed = true;
    }
  }
  if (rewritten) *rewritten = changed;
  return cell;
}

std::vector<Cell> evaluate(const Hypercube& cube, const Map& map, const Snapshot& snapshot,
                           const MapQueryOptions& options) {
  if (map.empty()) return evaluate(cube, snapshot, options.query);
  auto raw = evaluate(map.widen(cube), snapshot, options.query);
  std::vector<std::pair<CellKey, Cell>> keyed;
  keyed.reserve(raw.size());
  for (auto& c : raw) {
    Cell r = map.rewrite(std::move(c));
    bool inside = true;
    for (const auto& d : cube.dimensions()) {
      if (!range_contains(d.range, r.aspects.at(d.name))) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;
    auto key = canonical_key(r.aspects);
    keyed.emplace_back(std::move(key), std::move(r));
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second.ingested_at < b.second.ingested_at;
  });
  for (std::size_t i = 0; i + 1 < keyed.size(); ++i) {
    if (keyed[i].first != keyed[i + 1].first) continue;
    if (options.collisions == CollisionPolicy::Error) {
      fail(ErrorCode::KeyCollisionAfterRewrite, "two cells share " + keyed[i].first.display() + " after rewrite");
    }
    keyed[i].second.key_collision = true;
    keyed[i + 1].second.key_collision = true;
  }
  std::vector<Cell> out;
  out.reserve(keyed.size());
  for (auto& [k, c] : keyed) out.push_back(std::move(c));
  return out;
}

}  // namespace cellstore
