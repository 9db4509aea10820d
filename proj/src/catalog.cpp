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

#include "cellstore/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <unordered_map>

#include "cellstore/detail/fs_util.hpp"
#include "cellstore/error.hpp"

namespace cellstore {

namespace fs = std::filesystem;

namespace {

void check_id(const std::string& id, const char* what) {
  const bool ok = !id.empty() && id.size() <= 128 && id != "." && id != ".." &&
                  std::all_of(id.begin(), id.end(), [](unsigned char c) {
                    return std::isalnum(c) || c == '-' || c == '_' || c == '.';
                  });
  if (!ok) fail(ErrorCode::BadComponent, std::string(what) + " id '" + id + "' must be 1-128 of [A-Za-z0-9._-]");
}

std::map<std::string, std::string> labels_from(const Json& doc) {
  std::map<std::string, std::string> out;
  if (doc.is_string()) {
    out["en"] = doc.get<std::string>();
  } else if (doc.is_object()) {
    for (auto it = doc.begin(); it != doc.end(); ++it) out[it.key()] = std::string(require_string(it.value(), "label"));
  } else {
    fail(ErrorCode::BadComponent, "labels must be a string or an object");
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string pick_label(const std::map<std::string, std::string>& labels, const std::string& language,
                       const std::string& fallback) {
  if (auto it = labels.find(language); it != labels.end()) return it->second;
  if (auto it = labels.find("en"); it != labels.end()) return it->second;
  return fallback;
}

}  // namespace

// ---------------------------------------------------------------------------
// Component documents

std::string Component::label(const std::string& language) const { return pick_label(labels, language, id); }

Component Component::from_json(const Json& doc) {
  try {
    if (!doc.is_object()) fail(ErrorCode::BadComponent, "component must be an object");
    Component c;
    const int version = doc.value("formatVersion", kFormatVersion);
    if (version != kFormatVersion) {
      fail(ErrorCode::BadComponent, "unsupported formatVersion " + std::to_string(version));
    }
    c.id = std::string(require_string(doc.at("id"), "id"));
    check_id(c.id, "component");
    if (doc.contains("labels")) c.labels = labels_from(doc["labels"]);
    if (!doc.contains("hypercube")) fail(ErrorCode::BadComponent, "component needs a hypercube");
    c.hypercube = Hypercube::from_json(doc["hypercube"]);
    if (doc.contains("map") && !doc["map"].is_null()) c.map_id = std::string(require_string(doc["map"], "map"));
    if (doc.contains("rules")) c.rules = rules_from_json(doc["rules"]);
    if (doc.contains("spreadsheet")) {
      c.spreadsheet = SpreadsheetDef::from_json(doc["spreadsheet"]);
      (void)def_to_hypercube(*c.spreadsheet, c.hypercube);
    }
    if (doc.contains("concepts")) {
      for (const auto& e : doc["concepts"]) {
        ConceptInfo info;
        if (e.is_object()) {
          info.name = value_from_json(e.at("name"));
          if (e.contains("labels")) info.labels = labels_from(e["labels"]);
        } else {
          info.name = value_from_json(e);
        }
        c.concepts.push_back(std::move(info));
      }
    } else if (const auto* d = c.hypercube.find(kConceptDimension)) {
      if (const auto* en = std::get_if<Enumeration>(&d->range)) {
        for (const auto& v : en->values) c.concepts.push_back({v, {}});
      }
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      static const std::set<std::string> known{"formatVersion", "id", "labels", "hypercube", "map",
                                               "rules", "spreadsheet", "concepts", "description"};
      if (!known.count(it.key())) fail(ErrorCode::BadComponent, "unknown member '" + it.key() + "'");
    }
    return c;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BadComponent) throw;
    fail(ErrorCode::BadComponent, std::string(to_string(e.code())) + ": " + e.what());
  } catch (const Json::exception& e) {
    fail(ErrorCode::BadComponent, e.what());
  }
}

Json Component::to_json() const {
  Json doc{{"formatVersion", kFormatVersion}, {"id", id}};
  if (!labels.empty()) doc["labels"] = labels;
  doc["hypercube"] = hypercube.to_json();
  if (map_id) doc["map"] = *map_id;
  if (!rules.empty()) {
    Json r = Json::array();
    for (const auto& rule : rules) r.push_back(rule.to_json());
    doc["rules"] = std::move(r);
  }
  if (spreadsheet) doc["spreadsheet"] = spreadsheet->to_json();
  Json concepts_json = Json::array();
  for (const auto& ci : concepts) {
    Json e{{"name", value_to_json(ci.name)}};
    if (!ci.labels.empty()) e["labels"] = ci.labels;
    concepts_json.push_back(std::move(e));
  }
  doc["concepts"] = std::move(concepts_json);
  return doc;
}

// ---------------------------------------------------------------------------
// Catalog

struct Catalog::Impl {
  std::optional<fs::path> dir;
  mutable std::shared_mutex mu;
  std::map<std::string, Component> components;
  std::map<std::string, Map> maps;

  // Trigram -> entries; an entry is (component id, concept index).
  using Entry = std::pair<std::string, std::size_t>;
  std::unordered_map<std::string, std::set<Entry>> trigrams;

  static std::vector<std::string> search_texts(const ConceptInfo& c) {
    std::vector<std::string> t{lower(c.name.canonical())};
    for (const auto& [lang, label] : c.labels) t.push_back(lower(label));
    return t;
  }

  static std::set<std::string> grams_of(const std::string& s) {
    std::set<std::string> g;
    for (std::size_t i = 0; i + 3 <= s.size(); ++i) g.insert(s.substr(i, 3));
    return g;
  }

  void index_component(const Component& c) {
    for (std::size_t i = 0; i < c.concepts.size(); ++i) {
      for (const auto& text : search_texts(c.concepts[i])) {
        for (const auto& g : grams_of(text)) trigrams[g].insert({c.id, i});
      }
    }
  }

  void unindex_component(const Component& c) {
    for (std::size_t i = 0; i < c.concepts.size(); ++i) {
      for (const auto& text : search_texts(c.concepts[i])) {
        for (const auto& g : grams_of(text)) {
          auto it = trigrams.find(g);
          if (it == trigrams.end()) continue;
          it->second.erase({c.id, i});
          if (it->second.empty()) trigrams.erase(it);
        }
      }
    }
  }

  void write_index() const {
    if (!dir) return;
    Json entries = Json::array();
    for (const auto& [id, c] : components) {
      entries.push_back(Json{{"id", id}, {"labels", c.labels}, {"file", "components/" + id + ".json"}});
    }
    Json map_entries = Json::array();
    for (const auto& [id, m] : maps) map_entries.push_back(Json{{"id", id}, {"file", "maps/" + id + ".json"}});
    detail::write_file_atomic(*dir / "index.json",
                              dump_json(Json{{"formatVersion", 1}, {"components", entries}, {"maps", map_entries}}, 2));
  }
};

Catalog::Catalog(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Catalog::~Catalog() = default;
Catalog::Catalog(Catalog&&) noexcept = default;
Catalog& Catalog::operator=(Catalog&&) noexcept = default;

Catalog Catalog::in_memory() { return Catalog(std::make_unique<Impl>()); }

Catalog Catalog::open(const fs::path& dir) {
  auto impl = std::make_unique<Impl>();
  impl->dir = dir;
  fs::create_directories(dir / "components");
  fs::create_directories(dir / "maps");
  for (const auto& e : fs::directory_iterator(dir / "maps")) {
    if (e.path().extension() != ".json") continue;
    Map m = Map::from_json(parse_json(detail::read_file(e.path())));
    impl->maps.emplace(e.path().stem().string(), std::move(m));
  }
  for (const auto& e : fs::directory_iterator(dir / "components")) {
    if (e.path().extension() != ".json") continue;
    Component c = Component::from_json(parse_json(detail::read_file(e.path())));
    impl->index_component(c);
    impl->components.emplace(c.id, std::move(c));
  }
  return Catalog(std::move(impl));
}

void Catalog::put_map(const Map& map) {
  check_id(map.name(), "map");
  std::unique_lock lock(impl_->mu);
  if (impl_->dir) {
    detail::write_file_atomic(*impl_->dir / "maps" / (map.name() + ".json"), dump_json(map.to_json(), 2));
  }
  impl_->maps.insert_or_assign(map.name(), map);
  impl_->write_index();
}

std::optional<Map> Catalog::get_map(const std::string& id) const {
  std::shared_lock lock(impl_->mu);
  auto it = impl_->maps.find(id);
  if (it == impl_->maps.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Catalog::map_ids() const {
  std::shared_lock lock(impl_->mu);
  std::vector<std::string> out;
  for (const auto& [id, m] : impl_->maps) out.push_back(id);
  return out;
}

void Catalog::put(const Component& component) {
  check_id(component.id, "component");
  std::unique_lock lock(impl_->mu);
  if (component.map_id && !impl_->maps.count(*component.map_id)) {
    fail(ErrorCode::DanglingReference, "component '" + component.id + "' refers to unknown map '" + *component.map_id + "'");
  }
  if (impl_->dir) {
    detail::write_file_atomic(*impl_->dir / "components" / (component.id + ".json"), dump_json(component.to_json(), 2));
  }
  if (auto it = impl_->components.find(component.id); it != impl_->components.end()) {
    impl_->unindex_component(it->second);
    impl_->components.erase(it);
  }
  impl_->index_component(component);
  impl_->components.emplace(component.id, component);
  impl_->write_index();
}

std::optional<Component> Catalog::get(const std::string& id) const {
  std::shared_lock lock(impl_->mu);
  auto it = impl_->components.find(id);
  if (it == impl_->components.end()) return std::nullopt;
  return it->second;
}

std::vector<ComponentSummary> Catalog::list(const std::string& language) const {
  std::shared_lock lock(impl_->mu);
  std::vector<ComponentSummary> out;
  for (const auto& [id, c] : impl_->components) {
    out.push_back({id, c.label(language), c.hypercube.dimensions().size(), c.rules.size()});
  }
  return out;
}

bool Catalog::remove(const std::string& id) {
  std::unique_lock lock(impl_->mu);
  auto it = impl_->components.find(id);
  if (it == impl_->components.end()) return false;
  impl_->unindex_component(it->second);
  impl_->components.erase(it);
  if (impl_->dir) {
    fs::remove(*impl_->dir / "components" / (id + ".json"));
    impl_->write_index();
  }
  return true;
}

std::vector<ConceptHit> Catalog::search_concepts(const std::string& query, const std::string& language,
                                                 std::size_t limit) const {
  std::shared_lock lock(impl_->mu);
  const std::string q = lower(query);
  std::set<Impl::Entry> candidates;
  if (q.size() >= 3) {
    bool first = true;
    for (const auto& g : Impl::grams_of(q)) {
      auto it = impl_->trigrams.find(g);
      if (it == impl_->trigrams.end()) return {};
      if (first) {
        candidates = it->second;
        first = false;
      } else {
        std::set<Impl::Entry> kept;
        std::set_intersection(candidates.begin(), candidates.end(), it->second.begin(), it->second.end(),
                              std::inserter(kept, kept.end()));
        candidates = std::move(kept);
      }
      if (candidates.empty()) return {};
    }
  } else {
    for (const auto& [id, c] : impl_->components) {
      for (std::size_t i = 0; i < c.concepts.size(); ++i) candidates.insert({id, i});
    }
  }
  std::vector<ConceptHit> hits;
  for (const auto& [id, i] : candidates) {
    const auto& c = impl_->components.at(id);
    const auto& info = c.concepts[i];
    bool match = false;
    for (const auto& text : Impl::search_texts(info)) match = match || text.find(q) != std::string::npos;
    if (match) hits.push_back({id, info.name, pick_label(info.labels, language, info.name.canonical())});
  }
  std::sort(hits.begin(), hits.end(), [](const ConceptHit& a, const ConceptHit& b) {
    if (a.concept_name != b.concept_name) return KindThenValueLess{}(a.concept_name, b.concept_name);
    return a.component < b.component;
  });
  if (hits.size() > limit) hits.resize(limit);
  return hits;
}

// ---------------------------------------------------------------------------
// Pipeline

ComponentRun run_component(const Component& component, const Catalog& catalog, const Snapshot& snapshot,
                           const QueryOptions& options) {
  ComponentRun run;
  run.cube = component.hypercube;
  std::optional<Map> map;
  if (component.map_id) {
    map = catalog.get_map(*component.map_id);
    if (!map) fail(ErrorCode::DanglingReference, "map '" + *component.map_id + "' is missing");
  }
  std::vector<Cell> queried;
  if (map) {
    MapQueryOptions mo;
    mo.query = options;
    queried = evaluate(run.cube, *map, snapshot, mo);
  } else {
    queried = evaluate(run.cube, snapshot, options);
  }
  RunOptions ro;
  ro.computed_at = snapshot.sequence();
  run.rules = run_rules(component.rules, queried, ro);
  run.cells = run.rules.cells;
  run.layout = component.spreadsheet ? *component.spreadsheet : auto_layout(run.cube, run.cells);

  RenderOptions render_options;
  std::vector<AspectValue> concept_order;
  for (const auto& rule : component.rules) {
    if (rule.hierarchy && rule.hierarchy->dimension == kConceptDimension) {
      for (const auto& v : rule.hierarchy->ordered_members()) {
        if (std::find(concept_order.begin(), concept_order.end(), v) == concept_order.end()) concept_order.push_back(v);
      }
    }
  }
  for (const auto& ci : component.concepts) {
    if (std::find(concept_order.begin(), concept_order.end(), ci.name) == concept_order.end()) concept_order.push_back(ci.name);
  }
  if (!concept_order.empty()) render_options.header_order[std::string(kConceptDimension)] = concept_order;
  render_options.checks = run.rules.checks;
  run.grid = render(run.layout, run.cube, run.cells, render_options);
  if (run.grid.name.empty()) run.grid.name = component.label();
  return run;
}

}  // namespace cellstore
