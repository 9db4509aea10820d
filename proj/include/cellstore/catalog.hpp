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

// Components bundle what a report needs: a hypercube, an optional map, the
// business rules and a spreadsheet layout. The catalog stores them with
// their concept labels and answers concept searches.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cellstore/maps.hpp"
#include "cellstore/rules.hpp"
#include "cellstore/views.hpp"

namespace cellstore {

struct ConceptInfo {
  AspectValue name;
  std::map<std::string, std::string> labels;  // language -> label
  friend bool operator==(const ConceptInfo&, const ConceptInfo&) = default;
};

struct Component {
  static constexpr int kFormatVersion = 1;

  std::string id;
  std::map<std::string, std::string> labels;
  Hypercube hypercube;
  std::optional<std::string> map_id;
  std::vector<Rule> rules;
  std::optional<SpreadsheetDef> spreadsheet;
  /// Concepts with labels; defaults to the Concept enumeration.
  std::vector<ConceptInfo> concepts;

  /// Falls back to English, then to the id.
  std::string label(const std::string& language = "en") const;

  /// Throws BadComponent (wrapping the underlying parse error message).
  static Component from_json(const Json& doc);
  Json to_json() const;
};

struct ComponentSummary {
  std::string id;
  std::string label;
  std::size_t dimensions = 0;
  std::size_t rules = 0;
};

struct ConceptHit {
  std::string component;
  AspectValue concept_name;
  std::string label;
  friend bool operator==(const ConceptHit&, const ConceptHit&) = default;
};

class Catalog {
 public:
  /// Directory layout: `<dir>/components/<id>.json`, `<dir>/maps/<id>.json`
  /// and `<dir>/index.json`.
  static Catalog open(const std::filesystem::path& dir);
  static Catalog in_memory();

  ~Catalog();
  Catalog(Catalog&&) noexcept;
  Catalog& operator=(Catalog&&) noexcept;

  /// Throws BadComponent on an unusable id.
  void put_map(const Map& map);
  std::optional<Map> get_map(const std::string& id) const;
  std::vector<std::string> map_ids() const;

  /// Throws DanglingReference when the component names an unknown map.
  void put(const Component& component);
  std::optional<Component> get(const std::string& id) const;
  std::vector<ComponentSummary> list(const std::string& language = "en") const;
  bool remove(const std::string& id);

  /// Case-insensitive substring search over concept names and labels.
  /// Hits are ordered by concept name, then component id.
  std::vector<ConceptHit> search_concepts(const std::string& query, const std::string& language = "en",
                                          std::size_t limit = 50) const;

 private:
  struct Impl;
  explicit Catalog(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

struct ComponentRun {
  Hypercube cube;
  SpreadsheetDef layout;
  /// Hypercube result after the map and rules (reported plus imputed).
  std::vector<Cell> cells;
  RuleRun rules;
  GridView grid;
};

/// Query, map, rules and grid in one go.
ComponentRun run_component(const Component& component, const Catalog& catalog, const Snapshot& snapshot,
                           const QueryOptions& options = {});

}  // namespace cellstore
