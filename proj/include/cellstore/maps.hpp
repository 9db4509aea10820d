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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cellstore/hypercube.hpp"

namespace cellstore {

/// Synonym table: on each listed dimension, every synonym value stands for
/// its canonical value.
///
/// Document: `{"name": ..., "entries": [{"dimension": "Concept",
/// "canonical": "Equity", "synonyms": ["Capital"], "type": "text"}]}`.
/// Chains (a synonym that is itself a canonical) and synonyms claimed by two
/// canonicals are rejected with AmbiguousMap.
class Map {
 public:
  struct Entry {
    std::string dimension;
    AspectValue canonical;
    std::vector<AspectValue> synonyms;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  Map() = default;
  Map(std::string name, std::vector<Entry> entries);

  static Map from_json(const Json& doc);
  Json to_json() const;

  const std::string& name() const { return name_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  /// Canonical value for (dimension, value), or nullptr when unmapped.
  const AspectValue* canonical_of(std::string_view dimension, const AspectValue& value) const;

  /// Cube that also admits every synonym of an admitted canonical. Throws
  /// AmbiguousMap when a default is itself a synonym.
  Hypercube widen(const Hypercube& cube) const;

  /// Replaces synonym values by their canonicals; `rewritten` (if given)
  /// receives whether anything changed.
  Cell rewrite(Cell cell, bool* rewritten = nullptr) const;

  friend bool operator==(const Map&, const Map&) = default;

 private:
  void index();

  std::string name_;
  std::vector<Entry> entries_;
  std::map<std::string, std::vector<std::pair<AspectValue, std::size_t>>, std::less<>> lookup_;
};

enum class CollisionPolicy { Flag, Error };

struct MapQueryOptions {
  QueryOptions query;
  /// Flag marks colliding cells (Cell::key_collision); Error throws
  /// KeyCollisionAfterRewrite.
  CollisionPolicy collisions = CollisionPolicy::Flag;
};

/// Hypercube evaluation through a map: widen, evaluate, rewrite, then keep
/// only cells whose rewritten coordinates lie in the original cube.
/// Results are sorted by canonical key.
std::vector<Cell> evaluate(const Hypercube& cube, const Map& map, const Snapshot& snapshot,
                           const MapQueryOptions& options = {});

}  // namespace cellstore
