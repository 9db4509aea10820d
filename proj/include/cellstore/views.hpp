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

// Spreadsheet views: a hypercube result laid out as a two-dimensional grid.
// Slicer dimensions are pinned to one value, row and column dimensions span
// the headers, and any remaining dimension is aggregated away.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellstore/hypercube.hpp"
#include "cellstore/rules.hpp"

namespace cellstore {

enum class Aggregator { Sum, Count, Min, Max, Avg };

struct SpreadsheetDef {
  std::string name;
  std::vector<std::pair<std::string, AspectValue>> slicers;
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  /// Unset: Sum when every value is a number, else Count.
  std::optional<Aggregator> aggregator;

  /// `{"name", "slicers": {dim: value}, "rows": [...], "columns": [...],
  /// "aggregator": "sum"}`. Throws BadSpreadsheetDef.
  static SpreadsheetDef from_json(const Json& doc);
  Json to_json() const;

  friend bool operator==(const SpreadsheetDef&, const SpreadsheetDef&) = default;
};

/// Slicers: dimensions with one value across `cells`. Rows: Concept.
/// Columns: the other dimensions in hypercube order.
SpreadsheetDef auto_layout(const Hypercube& cube, std::span<const Cell> cells);

/// The cube restricted by the slicers. Throws UnknownDimension when the
/// definition names a dimension the cube lacks and BadSpreadsheetDef when a
/// dimension is used twice or a slicer value is outside its range.
Hypercube def_to_hypercube(const SpreadsheetDef& def, const Hypercube& cube);

struct GridCell {
  AspectValue value;
  std::size_t contributors = 0;
  std::vector<CellKey> keys;
  bool imputed = false;
  /// Some coordinate equals its dimension's default.
  bool l_shape = false;
  bool key_collision = false;
  std::optional<CheckStatus> check;
};

struct GridView {
  std::string name;
  std::vector<std::pair<std::string, AspectValue>> slicers;
  std::vector<std::string> row_dimensions;
  std::vector<std::string> column_dimensions;
  std::string row_caption;
  std::vector<std::vector<AspectValue>> row_headers;
  std::vector<std::vector<AspectValue>> column_headers;
  std::vector<std::vector<std::optional<GridCell>>> cells;  // [row][column]

  std::size_t populated() const;
  Json to_json() const;
};

struct RenderOptions {
  /// Preferred header order per dimension (e.g. from a hierarchy); values
  /// not listed follow in hypercube enumeration order, then sorted.
  std::map<std::string, std::vector<AspectValue>, std::less<>> header_order;
  /// Validation results to attach to the cells they target.
  std::span<const Check> checks;
};

/// Only observed header combinations appear. Throws UnknownDimension,
/// BadSpreadsheetDef.
GridView render(const SpreadsheetDef& def, const Hypercube& cube, std::span<const Cell> cells,
                const RenderOptions& options = {});

/// The cell to ingest when a user types `value` into the slot at
/// `coordinates` (row and column dimensions; slicers are added). Throws
/// IncompleteCoordinates when a dimension without default is unassigned and
/// AmbiguousSlot when the slot aggregates more than one cell.
Cell plan_write_back(const SpreadsheetDef& def, const Hypercube& cube, std::span<const Cell> current,
                     const Aspects& coordinates, const AspectValue& value);

}  // namespace cellstore
