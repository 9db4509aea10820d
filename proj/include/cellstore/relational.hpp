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

// Cells <-> relational tables. Each distinct combination of non-Concept
// coordinates becomes a row keyed by those coordinates; each concept becomes
// a value column. Absent cells are nulls and nulls are absent cells.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellstore/hypercube.hpp"

namespace cellstore {

struct RelationalTable {
  using Field = std::optional<AspectValue>;
  struct Row {
    std::vector<Field> key;     // one per pk column; null = dimension absent
    std::vector<Field> values;  // one per value column
    friend bool operator==(const Row&, const Row&) = default;
  };

  std::string name;
  std::vector<std::string> pk_columns;
  /// Concept of each value column; the column header is its canonical form.
  std::vector<AspectValue> value_columns;
  std::vector<Row> rows;

  std::vector<std::string> header() const;

  Json to_json() const;
  static RelationalTable from_json(const Json& doc);

  /// `{"name", "pkColumns", "types"}`: the sidecar that lets from_csv
  /// recover kinds. Value columns not listed in types are numbers.
  Json descriptor() const;
  /// Empty fields are nulls.
  std::string to_csv() const;
  /// Throws ParseError, BadTable, BadCanonicalForm, DuplicatePrimaryKey.
  static RelationalTable from_csv(std::string_view text, const Json& descriptor);

  friend bool operator==(const RelationalTable&, const RelationalTable&) = default;
};

struct RelationalOptions {
  std::string concept_dimension = std::string(kConceptDimension);
  /// Primary-key column order; default is the sorted dimension names.
  std::optional<std::vector<std::string>> pk_order;
  std::string name;
  /// Key columns become dimensions named "<name>.<column>", so tables that
  /// share column names can live in one gas. to_relational strips the
  /// prefix and rejects dimensions without it.
  bool prefix_dimensions = false;
};

/// Throws DuplicateCellInGroup when two cells share coordinates and concept.
RelationalTable to_relational(std::span<const Cell> cells, const RelationalOptions& options = {});
/// Columns in the table's order (its hypercube dimensions minus Concept).
RelationalTable to_relational(const MaterializedTable& table, const RelationalOptions& options = {});

/// Cells sorted by canonical key. Throws DuplicatePrimaryKey.
std::vector<Cell> from_relational(const RelationalTable& table, const RelationalOptions& options = {});

}  // namespace cellstore
