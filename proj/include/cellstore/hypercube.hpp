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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cellstore/cell.hpp"
#include "cellstore/interval.hpp"
#include "cellstore/json_io.hpp"
#include "cellstore/kernels.hpp"
#include "cellstore/store.hpp"

namespace cellstore {

/// Explicit, ordered set of admissible values.
struct Enumeration {
  std::vector<AspectValue> values;
  bool contains(const AspectValue& v) const;
  friend bool operator==(const Enumeration&, const Enumeration&) = default;
};

struct AnyValue {
  friend bool operator==(const AnyValue&, const AnyValue&) = default;
};

using DimensionRange = std::variant<Enumeration, Interval, AnyValue>;

bool range_contains(const DimensionRange& range, const AspectValue& v);

struct HypercubeDimension {
  std::string name;
  DimensionRange range = AnyValue{};
  std::optional<AspectValue> default_value;

  friend bool operator==(const HypercubeDimension&, const HypercubeDimension&) = default;
};

/// A set of dimensions with ranges and optional defaults. A hypercube is
/// both a schema and a query. Dimension order is the declaration order and
/// is preserved through JSON round trips.
class Hypercube {
 public:
  Hypercube() = default;

  /// Validates. Throws MissingConceptDimension, EmptyEnumeration,
  /// BadInterval, DefaultOutsideRange.
  explicit Hypercube(std::vector<HypercubeDimension> dimensions);

  /// `{"dimensions": {name: {"kind": "enum"|"interval"|"any", ...}}}`.
  /// Throws ParseError plus the validation errors above.
  static Hypercube from_json(const Json& doc);
  Json to_json() const;

  const std::vector<HypercubeDimension>& dimensions() const noexcept { return dims_; }
  const HypercubeDimension* find(std::string_view name) const;
  std::vector<std::string> dimension_names() const;

  friend bool operator==(const Hypercube&, const Hypercube&) = default;

 private:
  std::vector<HypercubeDimension> dims_;
};

/// Included cells come back adjusted: absent default-bearing dimensions are
/// injected (and listed in Cell::injected). nullopt means Excluded.
std::optional<Cell> match_cell(const Hypercube& cube, const Cell& cell);

/// Product of enumeration sizes (days for bounded date intervals);
/// nullopt when unbounded. Saturates at UINT64_MAX.
std::optional<std::uint64_t> estimate_cardinality(const Hypercube& cube);

struct QueryOptions {
  /// Overrides the store's result cap when set.
  std::optional<std::size_t> result_cap;
  kernels::ExecMode mode = kernels::ExecMode::Parallel;
};

/// Ids of the original (unadjusted) live cells inside the hypercube,
/// ascending. Throws ResultTooLarge past the result cap.
std::vector<std::uint64_t> evaluate_ids(const Hypercube& cube, const Snapshot& snapshot,
                                        const QueryOptions& options = {});

/// Adjusted result cells sorted by canonical key; each has exactly the
/// hypercube's dimensions. Throws ResultTooLarge past the result cap.
std::vector<Cell> evaluate(const Hypercube& cube, const Snapshot& snapshot, const QueryOptions& options = {});
inline std::vector<Cell> evaluate(const Hypercube& cube, const CellGas& gas, const QueryOptions& options = {}) {
  return evaluate(cube, gas.snapshot(), options);
}

/// Tabular rendering: one column per hypercube dimension, then "Value".
struct MaterializedTable {
  struct Row {
    std::vector<AspectValue> coordinates;  // one per dimension column
    AspectValue value;
    std::vector<std::string> injected;
  };

  std::vector<std::string> columns;  // dimension names, then "Value"
  std::vector<Row> rows;

  std::size_t dimension_count() const { return columns.empty() ? 0 : columns.size() - 1; }
  std::vector<Cell> to_cells() const;
  Json to_json() const;
  static MaterializedTable from_json(const Json& doc);
  /// RFC 4180 CSV with canonical lexical forms.
  std::string to_csv() const;
};

/// Throws AspectMismatch when a cell's dimensions differ from the cube's.
MaterializedTable materialize(std::span<const Cell> cells, const Hypercube& cube);

}  // namespace cellstore
