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

// Synthetic gases and the query shapes timed by the benchmark, the CLI
// `bench` command and the acceptance run.
//
// Layout: entity-major, then period, then concept. Every entity reports
// `concepts` concepts over `periods` dates. Concepts come in triples where
// C(3k) = C(3k+1) + C(3k+2). C006 is always filed under its synonym X006,
// and C000 is left out whenever period % 6 == entity % 6.

#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cellstore/catalog.hpp"
#include "cellstore/store.hpp"

namespace cellstore::workload {

struct Spec {
  std::size_t cells = 1'000'000;
  std::uint64_t seed = 42;
  std::size_t concepts = 100;
  std::size_t periods = 32;
};

std::string concept_name(std::size_t i);
std::string entity_name(std::size_t i);
Date period_date(std::size_t i);

/// Exactly spec.cells cells (the last entity may be partial).
std::vector<Cell> synthetic_cells(const Spec& spec);
std::size_t entity_count(const Spec& spec);

/// In-memory gas with Period range-indexed, ingested in batches.
CellGas build_gas(const Spec& spec);

/// Cubes for the timed shapes. `rng` picks the entity (among the complete
/// ones) and the coordinates.
Hypercube point_cube(const Spec& spec, std::mt19937_64& rng);
/// One entity and one period, every concept: 100 cells with the defaults.
Hypercube hundred_cube(const Spec& spec, std::mt19937_64& rng);
/// One concept over 30 periods (a period interval).
Hypercube row_cube(const Spec& spec, std::size_t entity);
/// Four concepts over 31 periods: 124 cells.
Hypercube two_dimension_cube(const Spec& spec, std::size_t entity);

/// Map X006 -> C006.
Map pipeline_map();
/// Eight concepts by twelve periods for one entity (96 slots): an impute
/// rollup for C000, a validate rollup for C003, the map, and a layout with
/// concepts down and periods across.
Component pipeline_component(std::size_t entity);

struct Timing {
  double median_ms = 0;
  double min_ms = 0;
  double max_ms = 0;
  std::size_t runs = 0;
};

/// Median over `runs` calls of `fn`, each timed with the steady clock.
Timing time_runs(std::size_t runs, const std::function<void()>& fn);

struct ShapeRow {
  std::string query;
  std::size_t cells = 0;
  Timing timing;
};

/// Point, row, two-dimension, raw component, component with map and
/// rules, and the full spreadsheet, each timed over `runs` runs on `gas`.
std::vector<ShapeRow> shape_table(const CellGas& gas, const Spec& spec, std::size_t runs);

}  // namespace cellstore::workload
