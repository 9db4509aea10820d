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

#include "workload.hpp"

#include <algorithm>
#include <cstdio>

namespace cellstore::workload {

namespace {

bool omitted(std::size_t entity, std::size_t concept_index, std::size_t period) {
  return concept_index == 0 && period % 6 == entity % 6;
}

std::size_t cells_of_entity(const Spec& spec, std::size_t entity) {
  std::size_t gaps = 0;
  for (std::size_t p = 0; p < spec.periods; ++p) gaps += omitted(entity, 0, p) ? 1 : 0;
  return spec.concepts * spec.periods - (spec.concepts > 0 ? gaps : 0);
}

std::string stored_concept(std::size_t i) { return i == 6 ? std::string("X006") : concept_name(i); }

HypercubeDimension enum_dim(std::string name, std::vector<AspectValue> values) {
  return {std::move(name), Enumeration{std::move(values)}, std::nullopt};
}

std::size_t pick_entity(const Spec& spec, std::mt19937_64& rng) { return rng() % entity_count(spec); }

}  // namespace

std::string concept_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "C%03zu", i);
  return buf;
}

std::string entity_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "E%05zu", i);
  return buf;
}

Date period_date(std::size_t i) {
  return Date::from_ymd(2000 + static_cast<int>(i / 12), static_cast<unsigned>(i % 12 + 1), 1);
}

std::size_t entity_count(const Spec& spec) {
  std::size_t total = 0;
  std::size_t e = 0;
  while (true) {
    const std::size_t n = cells_of_entity(spec, e);
    if (total + n > spec.cells) return std::max<std::size_t>(e, 1);
    total += n;
    ++e;
  }
}

std::vector<Cell> synthetic_cells(const Spec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::int64_t> leaf(1, 999'999);
  std::vector<Cell> out;
  out.reserve(spec.cells);
  std::vector<std::int64_t> values(spec.concepts);
  const AspectValue usd("USD");
  for (std::size_t e = 0; out.size() < spec.cells; ++e) {
    const AspectValue entity(entity_name(e));
    for (std::size_t p = 0; p < spec.periods && out.size() < spec.cells; ++p) {
      const AspectValue period(period_date(p));
      for (std::size_t c = 0; c < spec.concepts; ++c) values[c] = leaf(rng);
      for (std::size_t c = 0; c + 2 < spec.concepts; c += 3) values[c] = values[c + 1] + values[c + 2];
      for (std::size_t c = 0; c < spec.concepts && out.size() < spec.cells; ++c) {
        if (omitted(e, c, p)) continue;
        Cell cell;
        cell.aspects = {{"Concept", AspectValue(stored_concept(c))},
                        {"Entity", entity},
                        {"Period", period},
                        {"Unit", usd}};
        cell.value = AspectValue(Decimal(values[c]));
        out.push_back(std::move(cell));
      }
    }
  }
  return out;
}

CellGas build_gas(const Spec& spec) {
  StoreConfig config;
  config.range_indexed = {"Period"};
  config.dimension_types["Period"] = ValueKind::Date;
  config.result_cap = std::max<std::size_t>(config.result_cap, spec.cells);
  auto gas = CellGas::in_memory(config);
  const auto cells = synthetic_cells(spec);
  constexpr std::size_t kBatch = 50'000;
  for (std::size_t i = 0; i < cells.size(); i += kBatch) {
    const std::size_t n = std::min(kBatch, cells.size() - i);
    gas.ingest(std::span<const Cell>(cells.data() + i, n), "synthetic");
  }
  return gas;
}

Hypercube point_cube(const Spec& spec, std::mt19937_64& rng) {
  const std::size_t e = pick_entity(spec, rng);
  const std::size_t p = rng() % spec.periods;
  std::size_t c = rng() % spec.concepts;
  if (omitted(e, c, p)) c = 1 % spec.concepts;
  return Hypercube({enum_dim("Concept", {AspectValue(stored_concept(c))}),
                    enum_dim("Period", {AspectValue(period_date(p))}),
                    enum_dim("Entity", {AspectValue(entity_name(e))}),
                    enum_dim("Unit", {AspectValue("USD")})});
}

Hypercube hundred_cube(const Spec& spec, std::mt19937_64& rng) {
  const std::size_t e = pick_entity(spec, rng);
  std::size_t p = rng() % spec.periods;
  if (p % 6 == e % 6) p = (p + 1) % spec.periods;
  return Hypercube({{"Concept", AnyValue{}, std::nullopt},
                    enum_dim("Period", {AspectValue(period_date(p))}),
                    enum_dim("Entity", {AspectValue(entity_name(e))}),
                    enum_dim("Unit", {AspectValue("USD")})});
}

Hypercube row_cube(const Spec& spec, std::size_t entity) {
  Interval periods{AspectValue(period_date(0)), AspectValue(period_date(std::min<std::size_t>(30, spec.periods) - 1)),
                   false, false};
  return Hypercube({enum_dim("Concept", {AspectValue(concept_name(1))}),
                    {"Period", periods, std::nullopt},
                    enum_dim("Entity", {AspectValue(entity_name(entity))}),
                    enum_dim("Unit", {AspectValue("USD")})});
}

Hypercube two_dimension_cube(const Spec& spec, std::size_t entity) {
  Interval periods{AspectValue(period_date(0)), AspectValue(period_date(std::min<std::size_t>(31, spec.periods) - 1)),
                   false, false};
  std::vector<AspectValue> concepts;
  for (std::size_t c = 1; c <= 4; ++c) concepts.emplace_back(concept_name(c < 3 ? c : c + 1));
  return Hypercube({enum_dim("Concept", concepts),
                    {"Period", periods, std::nullopt},
                    enum_dim("Entity", {AspectValue(entity_name(entity))}),
                    enum_dim("Unit", {AspectValue("USD")})});
}

Map pipeline_map() { return Map("synthetic-synonyms", {{"Concept", AspectValue("C006"), {AspectValue("X006")}}}); }

Component pipeline_component(std::size_t entity) {
  Json concepts = Json::array();
  for (std::size_t c = 0; c < 8; ++c) concepts.push_back(concept_name(c));
  Json periods = Json::array();
  for (std::size_t p = 0; p < 12; ++p) periods.push_back(period_date(p).to_string());
  auto rollup = [](const char* id, const char* mode, std::size_t total) {
    return Json{{"id", id},
                {"kind", "rollup"},
                {"mode", mode},
                {"tolerance", 0},
                {"hierarchy",
                 {{"dimension", "Concept"},
                  {"nodes",
                   Json::array({{{"value", concept_name(total)},
                                 {"children", Json::array({{{"value", concept_name(total + 1)}, {"weight", 1}},
                                                           {{"value", concept_name(total + 2)}, {"weight", 1}}})}}})}}}};
  };
  Json doc{{"id", "synthetic-" + entity_name(entity)},
           {"labels", {{"en", "Synthetic component " + entity_name(entity)}}},
           {"hypercube",
            {{"dimensions",
              {{"Concept", {{"kind", "enum"}, {"values", concepts}}},
               {"Period", {{"kind", "enum"}, {"type", "date"}, {"values", periods}}},
               {"Entity", {{"kind", "enum"}, {"values", Json::array({entity_name(entity)})}}},
               {"Unit", {{"kind", "enum"}, {"values", Json::array({"USD"})}}}}}}},
           {"map", "synthetic-synonyms"},
           {"rules", Json::array({rollup("fill-c000", "impute", 0), rollup("check-c003", "validate", 3)})},
           {"spreadsheet",
            {{"name", "Synthetic " + entity_name(entity)},
             {"slicers", {{"Entity", entity_name(entity)}, {"Unit", "USD"}}},
             {"rows", Json::array({"Concept"})},
             {"columns", Json::array({"Period"})}}}};
  return Component::from_json(doc);
}

Timing time_runs(std::size_t runs, const std::function<void()>& fn) {
  std::vector<double> ms;
  ms.reserve(runs);
  for (std::size_t i = 0; i < runs; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  Timing t;
  t.runs = runs;
  if (ms.empty()) return t;
  t.min_ms = ms.front();
  t.max_ms = ms.back();
  t.median_ms = runs % 2 ? ms[runs / 2] : (ms[runs / 2 - 1] + ms[runs / 2]) / 2;
  return t;
}

std::vector<ShapeRow> shape_table(const CellGas& gas, const Spec& spec, std::size_t runs) {
  std::vector<ShapeRow> out;
  std::mt19937_64 rng(spec.seed + 1);
  const std::size_t entity = rng() % entity_count(spec);
  auto add = [&](std::string name, const std::function<std::size_t()>& fn) {
    ShapeRow row{std::move(name), fn(), {}};
    row.timing = time_runs(runs, [&] { (void)fn(); });
    out.push_back(std::move(row));
  };
  const auto point = point_cube(spec, rng);
  add("Point", [&] { return evaluate(point, gas).size(); });
  const auto row = row_cube(spec, entity);
  add("Row", [&] { return evaluate(row, gas).size(); });
  const auto two = two_dimension_cube(spec, entity);
  add("Two dimensions", [&] { return evaluate(two, gas).size(); });

  auto catalog = Catalog::in_memory();
  catalog.put_map(pipeline_map());
  const auto component = pipeline_component(entity);
  catalog.put(component);
  add("Component raw", [&] { return evaluate(component.hypercube, gas).size(); });
  add("Component with map + rules", [&] {
    const auto snapshot = gas.snapshot();
    MapQueryOptions mo;
    auto cells = evaluate(component.hypercube, pipeline_map(), snapshot, mo);
    RunOptions ro;
    ro.computed_at = snapshot.sequence();
    return run_rules(component.rules, cells, ro).cells.size();
  });
  add("Spreadsheet", [&] { return run_component(component, catalog, gas.snapshot()).grid.populated(); });
  return out;
}

}  // namespace cellstore::workload
