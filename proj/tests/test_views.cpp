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

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cellstore/error.hpp"
#include "cellstore/facts.hpp"
#include "cellstore/views.hpp"

using namespace cellstore;

namespace {

Json load(const std::string& name) {
  std::ifstream in(std::string(CELLSTORE_TEST_DATA) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

struct Sample {
  CellGas gas = CellGas::in_memory(StoreConfig::from_json(load("balance_config.json")));
  Hypercube cube = Hypercube::from_json(load("balance_cube.json"));
  Sample() {
    std::ifstream in(std::string(CELLSTORE_TEST_DATA) + "/balance_facts.jsonl");
    import_facts(gas, in, "sample");
  }
  std::vector<Cell> cells() const { return evaluate(cube, gas); }
};

}  // namespace

TEST_CASE("auto layout of the sample") {
  Sample f;
  auto cells = f.cells();
  auto def = auto_layout(f.cube, cells);
  CHECK(def.rows == std::vector<std::string>{"Concept"});
  CHECK(def.columns == std::vector<std::string>{"Entity", "Region"});
  REQUIRE(def.slicers.size() == 2);
  CHECK(def.slicers[0].first == "Period");
  CHECK(def.slicers[1].first == "Unit");
  auto view = render(def, f.cube, cells);
  CHECK(view.row_caption == "Line items");
  REQUIRE(view.row_headers.size() == 3);
  CHECK(view.row_headers[0][0] == AspectValue("Assets"));
  REQUIRE(view.column_headers.size() == 6);
  // Enumeration order: Visto, Championcard, American Rapid; United States before [World].
  CHECK(view.column_headers[0] == std::vector<AspectValue>{"Visto", "United States"});
  CHECK(view.column_headers[1] == std::vector<AspectValue>{"Visto", "[World]"});
  CHECK(view.column_headers[5] == std::vector<AspectValue>{"American Rapid", "[World]"});
  CHECK(view.populated() == 18);
  const auto& world_visto_assets = *view.cells[0][1];
  CHECK(world_visto_assets.value == AspectValue(Decimal(4000000000)));
  CHECK(world_visto_assets.l_shape);
  CHECK_FALSE(view.cells[0][0]->l_shape);
  auto json = view.to_json();
  CHECK(json["cells"][0][1]["lShape"] == true);
  CHECK(json["rowHeaders"].size() == 3);
  CHECK(SpreadsheetDef::from_json(def.to_json()) == def);
}

TEST_CASE("aggregation and header order") {
  Sample f;
  auto cells = f.cells();
  SpreadsheetDef def;
  def.rows = {"Concept"};
  def.columns = {"Region"};
  auto view = render(def, f.cube, cells);
  REQUIRE(view.column_headers.size() == 2);
  CHECK(view.cells[0][0]->contributors == 3);
  CHECK(view.cells[0][0]->value == AspectValue(Decimal(14000000000)));  // US assets 3 + 6 + 5
  RenderOptions opts;
  opts.header_order["Concept"] = {"Liabilities", "Equity", "Assets"};
  auto reordered = render(def, f.cube, cells, opts);
  CHECK(reordered.row_headers[0][0] == AspectValue("Liabilities"));
  def.aggregator = Aggregator::Count;
  CHECK(render(def, f.cube, cells).cells[0][0]->value == AspectValue(Decimal(3)));
}

TEST_CASE("write back keeps an injected default implicit") {
  Sample f;
  auto cells = f.cells();
  auto def = auto_layout(f.cube, cells);
  auto c = plan_write_back(def, f.cube, cells, {{"Concept", "Assets"}, {"Entity", "Visto"}, {"Region", "[World]"}},
                           Decimal(4100000000));
  CHECK_FALSE(c.aspects.count("Region"));
  CHECK(c.aspects.at("Period") == AspectValue::date("2012-09-30"));
  f.gas.ingest(std::vector<Cell>{c}, "edit");
  auto updated = f.cells();
  CHECK(updated.size() == 18);
  auto view = render(def, f.cube, updated);
  CHECK(view.cells[0][1]->value == AspectValue(Decimal(4100000000)));

  auto us = plan_write_back(def, f.cube, cells, {{"Concept", "Assets"}, {"Entity", "Visto"}, {"Region", "United States"}},
                            Decimal(1));
  CHECK(us.aspects.at("Region") == AspectValue("United States"));

  auto code_of = [&](const Aspects& coords) {
    try {
      plan_write_back(def, f.cube, cells, coords, Decimal(1));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::BadRequest;
  };
  CHECK(code_of({{"Concept", "Assets"}}) == ErrorCode::IncompleteCoordinates);
  SpreadsheetDef coarse;
  coarse.rows = {"Concept"};
  coarse.columns = {"Region"};
  try {
    plan_write_back(coarse, f.cube, cells, {{"Concept", "Assets"}, {"Region", "United States"}, {"Entity", "Visto"},
                                            {"Unit", "USD"}, {"Period", AspectValue::date("2012-09-30")}}, Decimal(1));
  } catch (const Error&) {
    FAIL("fully specified slot should be writable");
  }
  SpreadsheetDef bad;
  bad.rows = {"Concept", "Concept"};
  CHECK_THROWS_AS(render(bad, f.cube, cells), Error);
  bad.rows = {"Nope"};
  CHECK_THROWS_AS(render(bad, f.cube, cells), Error);
}

TEST_CASE("ambiguous slot") {
  Sample f;
  auto cells = f.cells();
  auto cube = Hypercube::from_json(parse_json(R"({"dimensions":{"Concept":{"kind":"any"},"Entity":{"kind":"any"},
      "Period":{"kind":"any"},"Unit":{"kind":"any"},"Region":{"kind":"any","default":"[World]"}}})"));
  SpreadsheetDef def;
  def.rows = {"Concept"};
  def.columns = {"Entity"};
  def.slicers = {{"Period", AspectValue::date("2012-09-30")}, {"Unit", "USD"}};
  // Region unassigned falls back to its default, so the slot is unique.
  auto c = plan_write_back(def, cube, cells, {{"Concept", "Assets"}, {"Entity", "Visto"}}, Decimal(1));
  CHECK_FALSE(c.aspects.count("Region"));
  // Without the default, Region would be missing.
  std::vector<Cell> doubled = cells;
  Cell extra = cells.front();
  extra.injected.clear();
  doubled.push_back(extra);
  CHECK_THROWS_AS(plan_write_back(def, cube, doubled, {{"Concept", extra.aspects.at("Concept")}, {"Entity", extra.aspects.at("Entity")},
                                                       {"Region", extra.aspects.at("Region")}}, Decimal(1)),
                  Error);
}
