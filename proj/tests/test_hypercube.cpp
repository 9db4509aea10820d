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
#include <random>
#include <sstream>

#include "cellstore/error.hpp"
#include "cellstore/facts.hpp"
#include "cellstore/hypercube.hpp"
#include "oracles.hpp"

using namespace cellstore;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(CELLSTORE_TEST_DATA) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CellGas sample_gas() {
  auto gas = CellGas::in_memory(StoreConfig::from_json(parse_json(slurp("balance_config.json"))));
  std::istringstream in(slurp("balance_facts.jsonl"));
  auto r = import_facts(gas, in, "sample");
  REQUIRE(r.accepted == 18);
  return gas;
}

}  // namespace

TEST_CASE("hypercube json round trip and validation") {
  auto cube = Hypercube::from_json(parse_json(slurp("balance_cube.json")));
  CHECK(cube.dimension_names() == std::vector<std::string>{"Concept", "Period", "Entity", "Unit", "Region"});
  CHECK(Hypercube::from_json(cube.to_json()) == cube);
  CHECK(*estimate_cardinality(cube) == 18);

  auto code_of = [](const char* text) {
    try {
      Hypercube::from_json(parse_json(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::BadRequest;
  };
  CHECK(code_of(R"({"dimensions":{"Entity":{"kind":"any"}}})") == ErrorCode::MissingConceptDimension);
  CHECK(code_of(R"({"dimensions":{"Concept":{"kind":"enum","values":[]}}})") == ErrorCode::EmptyEnumeration);
  CHECK(code_of(R"({"dimensions":{"Concept":{"kind":"enum","values":["A"],"default":"B"}}})") ==
        ErrorCode::DefaultOutsideRange);
  CHECK(code_of(R"({"dimensions":{"Concept":{"kind":"any"},"P":{"kind":"interval","low":5,"high":1}}})") ==
        ErrorCode::BadInterval);
  CHECK(code_of(R"({"dimensions":{"Concept":{"kind":"any"},"P":{"kind":"interval","low":5,"high":"x"}}})") ==
        ErrorCode::BadInterval);
}

TEST_CASE("sample hypercube yields the eighteen rows") {
  auto gas = sample_gas();
  auto cube = Hypercube::from_json(parse_json(slurp("balance_cube.json")));
  auto cells = evaluate(cube, gas);
  REQUIRE(cells.size() == 18);
  auto table = materialize(cells, cube);
  CHECK(table.columns == std::vector<std::string>{"Concept", "Period", "Entity", "Unit", "Region", "Value"});
  int injected = 0;
  for (const auto& c : cells) {
    CHECK(c.aspects.size() == 5);
    if (!c.injected.empty()) {
      ++injected;
      CHECK(c.aspects.at("Region") == AspectValue("[World]"));
    }
  }
  CHECK(injected == 9);
  auto snapshot = gas.snapshot();
  CHECK(cells == oracle::evaluate(cube, snapshot.live_cells()));
  CHECK(MaterializedTable::from_json(table.to_json()).to_cells() == table.to_cells());
}

TEST_CASE("a region free cell needs a region default") {
  auto gas = sample_gas();
  auto doc = parse_json(slurp("balance_cube.json"));
  doc["dimensions"]["Region"].erase("default");
  auto cube = Hypercube::from_json(doc);
  auto cells = evaluate(cube, gas);
  CHECK(cells.size() == 9);
  for (const auto& c : cells) CHECK(c.aspects.at("Region") == AspectValue("United States"));
}

TEST_CASE("result cap") {
  auto gas = sample_gas();
  auto cube = Hypercube::from_json(parse_json(slurp("balance_cube.json")));
  QueryOptions opts;
  opts.result_cap = 17;
  CHECK_THROWS_AS(evaluate(cube, gas, opts), Error);
}

TEST_CASE("index evaluation equals brute force on random gases") {
  std::mt19937_64 rng(2024);
  oracle::RandomGas gen;
  StoreConfig cfg;
  cfg.range_indexed = {"Period"};
  auto gas = CellGas::in_memory(cfg);
  auto cells = gen.cells(rng, 10000);
  gas.ingest(cells, "random");
  const auto live = gas.snapshot().live_cells();
  for (int q = 0; q < 200; ++q) {
    auto cube = gen.cube(rng);
    auto expected = oracle::evaluate(cube, live);
    for (auto mode : {kernels::ExecMode::Serial, kernels::ExecMode::Parallel}) {
      QueryOptions opts;
      opts.mode = mode;
      auto got = evaluate(cube, gas, opts);
      REQUIRE(got.size() == expected.size());
      CHECK(got == expected);
    }
  }
}

TEST_CASE("small enumerated cubes resolve by key and equal brute force") {
  std::mt19937_64 rng(77);
  oracle::RandomGas gen;
  gen.values_per_dim = 3;
  gen.concepts = 4;
  auto gas = CellGas::in_memory();
  auto cells = gen.cells(rng, 10000);
  // Superseded versions must not leak through key lookups.
  auto again = gen.cells(rng, 2000);
  gas.ingest(cells, "random");
  gas.ingest(again, "random");
  const auto live = gas.snapshot().live_cells();
  std::size_t nonempty = 0;
  for (int q = 0; q < 300; ++q) {
    auto cube = gen.cube(rng);
    std::vector<HypercubeDimension> dims = cube.dimensions();
    for (auto& d : dims) {
      if (d.name == "Period") {
        d.range = Enumeration{{AspectValue(Date::from_days(15000 + static_cast<int>(rng() % 41)))}};
      } else if (std::holds_alternative<AnyValue>(d.range) || std::holds_alternative<Interval>(d.range)) {
        const std::string prefix = d.name == "Concept" ? "C" : d.name.substr(0, 1);
        d.range = Enumeration{{AspectValue(prefix + "0"), AspectValue(prefix + "1")}};
      }
      if (d.default_value && !range_contains(d.range, *d.default_value)) d.default_value.reset();
    }
    Hypercube small(dims);
    auto expected = oracle::evaluate(small, live);
    nonempty += expected.empty() ? 0 : 1;
    CHECK(evaluate(small, gas) == expected);
  }
  CHECK(nonempty > 100);
}

TEST_CASE("match_cell") {
  auto cube = Hypercube::from_json(parse_json(slurp("balance_cube.json")));
  Cell c;
  c.aspects = {{"Concept", "Assets"}, {"Period", AspectValue::date("2012-09-30")}, {"Entity", "Visto"}, {"Unit", "USD"}};
  c.value = Decimal(4000000000);
  auto m = match_cell(cube, c);
  REQUIRE(m);
  CHECK(m->aspects.at("Region") == AspectValue("[World]"));
  CHECK(m->injected == std::vector<std::string>{"Region"});
  c.aspects.emplace("Segment", "x");
  CHECK_FALSE(match_cell(cube, c));
}
