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
#include <numeric>
#include <random>
#include <sstream>

#include "cellstore/error.hpp"
#include "cellstore/facts.hpp"
#include "cellstore/maps.hpp"
#include "oracles.hpp"

using namespace cellstore;

namespace {

Json load(const std::string& name) {
  std::ifstream in(std::string(CELLSTORE_TEST_DATA) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

void strip_flags(std::vector<Cell>& cells) {
  for (auto& c : cells) c.key_collision = false;
}

}  // namespace

TEST_CASE("a Capital cell answers an Equity query") {
  StoreConfig cfg;
  cfg.dimension_types["Period"] = ValueKind::Date;
  auto gas = CellGas::in_memory(cfg);
  std::istringstream in(
      R"({"Aspects":{"Concept":"Capital","Period":"2012-09-30","Entity":"Newco","Unit":"USD"},"Value":7000000})"
      "\n"
      R"({"Aspects":{"Concept":"Assets","Period":"2012-09-30","Entity":"Newco","Unit":"USD"},"Value":9000000})"
      "\n");
  REQUIRE(import_facts(gas, in, "fixture").accepted == 2);
  auto map = Map::from_json(load("capital_map.json"));
  auto cube = Hypercube::from_json(parse_json(R"({"dimensions":{
      "Concept":{"kind":"enum","values":["Equity"]},
      "Period":{"kind":"enum","type":"date","values":["2012-09-30"]},
      "Entity":{"kind":"any"},"Unit":{"kind":"any"}}})"));
  auto snapshot = gas.snapshot();
  CHECK(evaluate(cube, snapshot).empty());
  auto cells = evaluate(cube, map, snapshot);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].aspects.at("Concept") == AspectValue("Equity"));
  CHECK(cells[0].value == AspectValue(Decimal(7000000)));
  CHECK(cells == oracle::rewrite_then_filter(cube, map, snapshot.live_cells()));
}

TEST_CASE("ambiguous maps are rejected") {
  auto code_of = [](const char* text) {
    try {
      Map::from_json(parse_json(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::BadRequest;
  };
  CHECK(code_of(R"({"entries":[{"dimension":"Concept","canonical":"Equity","synonyms":["Capital"]},
                               {"dimension":"Concept","canonical":"Capital","synonyms":["Cap"]}]})") == ErrorCode::AmbiguousMap);
  CHECK(code_of(R"({"entries":[{"dimension":"Concept","canonical":"Equity","synonyms":["Capital"]},
                               {"dimension":"Concept","canonical":"Assets","synonyms":["Capital"]}]})") == ErrorCode::AmbiguousMap);
  // The same value may be a synonym on one dimension and canonical on another.
  CHECK(code_of(R"({"entries":[{"dimension":"Concept","canonical":"Equity","synonyms":["X"]},
                               {"dimension":"Entity","canonical":"X","synonyms":["Y"]}]})") == ErrorCode::BadRequest);
  auto map = Map::from_json(parse_json(R"({"entries":[{"dimension":"Region","canonical":"World","synonyms":["[World]"]}]})"));
  auto cube = Hypercube::from_json(parse_json(
      R"({"dimensions":{"Concept":{"kind":"any"},"Region":{"kind":"enum","values":["World","[World]"],"default":"[World]"}}})"));
  CHECK_THROWS_AS(map.widen(cube), Error);
}

TEST_CASE("collisions after rewrite are flagged or rejected") {
  auto gas = CellGas::in_memory();
  std::vector<Cell> cells(2);
  cells[0].aspects = {{"Concept", "Capital"}, {"Entity", "A"}};
  cells[0].value = Decimal(1);
  cells[1].aspects = {{"Concept", "Equity"}, {"Entity", "A"}};
  cells[1].value = Decimal(2);
  gas.ingest(cells, "t");
  auto map = Map::from_json(load("capital_map.json"));
  auto cube = Hypercube::from_json(parse_json(R"({"dimensions":{"Concept":{"kind":"enum","values":["Equity"]},"Entity":{"kind":"any"}}})"));
  auto snapshot = gas.snapshot();
  auto got = evaluate(cube, map, snapshot);
  REQUIRE(got.size() == 2);
  CHECK(got[0].key_collision);
  CHECK(got[1].key_collision);
  MapQueryOptions strict;
  strict.collisions = CollisionPolicy::Error;
  CHECK_THROWS_AS(evaluate(cube, map, snapshot, strict), Error);
}

TEST_CASE("map evaluation equals rewrite-then-filter on random gases") {
  std::mt19937_64 rng(99);
  oracle::RandomGas gen;
  auto gas = CellGas::in_memory();
  gas.ingest(gen.cells(rng, 5000), "random");
  auto snapshot = gas.snapshot();
  const auto live = snapshot.live_cells();
  for (int round = 0; round < 50; ++round) {
    // Random synonym groups on Concept and Entity with disjoint roles.
    std::vector<Map::Entry> entries;
    std::vector<int> perm(static_cast<std::size_t>(gen.concepts));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    entries.push_back({"Concept", AspectValue("C" + std::to_string(perm[0])),
                       {AspectValue("C" + std::to_string(perm[1])), AspectValue("C" + std::to_string(perm[2]))}});
    entries.push_back({"Concept", AspectValue("C" + std::to_string(perm[3])), {AspectValue("C" + std::to_string(perm[4]))}});
    entries.push_back({"Entity", AspectValue("E" + std::to_string(rng() % 6)), {AspectValue("E" + std::to_string(6 + rng() % 6))}});
    Map map("random", entries);
    Hypercube cube;
    try {
      cube = gen.cube(rng);
      (void)map.widen(cube);
    } catch (const Error&) {
      continue;  // default landed on a synonym
    }
    auto got = evaluate(cube, map, snapshot);
    strip_flags(got);
    CHECK(got == oracle::rewrite_then_filter(cube, map, live));
  }
}
