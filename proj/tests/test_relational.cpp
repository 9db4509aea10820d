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
#include <set>
#include <sstream>

#include "cellstore/error.hpp"
#include "cellstore/facts.hpp"
#include "cellstore/relational.hpp"
#include "oracles.hpp"

using namespace cellstore;

namespace {

Json load(const std::string& name) {
  std::ifstream in(std::string(CELLSTORE_TEST_DATA) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

}  // namespace

TEST_CASE("the sample rows become the six-row balance table") {
  StoreConfig cfg = StoreConfig::from_json(load("balance_config.json"));
  auto gas = CellGas::in_memory(cfg);
  std::ifstream in(std::string(CELLSTORE_TEST_DATA) + "/balance_facts.jsonl");
  import_facts(gas, in, "sample");
  auto cube = Hypercube::from_json(load("balance_cube.json"));
  auto cells = evaluate(cube, gas);
  auto table = to_relational(materialize(cells, cube));
  CHECK(table.header() == std::vector<std::string>{"Period", "Entity", "Unit", "Region", "Assets", "Equity", "Liabilities"});
  REQUIRE(table.rows.size() == 6);
  for (const auto& r : table.rows) {
    for (const auto& v : r.values) REQUIRE(v);
    CHECK(r.values[0]->as_number() == r.values[1]->as_number() + r.values[2]->as_number());
  }
  // Byte order: "United States" sorts before "[World]".
  CHECK(table.rows[0].key[1] == AspectValue("American Rapid"));
  CHECK(table.rows[0].key[3] == AspectValue("United States"));
  CHECK(table.rows[1].key[3] == AspectValue("[World]"));
  CHECK(table.rows[1].values[0] == AspectValue(Decimal(9000000000)));

  auto back = from_relational(table);
  REQUIRE(back.size() == cells.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].aspects == cells[i].aspects);
    CHECK(back[i].value == cells[i].value);
  }
  auto csv_table = RelationalTable::from_csv(table.to_csv(), table.descriptor());
  CHECK(csv_table.header() == std::vector<std::string>{"Period", "Entity", "Unit", "Region", "Assets", "Equity", "Liabilities"});
  CHECK(csv_table == table);
}

TEST_CASE("randomized tables with nulls round trip") {
  std::mt19937_64 rng(500);
  int compared = 0;
  for (int i = 0; i < 500; ++i) {
    auto table = oracle::random_table(rng);
    auto cells = from_relational(table);
    RelationalOptions opts;
    opts.pk_order = table.pk_columns;
    opts.name = table.name;
    auto again = to_relational(cells, opts);
    REQUIRE(again == table);
    CHECK(from_relational(again) == cells);
    CHECK(RelationalTable::from_csv(table.to_csv(), table.descriptor()) == table);
    CHECK(RelationalTable::from_json(table.to_json()) == table);
    ++compared;
  }
  CHECK(compared == 500);
}

TEST_CASE("relational errors") {
  auto code_of = [](const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::BadRequest;
  };
  std::vector<Cell> dup(2);
  dup[0].aspects = {{"Concept", "A"}, {"E", "x"}};
  dup[0].value = Decimal(1);
  dup[1] = dup[0];
  CHECK(code_of([&] { to_relational(dup); }) == ErrorCode::DuplicateCellInGroup);
  Json desc = parse_json(R"({"name":"t","pkColumns":["E"]})");
  CHECK(code_of([&] { RelationalTable::from_csv("E,A\nx,1\nx,2\n", desc); }) == ErrorCode::DuplicatePrimaryKey);
  CHECK(code_of([&] { RelationalTable::from_csv("E,A\nx,1,3\n", desc); }) == ErrorCode::BadTable);
  CHECK(code_of([&] { RelationalTable::from_csv("F,A\nx,1\n", desc); }) == ErrorCode::BadTable);
  CHECK(code_of([&] { RelationalTable::from_csv("E,A\nx,abc\n", desc); }) == ErrorCode::BadCanonicalForm);
}

TEST_CASE("table prefixes keep shared key columns apart") {
  Json desc_a = parse_json(R"({"name":"orders","pkColumns":["Id"]})");
  Json desc_b = parse_json(R"({"name":"refunds","pkColumns":["Id"]})");
  auto a = RelationalTable::from_csv("Id,Amount\nx,1\ny,2\n", desc_a);
  auto b = RelationalTable::from_csv("Id,Amount\nx,5\n", desc_b);

  // Unprefixed, the two tables produce the same key for Id=x.
  CHECK(from_relational(a)[0].key() == from_relational(b)[0].key());

  RelationalOptions prefixed;
  prefixed.prefix_dimensions = true;
  auto cells_a = from_relational(a, prefixed);
  auto cells_b = from_relational(b, prefixed);
  REQUIRE(cells_a.size() == 2);
  REQUIRE(cells_b.size() == 1);
  CHECK(cells_a[0].aspects.count("orders.Id") == 1);
  CHECK(cells_b[0].aspects.count("refunds.Id") == 1);
  CHECK(cells_a[0].key() != cells_b[0].key());

  prefixed.name = "orders";
  CHECK(to_relational(cells_a, prefixed) == a);
  prefixed.name = "refunds";
  CHECK(to_relational(cells_b, prefixed) == b);
  CHECK_THROWS_AS(to_relational(cells_a, prefixed), Error);
  prefixed.name.clear();
  CHECK_THROWS_AS(to_relational(cells_a, prefixed), Error);
}
