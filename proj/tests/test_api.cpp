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
#include <httplib.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "cellstore/api.hpp"

using namespace cellstore;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(CELLSTORE_TEST_DATA) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Running {
  CellGas gas;
  Catalog catalog = Catalog::in_memory();
  Server server;
  int port = -1;
  std::thread thread;
  httplib::Client client;

  explicit Running(StoreConfig cfg, ServiceOptions opts = {})
      : gas(CellGas::in_memory(std::move(cfg))),
        server(gas, catalog, opts),
        port(server.bind_any_port("127.0.0.1")),
        thread([this] { server.listen_after_bind(); }),
        client("127.0.0.1", port) {
    while (!server.running()) std::this_thread::yield();
  }
  ~Running() {
    server.stop();
    thread.join();
  }

  httplib::Result post(const std::string& path, const std::string& body, const char* type = "application/json") {
    return client.Post(path, body, type);
  }
  httplib::Result put(const std::string& path, const std::string& body) {
    return client.Put(path, body, "application/json");
  }
};

StoreConfig balance_config() { return StoreConfig::from_json(parse_json(slurp("balance_config.json"))); }

std::string query_body(const Json& extra = Json::object()) {
  Json doc{{"hypercube", parse_json(slurp("balance_cube.json"))}};
  for (auto it = extra.begin(); it != extra.end(); ++it) doc[it.key()] = it.value();
  return dump_json(doc);
}

}  // namespace

TEST_CASE("http ingest, query and pagination") {
  Running r(balance_config());
  REQUIRE(r.port > 0);
  auto health = r.client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);

  auto ingest = r.post("/cells", slurp("balance_facts.jsonl"), "application/x-ndjson");
  REQUIRE(ingest);
  CHECK(ingest->status == 200);
  CHECK(parse_json(ingest->body)["accepted"] == 18);

  auto full = r.post("/query", query_body());
  REQUIRE(full);
  REQUIRE(full->status == 200);
  auto all = parse_json(full->body);
  CHECK(all["total"] == 18);
  CHECK(all["cells"].size() == 18);
  CHECK(all["nextCursor"].is_null());

  Json collected = Json::array();
  Json cursor = nullptr;
  int pages = 0;
  do {
    auto res = r.post("/query", query_body(Json{{"limit", 5}, {"cursor", cursor}}));
    REQUIRE(res);
    REQUIRE(res->status == 200);
    auto page = parse_json(res->body);
    for (const auto& c : page["cells"]) collected.push_back(c);
    cursor = page["nextCursor"];
    ++pages;
  } while (!cursor.is_null() && pages < 10);
  CHECK(pages == 4);
  CHECK(collected == all["cells"]);

  auto csv = r.post("/query", query_body(Json{{"format", "relational-csv"}}));
  REQUIRE(csv);
  CHECK(csv->get_header_value("Content-Type") == "text/csv");
  CHECK(csv->body.rfind("Period,Entity,Unit,Region,Assets,Equity,Liabilities", 0) == 0);

  const std::string table =
      R"({"name":"orders","pkColumns":["Id"],"valueColumns":["Amount"],"rows":[{"key":["x"],"values":[1]}]})";
  auto prefixed = r.post("/relational?prefix=1", table);
  REQUIRE(prefixed);
  CHECK(prefixed->status == 200);
  CHECK(r.client.Get("/cells/" + canonical_key(Aspects{{"Concept", "Amount"}, {"orders.Id", "x"}}).to_hex())->status ==
        200);

  // Point lookup by hex key, with history.
  const std::string id = all["cells"][0]["aspects"]["Entity"];
  Aspects key = aspects_from_json(all["cells"][0]["aspects"]);
  auto point = r.client.Get("/cells/" + canonical_key(key).to_hex() + "?history=1");
  REQUIRE(point);
  CHECK(point->status == 200);
  CHECK(parse_json(point->body)["history"].size() == 1);
  CHECK(r.client.Get("/cells/" + canonical_key(Aspects{{"Concept", "Nope"}}).to_hex())->status == 404);
}

TEST_CASE("http error statuses") {
  StoreConfig cfg = balance_config();
  cfg.result_cap = 10;
  ServiceOptions opts;
  opts.max_body_bytes = 64 * 1024;
  Running r(cfg, opts);
  r.post("/cells", slurp("balance_facts.jsonl"));

  CHECK(r.post("/query", "{not json")->status == 400);
  CHECK(r.post("/query", R"({"hypercube":{"dimensions":{"Concept":{"kind":"enum","values":[]}}}})")->status == 422);
  CHECK(r.post("/query", query_body())->status == 413);
  CHECK(r.post("/query", query_body(Json{{"limit", 0}}))->status == 400);
  CHECK(r.post("/query", query_body(Json{{"cursor", "zz"}}))->status == 400);
  CHECK(r.post("/query", R"({"component":"missing"})")->status == 404);
  CHECK(r.post("/cells", std::string(70 * 1024, ' '))->status == 413);

  auto bad = r.post("/cells", R"({"Aspects":{"Entity":"x"},"Value":1})");
  REQUIRE(bad);
  CHECK(bad->status == 422);
  CHECK(parse_json(bad->body)["rejected"].size() == 1);

  auto component = parse_json(slurp("balance_component.json"));
  auto conflict = r.put("/components/balance-sheet", dump_json(component));
  REQUIRE(conflict);
  CHECK(conflict->status == 409);
  CHECK(parse_json(conflict->body)["error"]["code"] == "DanglingReference");
  CHECK(r.put("/components/other", dump_json(component))->status == 400);
}

TEST_CASE("http components, grid and write-back") {
  Running r(balance_config());
  r.post("/cells", slurp("balance_facts.jsonl"));
  CHECK(r.put("/maps/equity-synonyms", slurp("capital_map.json"))->status == 201);
  CHECK(r.put("/components/balance-sheet", slurp("balance_component.json"))->status == 201);
  CHECK(r.put("/components/balance-sheet", slurp("balance_component.json"))->status == 200);

  auto list = r.client.Get("/components?lang=de");
  REQUIRE(list);
  CHECK(parse_json(list->body)["components"][0]["label"] == "Bilanz");

  auto grid = r.client.Get("/components/balance-sheet/grid");
  REQUIRE(grid);
  REQUIRE(grid->status == 200);
  auto g = parse_json(grid->body);
  CHECK(g["grid"]["rowHeaders"].size() == 3);
  CHECK(g["grid"]["columnHeaders"].size() == 6);
  CHECK(g["grid"]["rowCaption"] == "Line items");
  CHECK(g["rules"]["checks"].size() == 6);

  auto hits = r.client.Get("/concepts?q=eigen&lang=de");
  REQUIRE(hits);
  CHECK(parse_json(hits->body)["hits"][0]["label"] == "Eigenkapital");

  // Overwrite Visto's United States equity through the grid.
  Json wb{{"coordinates", {{"Concept", "Equity"}, {"Entity", "Visto"}, {"Region", "United States"}}},
          {"value", 2500000000}};
  auto written = r.post("/components/balance-sheet/cells", dump_json(wb));
  REQUIRE(written);
  CHECK(written->status == 200);
  CHECK(parse_json(written->body)["report"]["collisions"] == 1);
  auto after = parse_json(r.client.Get("/components/balance-sheet/grid")->body);
  std::size_t failed = 0;
  for (const auto& c : after["rules"]["checks"]) failed += c["status"] == "fail" ? 1 : 0;
  CHECK(failed == 1);

  Json incomplete{{"coordinates", {{"Concept", "Equity"}}}, {"value", 1}};
  CHECK(r.post("/components/balance-sheet/cells", dump_json(incomplete))->status == 422);
  CHECK(r.client.Delete("/components/balance-sheet")->status == 204);
  CHECK(r.client.Get("/components/balance-sheet")->status == 404);
}
