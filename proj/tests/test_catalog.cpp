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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cellstore/catalog.hpp"
#include "cellstore/error.hpp"
#include "cellstore/facts.hpp"

using namespace cellstore;
namespace fs = std::filesystem;

namespace {

Json load(const std::string& name) {
  std::ifstream in(std::string(CELLSTORE_TEST_DATA) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

fs::path temp_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("cellstore_catalog_" + tag + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  return p;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Linear scan over every concept of every component.
std::vector<ConceptHit> search_oracle(const std::vector<Component>& components, const std::string& query,
                                      const std::string& language, std::size_t limit) {
  const auto q = lower(query);
  std::vector<ConceptHit> hits;
  for (const auto& c : components) {
    for (const auto& info : c.concepts) {
      bool match = lower(info.name.canonical()).find(q) != std::string::npos;
      for (const auto& [lang, label] : info.labels) match = match || lower(label).find(q) != std::string::npos;
      if (!match) continue;
      std::string label = info.name.canonical();
      if (auto it = info.labels.find(language); it != info.labels.end()) {
        label = it->second;
      } else if (auto en = info.labels.find("en"); en != info.labels.end()) {
        label = en->second;
      }
      hits.push_back({c.id, info.name, label});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const ConceptHit& a, const ConceptHit& b) {
    if (a.concept_name != b.concept_name) return KindThenValueLess{}(a.concept_name, b.concept_name);
    return a.component < b.component;
  });
  if (hits.size() > limit) hits.resize(limit);
  return hits;
}

}  // namespace

TEST_CASE("component json round trip") {
  auto c = Component::from_json(load("balance_component.json"));
  CHECK(c.id == "balance-sheet");
  CHECK(c.label() == "Balance sheet");
  CHECK(c.label("de") == "Bilanz");
  CHECK(c.label("fr") == "Balance sheet");
  REQUIRE(c.rules.size() == 1);
  REQUIRE(c.concepts.size() == 3);
  auto again = Component::from_json(c.to_json());
  CHECK(again.to_json() == c.to_json());
  CHECK(again.concepts == c.concepts);
}

TEST_CASE("component validation") {
  auto doc = load("balance_component.json");
  SUBCASE("bad id") {
    doc["id"] = "../escape";
    CHECK_THROWS_AS(Component::from_json(doc), Error);
  }
  SUBCASE("unknown member") {
    doc["extra"] = 1;
    CHECK_THROWS_AS(Component::from_json(doc), Error);
  }
  SUBCASE("bad rule wraps as BadComponent") {
    doc["rules"][0].erase("hierarchy");
    try {
      (void)Component::from_json(doc);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadComponent);
    }
  }
  SUBCASE("concepts default to the Concept enumeration") {
    doc.erase("concepts");
    auto c = Component::from_json(doc);
    REQUIRE(c.concepts.size() == 3);
    CHECK(c.concepts[1].name == AspectValue("Equity"));
  }
}

TEST_CASE("catalog rejects dangling map references") {
  auto cat = Catalog::in_memory();
  auto c = Component::from_json(load("balance_component.json"));
  try {
    cat.put(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DanglingReference);
  }
  cat.put_map(Map::from_json(load("capital_map.json")));
  cat.put(c);
  CHECK(cat.get("balance-sheet").has_value());
  CHECK_FALSE(cat.get("nope").has_value());
}

TEST_CASE("catalog persists across reopen") {
  auto dir = temp_dir("persist");
  {
    auto cat = Catalog::open(dir);
    cat.put_map(Map::from_json(load("capital_map.json")));
    cat.put(Component::from_json(load("balance_component.json")));
    auto other = Component::from_json(load("balance_component.json"));
    other.id = "second";
    other.map_id.reset();
    cat.put(other);
    CHECK(cat.remove("second"));
    CHECK_FALSE(cat.remove("second"));
  }
  auto cat = Catalog::open(dir);
  auto listed = cat.list("de");
  REQUIRE(listed.size() == 1);
  CHECK(listed[0].id == "balance-sheet");
  CHECK(listed[0].label == "Bilanz");
  CHECK(listed[0].dimensions == 5);
  CHECK(listed[0].rules == 1);
  CHECK(cat.map_ids() == std::vector<std::string>{"equity-synonyms"});
  CHECK(fs::exists(dir / "index.json"));
  auto hits = cat.search_concepts("eigen", "de");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].label == "Eigenkapital");
  fs::remove_all(dir);
}

TEST_CASE("concept search matches the linear scan") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> words{"Assets", "Equity", "Liabilities", "Revenue", "Cash", "Goodwill",
                                       "Inventory", "Payables", "Receivables", "NetIncome", "Capital"};
  auto cat = Catalog::in_memory();
  std::vector<Component> components;
  auto base = Component::from_json(load("balance_component.json"));
  base.map_id.reset();
  for (int i = 0; i < 40; ++i) {
    Component c = base;
    c.id = "c" + std::to_string(i);
    c.concepts.clear();
    std::vector<std::string> pool = words;
    std::shuffle(pool.begin(), pool.end(), rng);
    const auto n = 1 + rng() % 5;
    for (std::size_t k = 0; k < n; ++k) {
      ConceptInfo info{AspectValue(pool[k]), {}};
      if (rng() % 2) info.labels["en"] = "Total " + pool[k];
      if (rng() % 2) info.labels["de"] = pool[k] + " gesamt";
      c.concepts.push_back(info);
    }
    cat.put(c);
    components.push_back(c);
  }
  // Overwrite and remove to exercise index maintenance.
  for (int i = 0; i < 10; ++i) {
    auto idx = rng() % components.size();
    if (i % 2) {
      cat.remove(components[idx].id);
      components.erase(components.begin() + static_cast<std::ptrdiff_t>(idx));
    } else {
      components[idx].concepts.pop_back();
      cat.put(components[idx]);
    }
  }
  std::sort(components.begin(), components.end(), [](auto& a, auto& b) { return a.id < b.id; });
  std::vector<std::string> queries{"a", "as", "ass", "ASSETS", "total", "gesamt", "tal li", "zzz", "", "ital",
                                   "nvent", "es"};
  for (const auto& w : words) queries.push_back(w.substr(1, 3 + rng() % 3));
  for (const auto& q : queries) {
    for (const char* lang : {"en", "de", "fr"}) {
      CAPTURE(q);
      CHECK(cat.search_concepts(q, lang, 1000) == search_oracle(components, q, lang, 1000));
      CHECK(cat.search_concepts(q, lang, 3) == search_oracle(components, q, lang, 3));
    }
  }
}

TEST_CASE("run_component on the sample") {
  auto gas = CellGas::in_memory(StoreConfig::from_json(load("balance_config.json")));
  {
    std::ifstream in(std::string(CELLSTORE_TEST_DATA) + "/balance_facts.jsonl");
    import_facts(gas, in, "sample");
  }
  auto cat = Catalog::in_memory();
  cat.put_map(Map::from_json(load("capital_map.json")));
  auto comp = Component::from_json(load("balance_component.json"));
  cat.put(comp);
  auto run = run_component(comp, cat, gas.snapshot());
  CHECK(run.cells.size() == 18);
  REQUIRE(run.rules.checks.size() == 6);
  for (const auto& check : run.rules.checks) CHECK(check.status == CheckStatus::Pass);
  CHECK(run.grid.name == "Balance sheet");
  CHECK(run.grid.populated() == 18);
  REQUIRE(run.grid.row_headers.size() == 3);
  CHECK(run.grid.row_headers[0][0] == AspectValue("Assets"));
  CHECK(run.grid.row_headers[1][0] == AspectValue("Equity"));
  CHECK(run.grid.row_headers[2][0] == AspectValue("Liabilities"));
  const auto& assets = *run.grid.cells[0][0];
  REQUIRE(assets.check.has_value());
  CHECK(*assets.check == CheckStatus::Pass);

  SUBCASE("missing map at run time") {
    auto other = Catalog::in_memory();
    CHECK_THROWS_AS(run_component(comp, other, gas.snapshot()), Error);
  }
}
