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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Scale checks build 10^4, 10^5 and 10^6 cell synthetic gases.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "cellstore/catalog.hpp"
#include "cellstore/facts.hpp"
#include "cellstore/relational.hpp"
#include "oracles.hpp"
#include "workload.hpp"

using namespace cellstore;
namespace wl = cellstore::workload;

namespace {

std::string data_dir = CELLSTORE_TEST_DATA;

Json load(const std::string& name) {
  std::ifstream in(data_dir + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] AC%d %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Exceptions count as failures of the criterion being checked.
void check(int id, const std::string& what, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [ok, detail] = body();
    report(id, ok, what, detail);
  } catch (const std::exception& e) {
    report(id, false, what, std::string("exception: ") + e.what());
  }
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct Sample {
  CellGas gas = CellGas::in_memory(StoreConfig::from_json(load("balance_config.json")));
  Hypercube cube = Hypercube::from_json(load("balance_cube.json"));
  IngestReport ingest;
  Sample() {
    std::ifstream in(data_dir + "/balance_facts.jsonl");
    ingest = import_facts(gas, in, "sample");
  }
};

bool sound_cells_equal(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].aspects != b[i].aspects || !(a[i].value == b[i].value) || a[i].injected != b[i].injected) return false;
  }
  return true;
}

void sample_criteria() {
  check(1, "sample ingest and default-value hypercube", [] {
    const auto t0 = std::chrono::steady_clock::now();
    Sample f;
    auto cells = evaluate(f.cube, f.gas);
    const double ms = ms_since(t0);
    const bool ok = f.ingest.accepted == 18 && cells.size() == 18 && ms < 1000;
    return std::pair{ok, std::to_string(f.ingest.accepted) + " ingested, " + std::to_string(cells.size()) +
                             " rows" + fmt(" in %.2f ms (limit 1000 ms)", ms)};
  });

  check(2, "Region default injection and exclusion", [] {
    Sample f;
    Aspects key{{"Concept", "Assets"}, {"Entity", "Visto"}, {"Period", AspectValue::date("2012-09-30")}, {"Unit", "USD"}};
    auto stored = f.gas.point_query(key);
    if (!stored || !(stored->value == AspectValue(Decimal(4000000000)))) return std::pair{false, std::string("4e9 cell missing")};
    auto cells = evaluate(f.cube, f.gas);
    Aspects injected_key = key;
    injected_key.emplace("Region", "[World]");
    auto it = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) { return c.aspects == injected_key; });
    const bool injected = it != cells.end() && it->value == stored->value &&
                          it->injected == std::vector<std::string>{"Region"};
    // Region-bearing cubes without a default: the cell must never appear.
    auto doc = load("balance_cube.json");
    doc["dimensions"]["Region"].erase("default");
    std::vector<Json> variants{doc["dimensions"]["Region"], Json{{"kind", "any"}},
                               Json{{"kind", "enum"}, {"values", {"[World]"}}},
                               Json{{"kind", "interval"}, {"low", "A"}, {"high", "z"}}};
    std::size_t rows_without_default = 0;
    bool excluded = true;
    for (std::size_t v = 0; v < variants.size(); ++v) {
      doc["dimensions"]["Region"] = variants[v];
      auto got = evaluate(Hypercube::from_json(doc), f.gas);
      if (v == 0) rows_without_default = got.size();
      for (const auto& c : got) {
        excluded = excluded && !(c.ingested_at == stored->ingested_at);
        excluded = excluded && c.aspects.count("Region") && c.injected.empty();
      }
    }
    excluded = excluded && rows_without_default == 9;
    return std::pair{injected && excluded, std::string(injected ? "Region [World] injected" : "not injected") +
                                               "; no-default cube returns " + std::to_string(rows_without_default) +
                                               " rows, " + (excluded ? "cell excluded from 4 no-default cubes" : "cell present")};
  });

  check(3, "relational round trip", [] {
    Sample f;
    auto cells = evaluate(f.cube, f.gas);
    auto table = to_relational(materialize(cells, f.cube));
    const std::vector<std::string> header{"Period", "Entity", "Unit", "Region", "Assets", "Equity", "Liabilities"};
    bool ok = table.header() == header && table.rows.size() == 6;
    for (const auto& r : table.rows) {
      ok = ok && std::all_of(r.values.begin(), r.values.end(), [](const auto& v) { return v.has_value(); });
    }
    // Injection is not recorded in a table; compare keys and values.
    auto back = from_relational(table);
    ok = ok && back.size() == cells.size();
    for (std::size_t i = 0; ok && i < back.size(); ++i) {
      ok = back[i].aspects == cells[i].aspects && back[i].value == cells[i].value;
    }
    std::mt19937_64 rng(500);
    int passed = 0;
    for (int i = 0; i < 500; ++i) {
      auto t = oracle::random_table(rng);
      auto back = from_relational(t);
      RelationalOptions opts;
      opts.pk_order = t.pk_columns;
      opts.name = t.name;
      if (to_relational(back, opts) == t && from_relational(to_relational(back, opts)) == back) ++passed;
    }
    ok = ok && passed == 500;
    return std::pair{ok, std::to_string(table.rows.size()) + " rows x " + std::to_string(table.header().size()) +
                             " columns, exact inverse on the sample, " + std::to_string(passed) +
                             "/500 random tables with nulls"};
  });

  check(4, "balance rollup and imputation", [] {
    Sample f;
    auto cells = evaluate(f.cube, f.gas);
    auto rules = rules_from_json(load("balance_rules.json"));
    auto run = run_rules(rules, cells);
    const bool all_pass = run.checks.size() == 6 && run.failures() == 0 &&
                          std::all_of(run.checks.begin(), run.checks.end(),
                                      [](const Check& c) { return c.status == CheckStatus::Pass; });
    auto rule = rules[0];
    rule.mode = RuleMode::Impute;
    int regenerated = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].aspects.at("Concept") != AspectValue("Assets")) continue;
      std::vector<Cell> rest;
      for (std::size_t j = 0; j < cells.size(); ++j) {
        if (j != i) rest.push_back(cells[j]);
      }
      auto out = apply_rule(rule, rest, 1);
      if (out.cells.size() != 1) continue;
      const Cell& c = out.cells[0];
      if (c.aspects != cells[i].aspects || !(c.value == cells[i].value) || !c.audit) continue;
      // Soundness: the audited inputs exist, and they alone reproduce the value.
      std::vector<Cell> inputs;
      for (const auto& r : rest) {
        const auto& keys = c.audit->input_keys;
        if (std::find(keys.begin(), keys.end(), r.key()) != keys.end()) inputs.push_back(r);
      }
      if (inputs.size() != c.audit->input_keys.size() || inputs.size() != 2) continue;
      auto again = apply_rule(rule, inputs, 1);
      if (again.cells.size() == 1 && again.cells[0].value == c.value && c.audit->rule_id == rule.id) ++regenerated;
    }
    return std::pair{all_pass && regenerated == 6,
                     std::to_string(run.checks.size() - run.failures()) + "/6 rows pass at tolerance 0, " +
                         std::to_string(regenerated) + "/6 deleted Assets cells regenerated with sound audit"};
  });

  check(5, "Capital -> Equity map", [] {
    Sample f;
    Cell capital;
    capital.aspects = {{"Concept", "Capital"}, {"Entity", "Newco"}, {"Period", AspectValue::date("2012-09-30")}, {"Unit", "USD"}};
    capital.value = Decimal(7000000);
    f.gas.ingest(std::span<const Cell>(&capital, 1), "fixture");
    auto map = Map::from_json(load("capital_map.json"));
    auto cube = Hypercube::from_json(parse_json(R"({"dimensions":{
        "Concept":{"kind":"enum","values":["Equity"]},
        "Period":{"kind":"enum","type":"date","values":["2012-09-30"]},
        "Entity":{"kind":"any"},"Unit":{"kind":"any"},
        "Region":{"kind":"any","default":"[World]"}}})"));
    auto snapshot = f.gas.snapshot();
    auto got = evaluate(cube, map, snapshot);
    auto expected = oracle::rewrite_then_filter(cube, map, snapshot.live_cells());
    const bool found = std::any_of(got.begin(), got.end(), [](const Cell& c) {
      return c.aspects.at("Entity") == AspectValue("Newco") && c.aspects.at("Concept") == AspectValue("Equity") &&
             c.value == AspectValue(Decimal(7000000));
    });
    const bool same = sound_cells_equal(got, expected);
    return std::pair{found && same, std::string(found ? "Capital cell returned as Equity" : "Capital cell missing") +
                                        ", " + std::to_string(got.size()) + " cells, oracle " +
                                        (same ? "agrees" : "disagrees")};
  });

  check(6, "index vs scan and key permutation invariance", [] {
    std::mt19937_64 rng(2024);
    oracle::RandomGas gen;
    int agree = 0;
    int cubes = 0;
    for (int g = 0; g < 4; ++g) {
      auto cells = gen.cells(rng, 10'000);
      auto gas = CellGas::in_memory(StoreConfig::from_json(Json{{"rangeIndexed", {"Period"}}}));
      gas.ingest(cells, "random");
      const auto live = gas.snapshot().live_cells();
      for (int k = 0; k < 50; ++k, ++cubes) {
        auto cube = gen.cube(rng);
        QueryOptions opts;
        opts.result_cap = 1'000'000;
        if (sound_cells_equal(evaluate(cube, gas, opts), oracle::evaluate(cube, live))) ++agree;
      }
    }
    // Facts written with shuffled member order must land on one key.
    const std::vector<std::string> names{"Concept", "Entity", "Period", "Region", "Unit", "Segment", "z", "A"};
    int invariant = 0;
    for (int i = 0; i < 10'000; ++i) {
      std::vector<std::pair<std::string, Json>> pairs;
      for (const auto& n : names) {
        if (n == "Concept" || rng() % 2) pairs.emplace_back(n, n + std::to_string(rng() % 50));
      }
      auto line = [&] {
        std::string s = "{\"Aspects\":{";
        for (std::size_t j = 0; j < pairs.size(); ++j) {
          s += (j ? "," : "") + Json(pairs[j].first).dump() + ":" + pairs[j].second.dump();
        }
        return s + "},\"Value\":1}";
      };
      const auto first = parse_fact(line()).key();
      std::shuffle(pairs.begin(), pairs.end(), rng);
      const auto second = parse_fact(line()).key();
      if (first == second && first.decode() == parse_fact(line()).aspects) ++invariant;
    }
    return std::pair{agree == 200 && cubes == 200 && invariant == 10'000,
                     std::to_string(agree) + "/" + std::to_string(cubes) + " cubes match the scan on 10^4-cell gases, " +
                         std::to_string(invariant) + "/10000 shuffled aspect maps keep their key"};
  });
}

struct ScaleResults {
  double point_ms = 0;
  double hundred_ms = 0;
  bool hundred_ok = true;
};

constexpr std::size_t kBatch = 200;

// Per-query medians: each run answers kBatch pregenerated queries.
ScaleResults measure(const CellGas& gas, const wl::Spec& spec, std::size_t runs, bool hundred) {
  ScaleResults r;
  std::mt19937_64 rng(99);
  std::vector<Hypercube> points;
  for (std::size_t i = 0; i < kBatch; ++i) points.push_back(wl::point_cube(spec, rng));
  for (const auto& c : points) r.hundred_ok = r.hundred_ok && evaluate(c, gas).size() == 1;
  r.point_ms = wl::time_runs(runs, [&] {
                 for (const auto& c : points) (void)evaluate(c, gas);
               }).median_ms / kBatch;
  if (hundred) {
    std::vector<Hypercube> rows;
    for (std::size_t i = 0; i < kBatch; ++i) rows.push_back(wl::hundred_cube(spec, rng));
    for (const auto& c : rows) r.hundred_ok = r.hundred_ok && evaluate(c, gas).size() == 100;
    r.hundred_ms = wl::time_runs(runs, [&] {
                     for (const auto& c : rows) (void)evaluate(c, gas);
                   }).median_ms / kBatch;
  }
  return r;
}

void scale_criteria(std::size_t large, std::size_t runs) {
  const auto t_start = std::chrono::steady_clock::now();
  ScaleResults small, medium, big;
  double pipeline_ms = 0;
  double pipeline_max_ms = 0;
  std::string pipeline_detail;
  bool pipeline_ok = false;
  std::vector<wl::ShapeRow> shapes;
  try {
    {
      const wl::Spec spec{.cells = 10'000};
      small = measure(wl::build_gas(spec), spec, runs, false);
    }
    {
      const wl::Spec spec{.cells = 100'000};
      medium = measure(wl::build_gas(spec), spec, runs, true);
    }
    const wl::Spec spec{.cells = large};
    const auto t_build = std::chrono::steady_clock::now();
    const auto gas = wl::build_gas(spec);
    std::printf("       built %zu-cell gas in %.1f s\n", gas.live_count(), ms_since(t_build) / 1000);
    big = measure(gas, spec, runs, true);

    auto catalog = Catalog::in_memory();
    catalog.put_map(wl::pipeline_map());
    const auto component = wl::pipeline_component(wl::entity_count(spec) / 2);
    catalog.put(component);
    ComponentRun last;
    const auto timing = wl::time_runs(runs, [&] { last = run_component(component, catalog, gas.snapshot()); });
    pipeline_ms = timing.median_ms;
    pipeline_max_ms = timing.max_ms;
    const std::size_t mapped = static_cast<std::size_t>(std::count_if(last.cells.begin(), last.cells.end(), [](const Cell& c) {
      return c.aspects.at("Concept") == AspectValue("C006");
    }));
    pipeline_ok = last.grid.populated() == 96 && last.rules.imputed.size() == 2 && mapped == 12 &&
                  last.rules.failures() == 0 && timing.max_ms <= 2000;
    pipeline_detail = std::to_string(last.grid.populated()) + " grid cells (" + std::to_string(mapped) + " via map, " +
                      std::to_string(last.rules.imputed.size()) + " imputed, " +
                      std::to_string(last.rules.checks.size() - last.rules.failures()) + "/" +
                      std::to_string(last.rules.checks.size()) + " checks pass)" +
                      fmt(", median %.2f ms, max %.2f ms (limit 2000 ms)", pipeline_ms, pipeline_max_ms);
    shapes = wl::shape_table(gas, spec, runs);
  } catch (const std::exception& e) {
    report(7, false, "scale", std::string("exception: ") + e.what());
    report(8, false, "pipeline", "not measured");
    return;
  }
  const double total_s = ms_since(t_start) / 1000;
  const double ratio_a = big.point_ms / small.point_ms;
  const double ratio_b = big.hundred_ms / medium.hundred_ms;
  report(7, ratio_a <= 3 && total_s < 600 && small.hundred_ok && big.hundred_ok,
         "(a) point query 10^6 vs 10^4",
         fmt("median %.4f ms vs %.4f ms, ratio %.2f (limit 3)", big.point_ms, small.point_ms, ratio_a));
  report(7, ratio_b <= 5 && total_s < 600 && medium.hundred_ok && big.hundred_ok,
         "(b) 100-cell query 10^6 vs 10^5",
         fmt("median %.4f ms vs %.4f ms, ratio %.2f (limit 5)", big.hundred_ms, medium.hundred_ms, ratio_b) +
             fmt(", scale section %.1f s (limit 600 s)", total_s));
  report(8, pipeline_ok, "96-cell component pipeline on 10^6 cells", pipeline_detail);
  std::printf("       %-28s %6s %12s\n", "query", "cells", "median ms");
  for (const auto& s : shapes) std::printf("       %-28s %6zu %12.3f\n", s.query.c_str(), s.cells, s.timing.median_ms);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cellstore acceptance run"};
  std::size_t large = 1'000'000;
  std::size_t runs = 20;
  app.add_option("--data", data_dir, "Fixture directory");
  app.add_option("--large", large, "Cells in the large synthetic gas");
  app.add_option("--runs", runs, "Timed runs per measurement")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  sample_criteria();
  scale_criteria(large, runs);
  std::printf("%s: %d failing\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
