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

// cellstore: command-line front end.
//
// Store directory: --dir, else $CELLSTORE_DIR, else ./cellstore-data.
// Layout: <dir>/gas (segments, manifest, config.json) and <dir>/catalog.
// Exit status: 0 success, 1 usage, 2 error, 3 some records rejected,
// 4 a rule check failed.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cellstore/api.hpp"
#include "cellstore/detail/fs_util.hpp"
#include "cellstore/facts.hpp"
#include "cellstore/relational.hpp"
#include "workload.hpp"

using namespace cellstore;
namespace fs = std::filesystem;

namespace {

struct Context {
  std::string dir;
  std::string config_file;

  fs::path root() const { return dir; }

  CellGas gas() const {
    std::optional<StoreConfig> config;
    if (!config_file.empty()) config = StoreConfig::from_json(load(config_file));
    return CellGas::open(root() / "gas", config);
  }
  Catalog catalog() const { return Catalog::open(root() / "catalog"); }

  static Json load(const std::string& path) { return parse_json(detail::read_file(path)); }
};

void print_json(const Json& doc) { std::cout << dump_json(doc, 2) << "\n"; }

void write_text(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) fail(ErrorCode::IoError, "cannot write " + out);
    f << text;
  }
}

int report_status(const IngestReport& report) { return report.rejected.empty() ? 0 : 3; }

Server* active_server = nullptr;

void on_signal(int) {
  if (active_server) active_server->stop();
}

std::vector<Cell> run_query(const Context& ctx, const CellGas& gas, const std::string& cube_file,
                            const std::string& map_ref, bool serial, Hypercube& cube) {
  cube = Hypercube::from_json(Context::load(cube_file));
  QueryOptions q;
  if (serial) q.mode = kernels::ExecMode::Serial;
  if (map_ref.empty()) return evaluate(cube, gas.snapshot(), q);
  std::optional<Map> map;
  if (fs::exists(map_ref)) {
    map = Map::from_json(Context::load(map_ref));
  } else {
    map = ctx.catalog().get_map(map_ref);
    if (!map) fail(ErrorCode::UnknownId, "no map file or catalog map '" + map_ref + "'");
  }
  return evaluate(cube, *map, gas.snapshot(), MapQueryOptions{q, CollisionPolicy::Flag});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cellstore: a store of multidimensional cells"};
  app.require_subcommand(1);
  Context ctx;
  const char* env = std::getenv("CELLSTORE_DIR");
  ctx.dir = env ? env : "cellstore-data";
  app.add_option("--dir", ctx.dir, "Store directory (default $CELLSTORE_DIR or ./cellstore-data)");
  app.add_option("--config", ctx.config_file, "Store config JSON, used when the store is created");

  std::function<int()> action;

  // init
  auto* init = app.add_subcommand("init", "Create the store directory");
  init->callback([&] {
    action = [&] {
      auto gas = ctx.gas();
      ctx.catalog();
      print_json(Json{{"dir", ctx.dir}, {"config", gas.config().to_json()}, {"cells", gas.live_count()}});
      return 0;
    };
  });

  // ingest
  std::vector<std::string> ingest_files;
  auto* ingest = app.add_subcommand("ingest", "Ingest fact files (JSON lines; '-' reads stdin)");
  ingest->add_option("files", ingest_files)->required();
  ingest->callback([&] {
    action = [&] {
      auto gas = ctx.gas();
      int status = 0;
      for (const auto& f : ingest_files) {
        IngestReport r = f == "-" ? import_facts(gas, std::cin, "stdin") : import_facts(gas, fs::path(f));
        print_json(Json{{"file", f}, {"report", r.to_json()}});
        status = std::max(status, report_status(r));
      }
      return status;
    };
  });

  // export
  std::string export_cube, export_out;
  auto* exp = app.add_subcommand("export", "Write live cells as JSON lines");
  exp->add_option("--cube", export_cube, "Only cells inside this hypercube");
  exp->add_option("-o,--output", export_out, "Output file (default stdout)");
  exp->callback([&] {
    action = [&] {
      auto gas = ctx.gas();
      std::optional<Hypercube> cube;
      if (!export_cube.empty()) cube = Hypercube::from_json(Context::load(export_cube));
      std::ostringstream os;
      export_facts(gas.snapshot(), os, cube);
      write_text(export_out, os.str());
      return 0;
    };
  });

  // query / materialize / export-csv
  std::string q_cube, q_map, q_format = "cells", q_out;
  bool q_serial = false;
  auto* query = app.add_subcommand("query", "Evaluate a hypercube");
  query->add_option("--cube", q_cube, "Hypercube JSON")->required();
  query->add_option("--map", q_map, "Map JSON file or catalog map id");
  query->add_option("--format", q_format, "cells | table | csv | relational | relational-csv")
      ->check(CLI::IsMember({"cells", "table", "csv", "relational", "relational-csv"}));
  query->add_flag("--serial", q_serial, "Use the serial kernels");
  query->add_option("-o,--output", q_out, "Output file (default stdout)");
  auto run_formatted = [&](const std::string& format) {
    auto gas = ctx.gas();
    Hypercube cube;
    const auto cells = run_query(ctx, gas, q_cube, q_map, q_serial, cube);
    std::string text;
    if (format == "cells") {
      Json arr = Json::array();
      for (const auto& c : cells) arr.push_back(cell_to_json(c));
      text = dump_json(arr, 2) + "\n";
    } else if (format == "table") {
      text = dump_json(materialize(cells, cube).to_json(), 2) + "\n";
    } else if (format == "csv") {
      text = materialize(cells, cube).to_csv();
    } else if (format == "relational") {
      text = dump_json(to_relational(materialize(cells, cube)).to_json(), 2) + "\n";
    } else {
      text = to_relational(materialize(cells, cube)).to_csv();
    }
    write_text(q_out, text);
    return 0;
  };
  query->callback([&] { action = [&] { return run_formatted(q_format); }; });

  bool m_csv = false;
  auto* mat = app.add_subcommand("materialize", "Hypercube result as a table (JSON or CSV)");
  mat->add_option("--cube", q_cube, "Hypercube JSON")->required();
  mat->add_option("--map", q_map, "Map JSON file or catalog map id");
  mat->add_flag("--csv", m_csv, "CSV instead of JSON");
  mat->add_option("-o,--output", q_out, "Output file (default stdout)");
  mat->callback([&] { action = [&] { return run_formatted(m_csv ? "csv" : "table"); }; });

  std::string d_out, e_table;
  auto* ecsv = app.add_subcommand("export-csv", "Hypercube result as a relational CSV table");
  ecsv->add_option("--cube", q_cube, "Hypercube JSON")->required();
  ecsv->add_option("--map", q_map, "Map JSON file or catalog map id");
  ecsv->add_option("--descriptor", d_out, "Also write the table descriptor JSON here");
  ecsv->add_option("-o,--output", q_out, "Output file (default stdout)");
  ecsv->add_option("--table", e_table, "Table name; strips the \"<table>.\" dimension prefix");
  ecsv->callback([&] {
    action = [&] {
      auto gas = ctx.gas();
      Hypercube cube;
      RelationalOptions opts;
      opts.name = e_table;
      opts.prefix_dimensions = !e_table.empty();
      const auto table = to_relational(materialize(run_query(ctx, gas, q_cube, q_map, q_serial, cube), cube), opts);
      write_text(q_out, table.to_csv());
      if (!d_out.empty()) write_text(d_out, dump_json(table.descriptor(), 2) + "\n");
      return 0;
    };
  });

  // import-csv
  std::string icsv_file, icsv_desc;
  bool icsv_prefix = false;
  auto* icsv = app.add_subcommand("import-csv", "Ingest a relational CSV table");
  icsv->add_option("file", icsv_file)->required();
  icsv->add_option("--descriptor", icsv_desc, "Table descriptor JSON")->required();
  icsv->add_flag("--prefix", icsv_prefix, "Name key dimensions \"<table>.<column>\"");
  icsv->callback([&] {
    action = [&] {
      auto gas = ctx.gas();
      const auto table = RelationalTable::from_csv(detail::read_file(icsv_file), Context::load(icsv_desc));
      RelationalOptions opts;
      opts.prefix_dimensions = icsv_prefix;
      const auto report = gas.ingest(from_relational(table, opts), "csv:" + table.name);
      print_json(report.to_json());
      return report_status(report);
    };
  });

  // rules
  std::string r_cube, r_rules, r_map;
  auto* rules = app.add_subcommand("rules", "Run business rules over a hypercube result");
  rules->add_option("--cube", r_cube, "Hypercube JSON")->required();
  rules->add_option("--rules", r_rules, "Rules JSON")->required();
  rules->add_option("--map", r_map, "Map JSON file or catalog map id");
  rules->callback([&] {
    action = [&] {
      auto gas = ctx.gas();
      Hypercube cube;
      const auto cells = run_query(ctx, gas, r_cube, r_map, false, cube);
      RunOptions ro;
      ro.computed_at = gas.snapshot().sequence();
      const auto run = run_rules(rules_from_json(Context::load(r_rules)), cells, ro);
      print_json(run.to_json());
      return run.failures() ? 4 : 0;
    };
  });

  // component
  auto* comp = app.add_subcommand("component", "Manage catalog components");
  comp->require_subcommand(1);
  std::string c_file, c_id, c_lang = "en";
  auto* c_put = comp->add_subcommand("put", "Add or replace a component from JSON");
  c_put->add_option("file", c_file)->required();
  c_put->callback([&] {
    action = [&] {
      auto cat = ctx.catalog();
      const auto c = Component::from_json(Context::load(c_file));
      cat.put(c);
      print_json(Json{{"stored", c.id}});
      return 0;
    };
  });
  auto* c_get = comp->add_subcommand("get", "Print a component");
  c_get->add_option("id", c_id)->required();
  c_get->callback([&] {
    action = [&] {
      auto c = ctx.catalog().get(c_id);
      if (!c) fail(ErrorCode::UnknownId, "no component '" + c_id + "'");
      print_json(c->to_json());
      return 0;
    };
  });
  auto* c_list = comp->add_subcommand("list", "List components");
  c_list->add_option("--lang", c_lang);
  c_list->callback([&] {
    action = [&] {
      Json out = Json::array();
      for (const auto& s : ctx.catalog().list(c_lang)) {
        out.push_back(Json{{"id", s.id}, {"label", s.label}, {"dimensions", s.dimensions}, {"rules", s.rules}});
      }
      print_json(out);
      return 0;
    };
  });
  auto* c_rm = comp->add_subcommand("rm", "Remove a component");
  c_rm->add_option("id", c_id)->required();
  c_rm->callback([&] {
    action = [&] {
      if (!ctx.catalog().remove(c_id)) fail(ErrorCode::UnknownId, "no component '" + c_id + "'");
      return 0;
    };
  });
  auto* c_grid = comp->add_subcommand("grid", "Run a component and print its grid view");
  c_grid->add_option("id", c_id)->required();
  c_grid->callback([&] {
    action = [&] {
      auto gas = ctx.gas();
      auto cat = ctx.catalog();
      auto c = cat.get(c_id);
      if (!c) fail(ErrorCode::UnknownId, "no component '" + c_id + "'");
      const auto run = run_component(*c, cat, gas.snapshot());
      print_json(Json{{"grid", run.grid.to_json()}, {"rules", run.rules.to_json()}});
      return 0;
    };
  });

  // map
  auto* map = app.add_subcommand("map", "Manage catalog maps");
  map->require_subcommand(1);
  std::string m_file;
  auto* m_put = map->add_subcommand("put", "Add or replace a map from JSON");
  m_put->add_option("file", m_file)->required();
  m_put->callback([&] {
    action = [&] {
      const auto m = Map::from_json(Context::load(m_file));
      ctx.catalog().put_map(m);
      print_json(Json{{"stored", m.name()}});
      return 0;
    };
  });
  map->add_subcommand("list", "List maps")->callback([&] {
    action = [&] {
      print_json(Json(ctx.catalog().map_ids()));
      return 0;
    };
  });

  // search
  std::string s_query;
  std::size_t s_limit = 50;
  auto* search = app.add_subcommand("search", "Find concepts across components");
  search->add_option("query", s_query)->required();
  search->add_option("--lang", c_lang);
  search->add_option("--limit", s_limit);
  search->callback([&] {
    action = [&] {
      Json out = Json::array();
      for (const auto& h : ctx.catalog().search_concepts(s_query, c_lang, s_limit)) {
        out.push_back(Json{{"component", h.component}, {"concept", value_to_json(h.concept_name)}, {"label", h.label}});
      }
      print_json(out);
      return 0;
    };
  });

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  unsigned threads = 4;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--threads", threads);
  serve->callback([&] {
    action = [&] {
      auto gas = ctx.gas();
      auto cat = ctx.catalog();
      ServiceOptions opts;
      opts.threads = threads;
      Server server(gas, cat, opts);
      active_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::fprintf(stderr, "serving %s on http://%s:%d\n", ctx.dir.c_str(), host.c_str(), port);
      const bool ok = server.listen(host, port);
      active_server = nullptr;
      if (!ok && !server.running()) {
        std::fprintf(stderr, "cannot listen on %s:%d\n", host.c_str(), port);
        return 2;
      }
      return 0;
    };
  });

  // compact / stats
  app.add_subcommand("compact", "Rewrite segments keeping live versions only")->callback([&] {
    action = [&] {
      auto gas = ctx.gas();
      gas.compact();
      print_json(Json{{"cells", gas.live_count()}});
      return 0;
    };
  });
  app.add_subcommand("stats", "Cell count and sequence")->callback([&] {
    action = [&] {
      auto gas = ctx.gas();
      const auto snap = gas.snapshot();
      print_json(Json{{"cells", snap.live_count()}, {"sequence", snap.sequence()}, {"config", gas.config().to_json()}});
      return 0;
    };
  });

  // bench
  std::size_t b_cells = 1'000'000;
  std::size_t b_runs = 20;
  auto* bench = app.add_subcommand("bench", "Time the standard query shapes on a synthetic in-memory gas");
  bench->add_option("--cells", b_cells, "Synthetic gas size");
  bench->add_option("--runs", b_runs, "Runs per query (median reported)")->check(CLI::PositiveNumber);
  bench->callback([&] {
    action = [&] {
      workload::Spec spec;
      spec.cells = b_cells;
      const auto t0 = std::chrono::steady_clock::now();
      const auto gas = workload::build_gas(spec);
      const double build_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::printf("synthetic gas: %zu cells, built in %.1f s, %zu runs per query\n\n", gas.live_count(), build_s, b_runs);
      std::printf("%-28s %6s %12s %12s %12s\n", "Query", "Cells", "Median ms", "Min ms", "Max ms");
      for (const auto& row : workload::shape_table(gas, spec, b_runs)) {
        std::printf("%-28s %6zu %12.3f %12.3f %12.3f\n", row.query.c_str(), row.cells, row.timing.median_ms,
                    row.timing.min_ms, row.timing.max_ms);
      }
      return 0;
    };
  });

  CLI11_PARSE(app, argc, argv);
  try {
    return action ? action() : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
