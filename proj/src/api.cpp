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

#include "cellstore/api.hpp"

#include <httplib.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "cellstore/facts.hpp"
#include "cellstore/relational.hpp"

namespace cellstore {

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::BadRequest:
    case ErrorCode::BadCanonicalForm:
    case ErrorCode::MissingConcept:
    case ErrorCode::EmptyAspects:
      return 400;
    case ErrorCode::UnknownId:
      return 404;
    case ErrorCode::DanglingReference:
    case ErrorCode::KeyCollisionAfterRewrite:
      return 409;
    case ErrorCode::ResultTooLarge:
      return 413;
    case ErrorCode::StorageFull:
      return 507;
    case ErrorCode::IoError:
    case ErrorCode::CorruptRecord:
      return 500;
    default:
      return 422;
  }
}

std::string encode_cursor(const Cell& last) { return last.key().to_hex() + "." + std::to_string(last.ingested_at); }

namespace {

struct Cursor {
  CellKey key;
  std::uint64_t seq = 0;
};

Cursor decode_cursor(const std::string& text) {
  const auto dot = text.rfind('.');
  if (dot == std::string::npos) fail(ErrorCode::BadRequest, "malformed cursor");
  Cursor c;
  try {
    c.key = CellKey::from_hex(text.substr(0, dot));
    c.seq = std::stoull(text.substr(dot + 1));
  } catch (const Error&) {
    fail(ErrorCode::BadRequest, "malformed cursor");
  } catch (const std::logic_error&) {
    fail(ErrorCode::BadRequest, "malformed cursor");
  }
  return c;
}

Json error_body(std::string_view code, const std::string& message) {
  return Json{{"error", {{"code", code}, {"message", message}}}};
}

void send_json(httplib::Response& res, const Json& doc, int status = 200) {
  res.status = status;
  res.set_content(dump_json(doc), "application/json");
}

Json body_json(const httplib::Request& req) {
  if (req.body.empty()) fail(ErrorCode::BadRequest, "request body is empty");
  Json doc = parse_json(req.body);
  if (!doc.is_object()) fail(ErrorCode::BadRequest, "request body must be a JSON object");
  return doc;
}

std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback) {
  if (!req.has_param(name)) return fallback;
  try {
    return std::stoull(req.get_param_value(name));
  } catch (const std::logic_error&) {
    fail(ErrorCode::BadRequest, std::string("parameter '") + name + "' must be a non-negative integer");
  }
}

std::string lang_of(const httplib::Request& req) { return req.has_param("lang") ? req.get_param_value("lang") : "en"; }

}  // namespace

struct Server::Impl {
  CellGas& gas;
  Catalog& catalog;
  ServiceOptions options;
  httplib::Server http;

  Impl(CellGas& g, Catalog& c, ServiceOptions o) : gas(g), catalog(c), options(o) { routes(); }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  // Library errors map to statuses; anything else is a 500.
  static httplib::Server::Handler guard(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        send_json(res, error_body(to_string(e.code()), e.what()), http_status(e.code()));
      } catch (const Json::exception& e) {
        send_json(res, error_body("BadRequest", e.what()), 400);
      } catch (const std::exception& e) {
        send_json(res, error_body("Internal", e.what()), 500);
      }
    };
  }

  Component component_or_404(const std::string& id) const {
    auto c = catalog.get(id);
    if (!c) fail(ErrorCode::UnknownId, "no component '" + id + "'");
    return *c;
  }

  Map map_or_404(const std::string& id) const {
    auto m = catalog.get_map(id);
    if (!m) fail(ErrorCode::UnknownId, "no map '" + id + "'");
    return *m;
  }

  std::optional<Map> map_member(const Json& doc) const {
    if (!doc.contains("map") || doc["map"].is_null()) return std::nullopt;
    if (doc["map"].is_string()) return map_or_404(doc["map"].get<std::string>());
    return Map::from_json(doc["map"]);
  }

  static QueryOptions query_options(const Json& doc) {
    QueryOptions q;
    if (doc.contains("mode")) {
      const auto mode = std::string(require_string(doc["mode"], "mode"));
      if (mode == "serial") q.mode = kernels::ExecMode::Serial;
      else if (mode != "parallel") fail(ErrorCode::BadRequest, "mode must be serial or parallel");
    }
    return q;
  }

  IngestReport ingest_body(const httplib::Request& req) {
    const auto first = req.body.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) fail(ErrorCode::BadRequest, "request body is empty");
    if (req.body[first] != '[') {
      std::istringstream in(req.body);
      return import_facts(gas, in, "http");
    }
    // A JSON array of fact objects: same rules as a fact file, one record each.
    const Json arr = parse_json(req.body);
    std::string lines;
    for (const auto& fact : arr) lines += dump_json(fact) + "\n";
    std::istringstream in(lines);
    return import_facts(gas, in, "http");
  }

  void routes() {
    http.set_payload_max_length(options.max_body_bytes);
    http.new_task_queue = [n = std::max(1u, options.threads)] { return new httplib::ThreadPool(n); };

    http.Get("/health", guard([this](const auto&, auto& res) {
      const auto snap = gas.snapshot();
      send_json(res, Json{{"status", "ok"}, {"cells", snap.live_count()}, {"sequence", snap.sequence()}});
    }));

    http.Post("/cells", guard([this](const auto& req, auto& res) {
      const auto report = ingest_body(req);
      send_json(res, report.to_json(), report.rejected.empty() ? 200 : 422);
    }));

    http.Get(R"(/cells/([0-9a-fA-F]+))", guard([this](const auto& req, auto& res) {
      const auto aspects = CellKey::from_hex(req.matches[1].str()).decode();
      const auto snap = gas.snapshot();
      auto cell = snap.point_query(aspects);
      if (!cell) fail(ErrorCode::UnknownId, "no live cell with that key");
      Json doc{{"cell", cell_to_json(*cell)}};
      if (req.has_param("history")) {
        Json h = Json::array();
        for (const auto& v : snap.history(aspects)) h.push_back(cell_to_json(v));
        doc["history"] = std::move(h);
      }
      send_json(res, doc);
    }));

    http.Post("/query", guard([this](const auto& req, auto& res) { query(req, res); }));

    http.Post("/relational", guard([this](const auto& req, auto& res) {
      const auto table = RelationalTable::from_json(body_json(req));
      RelationalOptions opts;
      opts.prefix_dimensions = req.get_param_value("prefix") == "1";
      const auto cells = from_relational(table, opts);
      const auto report = gas.ingest(cells, "relational:" + table.name);
      send_json(res, report.to_json(), report.rejected.empty() ? 200 : 422);
    }));

    http.Post("/rules/run", guard([this](const auto& req, auto& res) {
      const Json doc = body_json(req);
      if (!doc.contains("hypercube") || !doc.contains("rules")) {
        fail(ErrorCode::BadRequest, "need 'hypercube' and 'rules'");
      }
      const auto cube = Hypercube::from_json(doc["hypercube"]);
      const auto rules = rules_from_json(doc["rules"]);
      const auto map = map_member(doc);
      const auto snap = gas.snapshot();
      auto cells = map ? evaluate(cube, *map, snap, MapQueryOptions{query_options(doc), CollisionPolicy::Flag})
                       : evaluate(cube, snap, query_options(doc));
      RunOptions ro;
      ro.computed_at = snap.sequence();
      if (doc.contains("transitive")) ro.transitive = doc["transitive"].get<bool>();
      send_json(res, run_rules(rules, cells, ro).to_json());
    }));

    http.Get("/components", guard([this](const auto& req, auto& res) {
      Json out = Json::array();
      for (const auto& s : catalog.list(lang_of(req))) {
        out.push_back(Json{{"id", s.id}, {"label", s.label}, {"dimensions", s.dimensions}, {"rules", s.rules}});
      }
      send_json(res, Json{{"components", out}});
    }));

    http.Get(R"(/components/([^/]+))", guard([this](const auto& req, auto& res) {
      send_json(res, component_or_404(req.matches[1].str()).to_json());
    }));

    http.Put(R"(/components/([^/]+))", guard([this](const auto& req, auto& res) {
      const auto id = req.matches[1].str();
      const auto component = Component::from_json(body_json(req));
      if (component.id != id) fail(ErrorCode::BadRequest, "body id '" + component.id + "' does not match the path");
      const bool existed = catalog.get(id).has_value();
      catalog.put(component);
      send_json(res, component.to_json(), existed ? 200 : 201);
    }));

    http.Delete(R"(/components/([^/]+))", guard([this](const auto& req, auto& res) {
      if (!catalog.remove(req.matches[1].str())) fail(ErrorCode::UnknownId, "no component '" + req.matches[1].str() + "'");
      res.status = 204;
    }));

    http.Get(R"(/components/([^/]+)/grid)", guard([this](const auto& req, auto& res) {
      const auto component = component_or_404(req.matches[1].str());
      const auto run = run_component(component, catalog, gas.snapshot());
      send_json(res, Json{{"component", component.id},
                          {"label", component.label(lang_of(req))},
                          {"layout", run.layout.to_json()},
                          {"grid", run.grid.to_json()},
                          {"rules", run.rules.to_json()}});
    }));

    http.Post(R"(/components/([^/]+)/cells)", guard([this](const auto& req, auto& res) {
      const auto component = component_or_404(req.matches[1].str());
      const Json doc = body_json(req);
      if (!doc.contains("coordinates") || !doc.contains("value")) {
        fail(ErrorCode::BadRequest, "need 'coordinates' and 'value'");
      }
      Cell cell;
      {
        // The snapshot must be released before ingesting on this thread.
        const auto run = run_component(component, catalog, gas.snapshot());
        cell = plan_write_back(run.layout, run.cube, run.rules.cells, aspects_from_json(doc["coordinates"]),
                               value_from_json(doc["value"]));
      }
      const auto report = gas.ingest(std::span<const Cell>(&cell, 1), "write-back:" + component.id);
      send_json(res, Json{{"cell", cell_to_json(cell)}, {"report", report.to_json()}},
                report.rejected.empty() ? 200 : 422);
    }));

    http.Get("/maps", guard([this](const auto&, auto& res) { send_json(res, Json{{"maps", catalog.map_ids()}}); }));

    http.Get(R"(/maps/([^/]+))", guard([this](const auto& req, auto& res) {
      send_json(res, map_or_404(req.matches[1].str()).to_json());
    }));

    http.Put(R"(/maps/([^/]+))", guard([this](const auto& req, auto& res) {
      const auto id = req.matches[1].str();
      const auto map = Map::from_json(body_json(req));
      if (map.name() != id) fail(ErrorCode::BadRequest, "body name '" + map.name() + "' does not match the path");
      const bool existed = catalog.get_map(id).has_value();
      catalog.put_map(map);
      send_json(res, map.to_json(), existed ? 200 : 201);
    }));

    http.Get("/concepts", guard([this](const auto& req, auto& res) {
      const auto q = req.has_param("q") ? req.get_param_value("q") : std::string();
      Json hits = Json::array();
      for (const auto& h : catalog.search_concepts(q, lang_of(req), size_param(req, "limit", 50))) {
        hits.push_back(Json{{"component", h.component}, {"concept", value_to_json(h.concept_name)}, {"label", h.label}});
      }
      send_json(res, Json{{"hits", hits}});
    }));
  }

  void query(const httplib::Request& req, httplib::Response& res) {
    const Json doc = body_json(req);
    static const std::set<std::string> known{"hypercube", "component", "map", "collisions", "limit",
                                             "cursor",    "mode",      "format"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (!known.count(it.key())) fail(ErrorCode::BadRequest, "unknown member '" + it.key() + "'");
    }
    Hypercube cube;
    std::optional<Map> map;
    if (doc.contains("component")) {
      const auto component = component_or_404(std::string(require_string(doc["component"], "component")));
      cube = component.hypercube;
      if (component.map_id) map = map_or_404(*component.map_id);
    } else if (doc.contains("hypercube")) {
      cube = Hypercube::from_json(doc["hypercube"]);
    } else {
      fail(ErrorCode::BadRequest, "need 'hypercube' or 'component'");
    }
    if (auto m = map_member(doc)) map = std::move(m);

    MapQueryOptions mo{query_options(doc), CollisionPolicy::Flag};
    if (doc.contains("collisions")) {
      const auto policy = std::string(require_string(doc["collisions"], "collisions"));
      if (policy == "error") mo.collisions = CollisionPolicy::Error;
      else if (policy != "flag") fail(ErrorCode::BadRequest, "collisions must be flag or error");
    }
    std::size_t limit = options.default_page;
    if (doc.contains("limit")) {
      if (!doc["limit"].is_number_unsigned()) fail(ErrorCode::BadRequest, "limit must be a non-negative integer");
      limit = doc["limit"].get<std::size_t>();
    }
    if (limit == 0 || limit > options.max_page) {
      fail(ErrorCode::BadRequest, "limit must be between 1 and " + std::to_string(options.max_page));
    }
    std::optional<Cursor> cursor;
    if (doc.contains("cursor") && !doc["cursor"].is_null()) {
      cursor = decode_cursor(std::string(require_string(doc["cursor"], "cursor")));
    }
    const std::string format = doc.contains("format") ? std::string(require_string(doc["format"], "format")) : "cells";
    static const std::set<std::string> formats{"cells", "table", "csv", "relational", "relational-csv"};
    if (!formats.count(format)) fail(ErrorCode::BadRequest, "unknown format '" + format + "'");
    std::vector<Cell> cells;
    {
      const auto snap = gas.snapshot();
      cells = map ? evaluate(cube, *map, snap, mo) : evaluate(cube, snap, mo.query);
    }

    if (format == "table") return send_json(res, materialize(cells, cube).to_json());
    if (format == "csv") {
      res.set_content(materialize(cells, cube).to_csv(), "text/csv");
      return;
    }
    if (format == "relational") return send_json(res, to_relational(materialize(cells, cube)).to_json());
    if (format == "relational-csv") {
      res.set_content(to_relational(materialize(cells, cube)).to_csv(), "text/csv");
      return;
    }

    std::size_t start = 0;
    if (cursor) {
      // Results are ordered by key, then ingestion sequence.
      auto after = std::upper_bound(cells.begin(), cells.end(), *cursor, [](const Cursor& c, const Cell& cell) {
        const auto k = cell.key();
        if (c.key < k) return true;
        if (k < c.key) return false;
        return c.seq < cell.ingested_at;
      });
      start = static_cast<std::size_t>(after - cells.begin());
    }
    const std::size_t end = std::min(cells.size(), start + limit);
    Json page = Json::array();
    for (std::size_t i = start; i < end; ++i) page.push_back(cell_to_json(cells[i]));
    Json out{{"total", cells.size()}, {"cells", std::move(page)}};
    out["nextCursor"] = end < cells.size() ? Json(encode_cursor(cells[end - 1])) : Json(nullptr);
    send_json(res, out);
  }
};

Server::Server(CellGas& gas, Catalog& catalog, ServiceOptions options)
    : impl_(std::make_unique<Impl>(gas, catalog, options)) {}
Server::~Server() = default;

bool Server::listen(const std::string& host, int port) { return impl_->http.listen(host, port); }
int Server::bind_any_port(const std::string& host) { return impl_->http.bind_to_any_port(host); }
bool Server::listen_after_bind() { return impl_->http.listen_after_bind(); }
void Server::stop() { impl_->http.stop(); }
bool Server::running() const { return impl_->http.is_running(); }

}  // namespace cellstore
