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

#pragma once

// HTTP front end over one gas and one catalog.
//
//   GET    /health
//   POST   /cells                      facts (JSON array or JSON lines)
//   GET    /cells/{hexkey}[?history=1]
//   POST   /query                      hypercube or component query, paged
//   POST   /relational                 ingest a relational table
//   POST   /rules/run                  rules over a hypercube result
//   GET    /components[?lang=]
//   GET    /components/{id}
//   PUT    /components/{id}
//   DELETE /components/{id}
//   GET    /components/{id}/grid[?lang=]
//   POST   /components/{id}/cells      spreadsheet write-back
//   GET    /maps, GET|PUT /maps/{id}
//   GET    /concepts?q=&lang=&limit=
//
// Errors come back as {"error": {"code", "message"}} with the status from
// http_status().

#include <memory>
#include <string>

#include "cellstore/catalog.hpp"
#include "cellstore/error.hpp"

namespace cellstore {

int http_status(ErrorCode code) noexcept;

struct ServiceOptions {
  std::size_t default_page = 1000;
  std::size_t max_page = 100000;
  /// Larger request bodies get 413.
  std::size_t max_body_bytes = 256u << 20;
  unsigned threads = 4;
};

/// Page position after the last returned cell: "<hex key>.<ingested_at>".
std::string encode_cursor(const Cell& last);

class Server {
 public:
  /// The gas and catalog must outlive the server.
  Server(CellGas& gas, Catalog& catalog, ServiceOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Blocks until stop(). Returns false when the address cannot be bound.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host);
  /// Serves on the port from bind_any_port(); blocks until stop().
  bool listen_after_bind();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cellstore
