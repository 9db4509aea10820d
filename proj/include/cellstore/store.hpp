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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "cellstore/cell.hpp"
#include "cellstore/interval.hpp"
#include "cellstore/json_io.hpp"

namespace cellstore {

namespace detail {
struct GasState;
}

struct StoreConfig {
  /// Dimensions that get an ordered (range) index in addition to postings.
  std::vector<std::string> range_indexed;
  /// Declared kinds for untyped strings in fact files, e.g. Period -> date.
  std::map<std::string, ValueKind, std::less<>> dimension_types;
  /// Largest hypercube result a query may return.
  std::size_t result_cap = 100000;
  /// A segment file is sealed once it grows past this size.
  std::uint64_t segment_bytes = 64ULL << 20;

  Json to_json() const;
  static StoreConfig from_json(const Json& doc);
};

struct Rejection {
  std::size_t record = 0;  // 1-based record index (line number for files)
  std::string violation;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t collisions = 0;
  std::size_t identical_duplicates = 0;
  std::vector<Rejection> rejected;

  std::size_t total() const { return accepted + collisions + identical_duplicates + rejected.size(); }
  Json to_json() const;
};

class CellGas;

/// A consistent read view. Holding a snapshot pins the current index
/// generation; commits wait for outstanding snapshots before publishing.
class Snapshot {
 public:
  /// Throws MissingConcept.
  std::optional<Cell> point_query(const Aspects& aspects) const;

  /// Ids of live cells carrying (dimension = value), ascending.
  std::vector<std::uint64_t> postings_lookup(std::string_view dimension, const AspectValue& value) const;

  /// Ids of live cells whose `dimension` value lies in `range`, ascending.
  /// Throws NoRangeIndex, KindMismatch.
  std::vector<std::uint64_t> range_lookup(std::string_view dimension, const Interval& range) const;

  std::optional<Cell> cell(std::uint64_t id) const;
  std::vector<Cell> live_cells() const;
  std::size_t live_count() const;
  /// All stored versions of a key, newest first.
  std::vector<Cell> history(const Aspects& aspects) const;
  /// Highest sequence number visible in this snapshot.
  std::uint64_t sequence() const;

  const detail::GasState& state() const { return *state_; }
  const StoreConfig& config() const { return *config_; }

 private:
  friend class CellGas;
  Snapshot(std::shared_lock<std::shared_mutex> lock, const detail::GasState* state, const StoreConfig* config)
      : lock_(std::move(lock)), state_(state), config_(config) {}

  std::shared_lock<std::shared_mutex> lock_;
  const detail::GasState* state_;
  const StoreConfig* config_;
};

/// The gas of cells: one logically unordered collection.
///
/// Every dimension gets hash postings; dimensions listed in the config also
/// get range indexes. Re-ingesting a key with a different value is a
/// collision: the newest version wins, older versions stay in the segment
/// files and in history(). A directory-backed gas persists each ingest batch
/// (fsync) before making it visible.
class CellGas {
 public:
  /// Opens or creates a store directory. An existing config file wins over
  /// `config`.
  static CellGas open(const std::filesystem::path& dir, std::optional<StoreConfig> config = std::nullopt);
  static CellGas in_memory(StoreConfig config = {});

  CellGas(CellGas&&) noexcept;
  CellGas& operator=(CellGas&&) noexcept;
  ~CellGas();

  /// Invalid records are reported, never thrown. Throws StorageFull / IoError
  /// when the batch cannot be made durable, in which case nothing changes.
  IngestReport ingest(std::span<const Cell> records, std::string_view source);

  Snapshot snapshot() const;

  std::optional<Cell> point_query(const Aspects& aspects) const { return snapshot().point_query(aspects); }
  std::vector<std::uint64_t> postings_lookup(std::string_view dimension, const AspectValue& value) const {
    return snapshot().postings_lookup(dimension, value);
  }
  std::vector<std::uint64_t> range_lookup(std::string_view dimension, const Interval& range) const {
    return snapshot().range_lookup(dimension, range);
  }
  std::size_t live_count() const { return snapshot().live_count(); }

  /// Rewrites the segment files with live versions only. Explicit
  /// maintenance; ingest never drops history on its own.
  void compact();

  const StoreConfig& config() const;
  std::optional<std::filesystem::path> directory() const;

 private:
  struct Impl;
  explicit CellGas(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

/// Sorted-list intersection used by the hypercube planner, exposed over ids.
std::vector<std::uint64_t> postings_intersect(const std::vector<std::vector<std::uint64_t>>& lists);

}  // namespace cellstore
