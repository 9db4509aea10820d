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

// In-memory index structures of a cell gas. Shared by the store and the
// hypercube engine; not part of the public API.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cellstore/cell.hpp"
#include "cellstore/kernels.hpp"

namespace cellstore::detail {

using kernels::SlotId;
using kernels::SlotList;

inline constexpr SlotId kNoSlot = 0xFFFFFFFFu;

/// One interned (dimension, value) coordinate.
struct AspectRef {
  std::uint32_t dim;
  std::uint32_t value;
  friend bool operator==(const AspectRef&, const AspectRef&) = default;
};

/// One ingested version of a cell. Slots are append-only and ordered by seq.
struct Slot {
  std::uint64_t seq = 0;
  std::uint32_t first_ref = 0;
  std::uint16_t ref_count = 0;
  bool live = false;
  std::uint32_t source = 0;
  SlotId prev = kNoSlot;  // version this one superseded
  AspectValue value;
};

struct DimensionIndex {
  std::string name;
  std::vector<AspectValue> values;  // value id -> value
  std::unordered_map<AspectValue, std::uint32_t> value_ids;
  /// value id -> ascending slots carrying it. May hold superseded slots;
  /// readers filter with Slot::live.
  std::vector<SlotList> postings;
  /// Every slot carrying this dimension (same liveness caveat).
  SlotList carriers;
  /// Present when the dimension is range-indexed: value -> value id.
  std::optional<std::map<AspectValue, std::uint32_t, KindThenValueLess>> range;
};

struct GasState {
  std::vector<DimensionIndex> dims;
  std::unordered_map<std::string, std::uint32_t> dim_ids;
  std::vector<AspectRef> refs;  // arena; each slot's refs sorted by dim id
  std::vector<Slot> slots;
  std::vector<std::string> sources;
  std::unordered_map<std::string, std::uint32_t> source_ids;
  /// key hash -> live slot. Hash collisions are resolved by comparing refs.
  std::unordered_multimap<std::uint64_t, SlotId> live_index;
  std::size_t live_count = 0;
  std::size_t stale_postings = 0;
  std::uint64_t next_seq = 1;
  /// Dimensions that get a range index when first interned.
  std::vector<std::string> range_dimensions;

  std::span<const AspectRef> refs_of(SlotId slot) const {
    const Slot& s = slots[slot];
    return {refs.data() + s.first_ref, s.ref_count};
  }

  std::optional<std::uint32_t> find_dim(std::string_view name) const;
  std::optional<std::uint32_t> find_value(std::uint32_t dim, const AspectValue& value) const;

  /// Resolves an aspect map to sorted refs; nullopt if any coordinate was
  /// never seen (so no cell can carry it).
  std::optional<std::vector<AspectRef>> resolve(const Aspects& aspects) const;

  SlotId find_live(std::span<const AspectRef> sorted_refs) const;
  std::optional<SlotId> slot_of_seq(std::uint64_t seq) const;

  Cell to_cell(SlotId slot) const;
  Aspects aspects_of(SlotId slot) const;

  /// Interns a cell and makes it the live version of its key.
  /// Returns the new slot. Caller guarantees seq > every existing seq.
  SlotId append(const Cell& cell, std::uint64_t seq, std::uint32_t source_id);
  std::uint32_t intern_source(std::string_view source);

  void enable_range_index(std::uint32_t dim);
  /// Drops superseded slots from postings once they make up a large share.
  void maybe_prune_postings();
  void prune_postings();

  static std::uint64_t hash_refs(std::span<const AspectRef> refs) noexcept;

 private:
  std::uint32_t intern_dim(const std::string& name);
  std::uint32_t intern_value(std::uint32_t dim, const AspectValue& value);
};

}  // namespace cellstore::detail
