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

#include "cellstore/detail/gas_state.hpp"

#include <algorithm>

#include "cellstore/error.hpp"

namespace cellstore::detail {

namespace {

std::uint64_t mix(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t GasState::hash_refs(std::span<const AspectRef> refs) noexcept {
  std::uint64_t h = refs.size();
  for (const auto& r : refs) h = mix(h ^ ((static_cast<std::uint64_t>(r.dim) << 32) | r.value));
  return h;
}

std::optional<std::uint32_t> GasState::find_dim(std::string_view name) const {
  auto it = dim_ids.find(std::string(name));
  if (it == dim_ids.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> GasState::find_value(std::uint32_t dim, const AspectValue& value) const {
  const auto& ids = dims[dim].value_ids;
  auto it = ids.find(value);
  if (it == ids.end()) return std::nullopt;
  return it->second;
}

std::optional<std::vector<AspectRef>> GasState::resolve(const Aspects& aspects) const {
  std::vector<AspectRef> out;
  out.reserve(aspects.size());
  for (const auto& [name, value] : aspects) {
    auto d = find_dim(name);
    if (!d) return std::nullopt;
    auto v = find_value(*d, value);
    if (!v) return std::nullopt;
    out.push_back({*d, *v});
  }
  std::sort(out.begin(), out.end(), [](const AspectRef& a, const AspectRef& b) { return a.dim < b.dim; });
  return out;
}

SlotId GasState::find_live(std::span<const AspectRef> sorted_refs) const {
  auto [lo, hi] = live_index.equal_range(hash_refs(sorted_refs));
  for (auto it = lo; it != hi; ++it) {
    auto r = refs_of(it->second);
    if (std::equal(r.begin(), r.end(), sorted_refs.begin(), sorted_refs.end())) return it->second;
  }
  return kNoSlot;
}

std::optional<SlotId> GasState::slot_of_seq(std::uint64_t seq) const {
  // Slots are ordered by seq; without compaction they are dense.
  if (seq >= 1 && seq - 1 < slots.size() && slots[seq - 1].seq == seq) return static_cast<SlotId>(seq - 1);
  auto it = std::lower_bound(slots.begin(), slots.end(), seq,
                             [](const Slot& s, std::uint64_t v) { return s.seq < v; });
  if (it == slots.end() || it->seq != seq) return std::nullopt;
  return static_cast<SlotId>(it - slots.begin());
}

Aspects GasState::aspects_of(SlotId slot) const {
  Aspects out;
  for (const auto& r : refs_of(slot)) out.emplace(dims[r.dim].name, dims[r.dim].values[r.value]);
  return out;
}

Cell GasState::to_cell(SlotId slot) const {
  Cell c;
  c.aspects = aspects_of(slot);
  c.value = slots[slot].value;
  c.ingested_at = slots[slot].seq;
  c.source = sources[slots[slot].source];
  return c;
}

std::uint32_t GasState::intern_source(std::string_view source) {
  auto [it, inserted] = source_ids.try_emplace(std::string(source), static_cast<std::uint32_t>(sources.size()));
  if (inserted) sources.emplace_back(source);
  return it->second;
}

std::uint32_t GasState::intern_dim(const std::string& name) {
  auto [it, inserted] = dim_ids.try_emplace(name, static_cast<std::uint32_t>(dims.size()));
  if (inserted) {
    dims.emplace_back();
    dims.back().name = name;
    if (std::find(range_dimensions.begin(), range_dimensions.end(), name) != range_dimensions.end()) {
      enable_range_index(it->second);
    }
  }
  return it->second;
}

std::uint32_t GasState::intern_value(std::uint32_t dim, const AspectValue& value) {
  auto& d = dims[dim];
  auto [it, inserted] = d.value_ids.try_emplace(value, static_cast<std::uint32_t>(d.values.size()));
  if (inserted) {
    d.values.push_back(value);
    d.postings.emplace_back();
    if (d.range) d.range->emplace(value, it->second);
  }
  return it->second;
}

void GasState::enable_range_index(std::uint32_t dim) {
  auto& d = dims[dim];
  if (d.range) return;
  d.range.emplace();
  for (std::uint32_t i = 0; i < d.values.size(); ++i) d.range->emplace(d.values[i], i);
}

SlotId GasState::append(const Cell& cell, std::uint64_t seq, std::uint32_t source_id) {
  const auto slot = static_cast<SlotId>(slots.size());
  const auto first = static_cast<std::uint32_t>(refs.size());
  for (const auto& [name, value] : cell.aspects) {
    const auto d = intern_dim(name);
    refs.push_back({d, intern_value(d, value)});
  }
  std::sort(refs.begin() + first, refs.end(), [](const AspectRef& a, const AspectRef& b) { return a.dim < b.dim; });

  Slot s;
  s.seq = seq;
  s.first_ref = first;
  s.ref_count = static_cast<std::uint16_t>(cell.aspects.size());
  s.live = true;
  s.source = source_id;
  s.value = cell.value;
  slots.push_back(std::move(s));

  auto my_refs = refs_of(slot);
  const auto hash = hash_refs(my_refs);
  auto [lo, hi] = live_index.equal_range(hash);
  for (auto it = lo; it != hi; ++it) {
    auto r = refs_of(it->second);
    if (std::equal(r.begin(), r.end(), my_refs.begin(), my_refs.end())) {
      slots[it->second].live = false;
      slots[slot].prev = it->second;
      stale_postings += r.size();
      live_index.erase(it);
      --live_count;
      break;
    }
  }
  live_index.emplace(hash, slot);
  ++live_count;
  for (const auto& r : my_refs) {
    dims[r.dim].postings[r.value].push_back(slot);
    dims[r.dim].carriers.push_back(slot);
  }
  next_seq = std::max(next_seq, seq + 1);
  return slot;
}

void GasState::maybe_prune_postings() {
  if (stale_postings > 1024 && stale_postings * 4 > refs.size()) prune_postings();
}

void GasState::prune_postings() {
  auto live = [&](SlotId s) { return slots[s].live; };
  for (auto& d : dims) {
    for (auto& p : d.postings) std::erase_if(p, [&](SlotId s) { return !live(s); });
    std::erase_if(d.carriers, [&](SlotId s) { return !live(s); });
  }
  stale_postings = 0;
}

}  // namespace cellstore::detail
