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

#include "cellstore/store.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "cellstore/detail/fs_util.hpp"
#include "cellstore/detail/gas_state.hpp"
#include "cellstore/error.hpp"

namespace cellstore {

namespace fs = std::filesystem;
using detail::GasState;
using detail::fsync_path;
using detail::read_file;
using detail::write_file_atomic;
using detail::SlotId;

// ---------------------------------------------------------------------------
// Config and reports

Json StoreConfig::to_json() const {
  Json types = Json::object();
  for (const auto& [dim, kind] : dimension_types) types[dim] = std::string(cellstore::to_string(kind));
  return Json{{"formatVersion", 1},
              {"rangeIndexed", range_indexed},
              {"dimensionTypes", types},
              {"resultCap", result_cap},
              {"segmentBytes", segment_bytes}};
}

StoreConfig StoreConfig::from_json(const Json& doc) {
  if (!doc.is_object()) fail(ErrorCode::ParseError, "store config must be a JSON object");
  StoreConfig c;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& k = it.key();
    const auto& v = it.value();
    if (k == "formatVersion") continue;
    if (k == "rangeIndexed") {
      for (const auto& d : v) c.range_indexed.emplace_back(require_string(d, "rangeIndexed entry"));
    } else if (k == "dimensionTypes") {
      for (auto t = v.begin(); t != v.end(); ++t) {
        auto kind = parse_kind(require_string(t.value(), "dimension type"));
        if (!kind) fail(ErrorCode::ParseError, "unknown dimension type for " + t.key());
        c.dimension_types[t.key()] = *kind;
      }
    } else if (k == "resultCap") {
      c.result_cap = v.get<std::size_t>();
    } else if (k == "segmentBytes") {
      c.segment_bytes = v.get<std::uint64_t>();
    } else {
      fail(ErrorCode::ParseError, "unknown store config member '" + k + "'");
    }
  }
  return c;
}

Json IngestReport::to_json() const {
  Json rej = Json::array();
  for (const auto& r : rejected) rej.push_back(Json{{"record", r.record}, {"violation", r.violation}});
  return Json{{"accepted", accepted},
              {"collisions", collisions},
              {"identicalDuplicates", identical_duplicates},
              {"rejected", rej}};
}

// ---------------------------------------------------------------------------
// Segment record codec:  u32 length | u32 crc32(payload) | payload
// payload: u64 seq | str source | u16 n | n x (str name, u8 kind, str value) |
//          u8 kind | str value          (str = u32 length + bytes)

namespace {

void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }
void put_u16(std::string& out, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_str(std::string& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  bool done() const { return pos_ == data_.size(); }
  std::uint64_t uint(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  std::string_view str() {
    auto n = static_cast<std::size_t>(uint(4));
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) fail(ErrorCode::CorruptRecord, "truncated segment record");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

void encode_record(std::string& out, const Cell& cell, std::uint64_t seq, std::string_view source) {
  std::string payload;
  put_u64(payload, seq);
  put_str(payload, source);
  put_u16(payload, static_cast<std::uint16_t>(cell.aspects.size()));
  for (const auto& [name, value] : cell.aspects) {
    put_str(payload, name);
    put_u8(payload, static_cast<std::uint8_t>(value.kind()));
    put_str(payload, value.canonical());
  }
  put_u8(payload, static_cast<std::uint8_t>(cell.value.kind()));
  put_str(payload, cell.value.canonical());
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  put_u32(out, static_cast<std::uint32_t>(crc32(0, reinterpret_cast<const Bytef*>(payload.data()),
                                                static_cast<uInt>(payload.size()))));
  out += payload;
}

ValueKind checked_kind(std::uint64_t raw) {
  if (raw > static_cast<std::uint64_t>(ValueKind::Boolean)) fail(ErrorCode::CorruptRecord, "bad value kind");
  return static_cast<ValueKind>(raw);
}

struct DecodedRecord {
  Cell cell;
  std::uint64_t seq;
  std::string source;
};

DecodedRecord decode_record(std::string_view payload) {
  Reader r(payload);
  DecodedRecord d;
  d.seq = r.uint(8);
  d.source = std::string(r.str());
  const auto n = r.uint(2);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string name(r.str());
    auto kind = checked_kind(r.uint(1));
    d.cell.aspects.emplace(std::move(name), AspectValue::parse(kind, r.str()));
  }
  auto kind = checked_kind(r.uint(1));
  d.cell.value = AspectValue::parse(kind, r.str());
  if (!r.done()) fail(ErrorCode::CorruptRecord, "trailing bytes in segment record");
  return d;
}

std::string segment_name(int number) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d.seg", number);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

struct CellGas::Impl {
  struct Segment {
    std::string file;
    std::uint64_t bytes = 0;
  };

  StoreConfig config;
  std::optional<fs::path> dir;
  mutable std::shared_mutex state_mu;
  std::mutex writer_mu;
  GasState state;
  std::vector<Segment> segments;
  int next_segment = 0;
  bool tail_checked = false;

  fs::path segment_dir() const { return *dir / "segments"; }

  void init_state() {
    state = GasState{};
    state.range_dimensions = config.range_indexed;
  }

  void write_manifest() {
    Json segs = Json::array();
    for (const auto& s : segments) segs.push_back(Json{{"file", s.file}, {"bytes", s.bytes}});
    Json doc{{"formatVersion", 1},
             {"segments", segs},
             {"nextSegment", next_segment},
             {"nextSeq", state.next_seq}};
    write_file_atomic(*dir / "MANIFEST", dump_json(doc, 2));
  }

  void load() {
    const fs::path manifest = *dir / "MANIFEST";
    if (!fs::exists(manifest)) return;
    Json doc = parse_json(read_file(manifest));
    next_segment = doc.value("nextSegment", 0);
    for (const auto& s : doc.at("segments")) {
      segments.push_back({s.at("file").get<std::string>(), s.at("bytes").get<std::uint64_t>()});
    }
    for (const auto& seg : segments) {
      std::string data = read_file(segment_dir() / seg.file);
      if (data.size() < seg.bytes) fail(ErrorCode::CorruptRecord, "segment " + seg.file + " shorter than manifest");
      // Bytes past the committed length belong to an unfinished batch.
      Reader r(std::string_view(data).substr(0, seg.bytes));
      while (!r.done()) {
        const auto len = static_cast<std::size_t>(r.uint(4));
        const auto crc = static_cast<std::uint32_t>(r.uint(4));
        auto payload = r.take(len);
        const auto actual = static_cast<std::uint32_t>(
            crc32(0, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
        if (actual != crc) fail(ErrorCode::CorruptRecord, "checksum mismatch in segment " + seg.file);
        auto rec = decode_record(payload);
        state.append(rec.cell, rec.seq, state.intern_source(rec.source));
      }
    }
    state.next_seq = std::max<std::uint64_t>(state.next_seq, doc.value("nextSeq", std::uint64_t{1}));
    state.prune_postings();
  }

  /// Appends `bytes` durably to the tail segment, rotating when it is full.
  void append_durable(std::string_view bytes) {
    fs::create_directories(segment_dir());
    if (segments.empty() || segments.back().bytes >= config.segment_bytes) {
      segments.push_back({segment_name(next_segment++), 0});
      tail_checked = true;
    }
    auto& seg = segments.back();
    const fs::path path = segment_dir() / seg.file;
    int fd = ::open(path.c_str(), O_WRONLY | O_CREAT, 0644);
    if (fd < 0) fail(ErrorCode::IoError, "cannot open " + path.string() + ": " + std::strerror(errno));
    // Discard any torn tail left by an interrupted batch.
    if (::ftruncate(fd, static_cast<off_t>(seg.bytes)) != 0 || ::lseek(fd, static_cast<off_t>(seg.bytes), SEEK_SET) < 0) {
      ::close(fd);
      fail(ErrorCode::IoError, "cannot position " + path.string());
    }
    std::size_t off = 0;
    while (off < bytes.size()) {
      auto n = ::write(fd, bytes.data() + off, bytes.size() - off);
      if (n < 0) {
        const int err = errno;
        [[maybe_unused]] int rc = ::ftruncate(fd, static_cast<off_t>(seg.bytes));
        ::close(fd);
        fail(err == ENOSPC ? ErrorCode::StorageFull : ErrorCode::IoError,
             "append to " + path.string() + ": " + std::strerror(err));
      }
      off += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0) {
      ::close(fd);
      fail(ErrorCode::IoError, "fsync " + path.string());
    }
    ::close(fd);
    seg.bytes += bytes.size();
  }
};

CellGas::CellGas(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
CellGas::CellGas(CellGas&&) noexcept = default;
CellGas& CellGas::operator=(CellGas&&) noexcept = default;
CellGas::~CellGas() = default;

CellGas CellGas::in_memory(StoreConfig config) {
  auto impl = std::make_unique<Impl>();
  impl->config = std::move(config);
  impl->init_state();
  return CellGas(std::move(impl));
}

CellGas CellGas::open(const fs::path& dir, std::optional<StoreConfig> config) {
  auto impl = std::make_unique<Impl>();
  impl->dir = dir;
  fs::create_directories(dir);
  const fs::path config_path = dir / "config.json";
  if (fs::exists(config_path)) {
    impl->config = StoreConfig::from_json(parse_json(read_file(config_path)));
  } else {
    impl->config = config.value_or(StoreConfig{});
    write_file_atomic(config_path, dump_json(impl->config.to_json(), 2));
  }
  impl->init_state();
  impl->load();
  return CellGas(std::move(impl));
}

const StoreConfig& CellGas::config() const { return impl_->config; }

std::optional<fs::path> CellGas::directory() const { return impl_->dir; }

Snapshot CellGas::snapshot() const {
  return Snapshot(std::shared_lock(impl_->state_mu), &impl_->state, &impl_->config);
}

IngestReport CellGas::ingest(std::span<const Cell> records, std::string_view source) {
  std::lock_guard writer(impl_->writer_mu);
  GasState& state = impl_->state;
  IngestReport report;

  // Classification reads state without the state lock: only the writer
  // (us) mutates it.
  std::vector<const Cell*> batch;
  std::unordered_map<std::string, std::size_t> batch_latest;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Cell& cell = records[i];
    auto violations = validate_cell(cell);
    if (!violations.empty()) {
      std::string msg;
      for (const auto& v : violations) {
        if (!msg.empty()) msg += "; ";
        msg += std::string(to_string(v.kind)) + (v.dimension.empty() ? "" : " (" + v.dimension + ")");
      }
      report.rejected.push_back({i + 1, msg});
      continue;
    }
    auto key = canonical_key(cell.aspects);
    const AspectValue* current = nullptr;
    auto found = batch_latest.find(key.bytes());
    if (found != batch_latest.end()) {
      current = &batch[found->second]->value;
    } else if (auto refs = state.resolve(cell.aspects)) {
      SlotId slot = state.find_live(*refs);
      if (slot != detail::kNoSlot) current = &state.slots[slot].value;
    }
    if (current != nullptr && *current == cell.value) {
      ++report.identical_duplicates;
      continue;
    }
    if (current != nullptr) ++report.collisions;
    else ++report.accepted;
    batch_latest.insert_or_assign(key.bytes(), batch.size());
    batch.push_back(&cell);
  }
  if (batch.empty()) return report;

  const std::uint64_t first_seq = state.next_seq;
  if (impl_->dir) {
    std::string bytes;
    for (std::size_t i = 0; i < batch.size(); ++i) encode_record(bytes, *batch[i], first_seq + i, source);
    impl_->append_durable(bytes);
  }

  {
    std::unique_lock publish(impl_->state_mu);
    const auto source_id = state.intern_source(source);
    for (std::size_t i = 0; i < batch.size(); ++i) state.append(*batch[i], first_seq + i, source_id);
    state.maybe_prune_postings();
  }
  if (impl_->dir) impl_->write_manifest();
  return report;
}

void CellGas::compact() {
  std::lock_guard writer(impl_->writer_mu);
  GasState& state = impl_->state;
  GasState fresh;
  fresh.range_dimensions = impl_->config.range_indexed;
  fresh.next_seq = state.next_seq;
  std::string bytes;
  for (SlotId s = 0; s < state.slots.size(); ++s) {
    if (!state.slots[s].live) continue;
    Cell c = state.to_cell(s);
    fresh.append(c, c.ingested_at, fresh.intern_source(c.source));
    if (impl_->dir) encode_record(bytes, c, c.ingested_at, c.source);
  }
  if (impl_->dir) {
    auto old = std::move(impl_->segments);
    impl_->segments.clear();
    if (!bytes.empty()) impl_->append_durable(bytes);
    impl_->write_manifest();
    for (const auto& seg : old) {
      std::error_code ec;
      fs::remove(impl_->segment_dir() / seg.file, ec);
    }
  }
  std::unique_lock publish(impl_->state_mu);
  state = std::move(fresh);
}

// ---------------------------------------------------------------------------
// Snapshot

namespace {

std::vector<std::uint64_t> live_seqs(const GasState& state, std::span<const SlotId> slots) {
  std::vector<std::uint64_t> out;
  out.reserve(slots.size());
  for (SlotId s : slots) {
    if (state.slots[s].live) out.push_back(state.slots[s].seq);
  }
  return out;
}

}  // namespace

std::optional<Cell> Snapshot::point_query(const Aspects& aspects) const {
  if (aspects.find(kConceptDimension) == aspects.end()) {
    fail(ErrorCode::MissingConcept, "point query needs a Concept aspect");
  }
  auto refs = state_->resolve(aspects);
  if (!refs) return std::nullopt;
  SlotId slot = state_->find_live(*refs);
  if (slot == detail::kNoSlot) return std::nullopt;
  return state_->to_cell(slot);
}

std::vector<std::uint64_t> Snapshot::postings_lookup(std::string_view dimension, const AspectValue& value) const {
  auto d = state_->find_dim(dimension);
  if (!d) return {};
  auto v = state_->find_value(*d, value);
  if (!v) return {};
  return live_seqs(*state_, state_->dims[*d].postings[*v]);
}

std::vector<std::uint64_t> Snapshot::range_lookup(std::string_view dimension, const Interval& range) const {
  const auto& ranged = config_->range_indexed;
  if (std::find(ranged.begin(), ranged.end(), dimension) == ranged.end()) {
    fail(ErrorCode::NoRangeIndex, "dimension '" + std::string(dimension) + "' has no range index");
  }
  const auto kind = range.kind();  // throws KindMismatch
  auto d = state_->find_dim(dimension);
  if (!d || range.is_empty()) return {};
  const auto& index = *state_->dims[*d].range;
  std::vector<std::span<const SlotId>> lists;
  auto it = range.low ? index.lower_bound(*range.low)
                      : (kind ? index.lower_bound(KindFloor{*kind}) : index.begin());
  for (; it != index.end(); ++it) {
    if (kind && it->first.kind() != *kind) break;
    if (!range.contains(it->first)) {
      if (range.high && it->first.compare(*range.high) > 0) break;
      continue;  // open low bound
    }
    lists.emplace_back(state_->dims[*d].postings[it->second]);
  }
  if (lists.empty()) return {};
  auto slots = kernels::union_sorted(lists);
  return live_seqs(*state_, slots);
}

std::optional<Cell> Snapshot::cell(std::uint64_t id) const {
  auto slot = state_->slot_of_seq(id);
  if (!slot || !state_->slots[*slot].live) return std::nullopt;
  return state_->to_cell(*slot);
}

std::vector<Cell> Snapshot::live_cells() const {
  std::vector<Cell> out;
  out.reserve(state_->live_count);
  for (SlotId s = 0; s < state_->slots.size(); ++s) {
    if (state_->slots[s].live) out.push_back(state_->to_cell(s));
  }
  return out;
}

std::size_t Snapshot::live_count() const { return state_->live_count; }

std::vector<Cell> Snapshot::history(const Aspects& aspects) const {
  std::vector<Cell> out;
  auto refs = state_->resolve(aspects);
  if (!refs) return out;
  for (SlotId s = state_->find_live(*refs); s != detail::kNoSlot; s = state_->slots[s].prev) {
    out.push_back(state_->to_cell(s));
  }
  return out;
}

std::uint64_t Snapshot::sequence() const { return state_->next_seq - 1; }

std::vector<std::uint64_t> postings_intersect(const std::vector<std::vector<std::uint64_t>>& lists) {
  std::vector<std::span<const std::uint64_t>> spans(lists.begin(), lists.end());
  return kernels::intersect_all(std::move(spans));
}

}  // namespace cellstore
