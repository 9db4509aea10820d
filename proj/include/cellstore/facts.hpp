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

// Fact files: one JSON object per line,
//
//   {"Aspects": {"Concept": "Assets", "Period": "2012-09-30", ...},
//    "Value": 4000000000}
//
// Strings are text unless typed by the store config's dimension types or by
// an optional "Aspects:types" member ({"Period": "date"}). "Value:type" does
// the same for the value. Numbers are exact decimals.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "cellstore/hypercube.hpp"
#include "cellstore/store.hpp"

namespace cellstore {

/// Decodes one fact line. Throws ParseError or BadCanonicalForm.
Cell parse_fact(std::string_view line, const StoreConfig& config = {});
/// Sidecars are written only where the config would not recover the kind.
std::string format_fact(const Cell& cell, const StoreConfig& config = {});

/// Ingests a fact stream in bounded batches. Malformed lines are rejected
/// with their line number; blank lines are skipped.
IngestReport import_facts(CellGas& gas, std::istream& in, std::string_view source);
IngestReport import_facts(CellGas& gas, const std::filesystem::path& path);

/// Writes the live cells (optionally only those inside `cube`, unadjusted)
/// in id order. Returns the number written.
std::size_t export_facts(const Snapshot& snapshot, std::ostream& out, const std::optional<Hypercube>& cube = {});
std::size_t export_facts(const Snapshot& snapshot, const std::filesystem::path& path,
                         const std::optional<Hypercube>& cube = {});

}  // namespace cellstore
