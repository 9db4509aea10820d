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

#include <filesystem>
#include <string>
#include <string_view>

namespace cellstore::detail {

/// Throws IoError.
std::string read_file(const std::filesystem::path& path);
void fsync_path(const std::filesystem::path& path, bool directory);
/// Write to a temporary, fsync, rename over `path`, fsync the directory.
/// Throws IoError or StorageFull.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace cellstore::detail
