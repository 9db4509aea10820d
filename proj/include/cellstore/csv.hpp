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

#include <string>
#include <string_view>
#include <vector>

namespace cellstore::csv {

using Row = std::vector<std::string>;

/// RFC 4180: comma separated, CRLF or LF line ends, double-quoted fields may
/// contain separators, line breaks and doubled quotes. Throws ParseError
/// with the physical line number of an unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it needs it.
std::string escape(std::string_view field);
std::string format_row(const Row& row);

}  // namespace cellstore::csv
