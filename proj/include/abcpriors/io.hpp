// Copyright 2026 The abcpriors Authors
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
#include <string>
#include <vector>

namespace abcpriors::io {

/// One numeric value rendered with 17 significant digits ('.' decimal
/// separator), enough to round-trip a double exactly.
std::string format_value(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// RFC-4180-style CSV: header row, comma separator, LF line endings.
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

/// FNV-1a 64-bit digest of a file's bytes, rendered as 16 hex characters.
std::string file_digest(const std::string& path);

}  // namespace abcpriors::io
