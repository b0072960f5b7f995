// Copyright 2026 The slicedp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SLICEDP_CSV_H_
#define SLICEDP_CSV_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace slicedp {

// A CSV document as read from disk: one header row plus string cells.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180 style: comma separated, fields optionally enclosed in double
// quotes, embedded quotes doubled, CRLF or LF line endings.
std::vector<std::vector<std::string>> ParseCsvRecords(std::string_view text);

// First record becomes the header. Throws Error(kDataError) on ragged rows.
RawTable ParseCsv(std::string_view text);
RawTable ReadCsvFile(const std::filesystem::path& path);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string CsvEscape(std::string_view field);
void WriteCsv(std::ostream& out, const RawTable& table);
void WriteCsvFile(const std::filesystem::path& path, const RawTable& table);

std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace slicedp

#endif  // SLICEDP_CSV_H_
