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

#include "slicedp/csv.h"

#include <fstream>
#include <ostream>
#include <sstream>

#include "slicedp/errors.h"

namespace slicedp {

std::vector<std::vector<std::string>> ParseCsvRecords(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          Fail(ErrorCode::kDataError,
               "CSV: unexpected quote inside unquoted field at record " +
                   std::to_string(records.size() + 1));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
    ++i;
  }
  if (in_quotes) Fail(ErrorCode::kDataError, "CSV: unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

RawTable ParseCsv(std::string_view text) {
  auto records = ParseCsvRecords(text);
  RawTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    // Tolerate blank lines.
    if (records[r].size() == 1 && records[r][0].empty()) continue;
    if (records[r].size() != table.header.size()) {
      Fail(ErrorCode::kDataError,
           "CSV: row " + std::to_string(r) + " has " +
               std::to_string(records[r].size()) + " fields, header has " +
               std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

RawTable ReadCsvFile(const std::filesystem::path& path) {
  return ParseCsv(ReadTextFile(path));
}

std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void WriteCsv(std::ostream& out, const RawTable& table) {
  auto write_record = [&out](const std::vector<std::string>& record) {
    for (std::size_t i = 0; i < record.size(); ++i) {
      if (i > 0) out << ',';
      out << CsvEscape(record[i]);
    }
    out << '\n';
  };
  write_record(table.header);
  for (const auto& row : table.rows) write_record(row);
}

void WriteCsvFile(const std::filesystem::path& path, const RawTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  WriteCsv(out, table);
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace slicedp
