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

#include "slicedp/schema.h"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "slicedp/errors.h"

namespace slicedp {
namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> ParseDouble(std::string_view text) {
  const std::string trimmed = Trim(text);
  if (trimmed.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = trimmed.data();
  const char* end = begin + trimmed.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

std::optional<std::size_t> ColumnSpec::CategoryIndex(
    std::string_view label) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == label) return i;
  }
  return std::nullopt;
}

void ColumnSchema::Validate() const {
  Require(!columns.empty(), ErrorCode::kInvalidArgument,
          "schema has no columns");
  std::set<std::string> names;
  for (const auto& col : columns) {
    Require(!col.name.empty(), ErrorCode::kInvalidArgument,
            "schema column with empty name");
    Require(names.insert(col.name).second, ErrorCode::kInvalidArgument,
            "duplicate schema column '" + col.name + "'");
    if (col.kind == ColumnKind::kNumerical) {
      Require(std::isfinite(col.min) && std::isfinite(col.max) &&
                  col.min < col.max,
              ErrorCode::kInvalidArgument,
              "column '" + col.name + "': bounds must be finite with min < max");
    } else {
      Require(!col.categories.empty(), ErrorCode::kInvalidArgument,
              "column '" + col.name + "': empty category list");
      std::set<std::string> seen(col.categories.begin(), col.categories.end());
      Require(seen.size() == col.categories.size(),
              ErrorCode::kInvalidArgument,
              "column '" + col.name + "': duplicate categories");
    }
  }
}

std::size_t ColumnSchema::EncodedWidth() const {
  std::size_t width = 0;
  for (const auto& col : columns) width += col.EncodedWidth();
  return width;
}

std::optional<std::size_t> ColumnSchema::Find(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t ColumnSchema::CountOf(ColumnKind kind) const {
  std::size_t count = 0;
  for (const auto& col : columns) count += col.kind == kind ? 1 : 0;
  return count;
}

ColumnSchema ColumnSchema::Parse(std::string_view text) {
  ColumnSchema schema;
  std::string filtered;
  // Drop comments and blank lines before handing the rest to the CSV reader.
  std::istringstream lines{std::string(text)};
  for (std::string line; std::getline(lines, line);) {
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    filtered += line;
    filtered += '\n';
  }
  const auto records = ParseCsvRecords(filtered);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "schema entry " + std::to_string(r + 1);
    Require(rec.size() >= 2, ErrorCode::kInvalidArgument,
            where + ": expected name,kind,...");
    ColumnSpec col;
    col.name = Trim(rec[0]);
    const std::string kind = Trim(rec[1]);
    if (kind == "numerical") {
      col.kind = ColumnKind::kNumerical;
      Require(rec.size() == 4, ErrorCode::kInvalidArgument,
              where + ": numerical columns need min,max");
      const auto lo = ParseDouble(rec[2]);
      const auto hi = ParseDouble(rec[3]);
      Require(lo.has_value() && hi.has_value(), ErrorCode::kInvalidArgument,
              where + ": bounds are not numbers");
      col.min = *lo;
      col.max = *hi;
    } else if (kind == "categorical") {
      col.kind = ColumnKind::kCategorical;
      for (std::size_t i = 2; i < rec.size(); ++i) {
        col.categories.push_back(Trim(rec[i]));
      }
    } else {
      Fail(ErrorCode::kInvalidArgument,
           where + ": unknown column kind '" + kind + "'");
    }
    schema.columns.push_back(std::move(col));
  }
  schema.Validate();
  return schema;
}

ColumnSchema ColumnSchema::Load(const std::filesystem::path& path) {
  return Parse(ReadTextFile(path));
}

std::string ColumnSchema::Serialize() const {
  std::string out;
  for (const auto& col : columns) {
    out += CsvEscape(col.name);
    if (col.kind == ColumnKind::kNumerical) {
      out += ",numerical," + FormatNumber(col.min) + "," +
             FormatNumber(col.max);
    } else {
      out += ",categorical";
      for (const auto& c : col.categories) out += "," + CsvEscape(c);
    }
    out += '\n';
  }
  return out;
}

Table Table::Empty(const ColumnSchema& schema) {
  Table table;
  table.schema = schema;
  table.columns.resize(schema.columns.size());
  return table;
}

Table ParseTable(const RawTable& raw, const ColumnSchema& schema) {
  schema.Validate();
  std::vector<std::string> problems;
  // Map schema columns to CSV positions.
  std::vector<std::size_t> position(schema.columns.size(), SIZE_MAX);
  for (std::size_t c = 0; c < raw.header.size(); ++c) {
    const auto idx = schema.Find(Trim(raw.header[c]));
    if (!idx.has_value()) {
      problems.push_back("column " + std::to_string(c + 1) + " ('" +
                         raw.header[c] + "') is not in the schema");
    } else {
      position[*idx] = c;
    }
  }
  for (std::size_t i = 0; i < schema.columns.size(); ++i) {
    if (position[i] == SIZE_MAX) {
      problems.push_back("schema column '" + schema.columns[i].name +
                         "' missing from header");
    }
  }
  if (!problems.empty()) {
    std::string message = "table does not match schema:";
    for (const auto& p : problems) message += "\n  " + p;
    Fail(ErrorCode::kDataError, message);
  }

  Table table = Table::Empty(schema);
  for (auto& column : table.columns) column.reserve(raw.rows.size());
  constexpr std::size_t kMaxReported = 50;
  std::size_t total_problems = 0;
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
      const ColumnSpec& spec = schema.columns[i];
      const std::string cell = Trim(raw.rows[r][position[i]]);
      const std::string where = "row " + std::to_string(r + 1) + ", column " +
                                std::to_string(position[i] + 1) + " ('" +
                                spec.name + "')";
      double value = 0.0;
      std::string issue;
      if (cell.empty()) {
        issue = "missing value";
      } else if (spec.kind == ColumnKind::kNumerical) {
        const auto parsed = ParseDouble(cell);
        if (!parsed.has_value() || !std::isfinite(*parsed)) {
          issue = "'" + cell + "' is not a finite number";
        } else if (*parsed < spec.min || *parsed > spec.max) {
          issue = "value " + cell + " outside declared bounds [" +
                  FormatNumber(spec.min) + ", " + FormatNumber(spec.max) + "]";
        } else {
          value = *parsed;
        }
      } else {
        const auto idx = spec.CategoryIndex(cell);
        if (!idx.has_value()) {
          issue = "unknown category '" + cell + "'";
        } else {
          value = static_cast<double>(*idx);
        }
      }
      if (!issue.empty()) {
        if (total_problems < kMaxReported) {
          problems.push_back(where + ": " + issue);
        }
        ++total_problems;
      }
      table.columns[i].push_back(value);
    }
  }
  if (total_problems > 0) {
    std::string message = "schema violations (" +
                          std::to_string(total_problems) + "):";
    for (const auto& p : problems) message += "\n  " + p;
    if (total_problems > kMaxReported) message += "\n  ...";
    Fail(ErrorCode::kDataError, message);
  }
  return table;
}

std::string FormatNumber(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

RawTable FormatTable(const Table& table) {
  RawTable raw;
  for (const auto& col : table.schema.columns) raw.header.push_back(col.name);
  raw.rows.resize(table.num_rows());
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    auto& row = raw.rows[r];
    row.reserve(table.columns.size());
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      const ColumnSpec& spec = table.schema.columns[i];
      const double v = table.columns[i][r];
      if (spec.kind == ColumnKind::kNumerical) {
        row.push_back(FormatNumber(v));
      } else {
        row.push_back(spec.categories.at(static_cast<std::size_t>(v)));
      }
    }
  }
  return raw;
}

}  // namespace slicedp
