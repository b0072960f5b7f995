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

// Public column metadata and schema-typed tables.
//
// Schema files hold one column per line as a CSV record:
//
//   # comment
//   age,numerical,17,90
//   sex,categorical,female,male
//
// Numerical bounds and category lists are treated as public knowledge; they
// are never derived from the private data.

#ifndef SLICEDP_SCHEMA_H_
#define SLICEDP_SCHEMA_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slicedp/csv.h"

namespace slicedp {

enum class ColumnKind { kNumerical, kCategorical };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumerical;
  double min = 0.0;
  double max = 1.0;
  std::vector<std::string> categories;

  std::size_t EncodedWidth() const {
    return kind == ColumnKind::kNumerical ? 1 : categories.size();
  }
  std::optional<std::size_t> CategoryIndex(std::string_view label) const;

  bool operator==(const ColumnSpec&) const = default;
};

struct ColumnSchema {
  std::vector<ColumnSpec> columns;

  // Throws Error(kInvalidArgument): empty schema, duplicate names,
  // non-finite or inverted bounds, empty or duplicated category lists.
  void Validate() const;
  std::size_t EncodedWidth() const;
  std::optional<std::size_t> Find(std::string_view name) const;
  std::size_t CountOf(ColumnKind kind) const;

  static ColumnSchema Parse(std::string_view text);
  static ColumnSchema Load(const std::filesystem::path& path);
  std::string Serialize() const;

  bool operator==(const ColumnSchema&) const = default;
};

// A table aligned with a schema. Numerical columns hold values; categorical
// columns hold category indices (as doubles) into ColumnSpec::categories.
struct Table {
  ColumnSchema schema;
  std::vector<std::vector<double>> columns;

  std::size_t num_rows() const {
    return columns.empty() ? 0 : columns.front().size();
  }
  static Table Empty(const ColumnSchema& schema);
};

// Validates every cell against the schema. All violations are collected and
// reported together with 1-based row and column coordinates in a single
// Error(kDataError).
Table ParseTable(const RawTable& raw, const ColumnSchema& schema);

// Numbers are written in shortest round-trip form.
RawTable FormatTable(const Table& table);

std::string FormatNumber(double value);

}  // namespace slicedp

#endif  // SLICEDP_SCHEMA_H_
