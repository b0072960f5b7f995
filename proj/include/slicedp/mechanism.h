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

// Table encoding, Poisson subsampling and the slicing privacy mechanism
//
//   M(X) = (U, XU + V),  U_ij ~ N(0, 1/d),  V_ij ~ N(0, sigma^2),
//
// applied to an encoded table X whose rows have 2-norm at most 1.

#ifndef SLICEDP_MECHANISM_H_
#define SLICEDP_MECHANISM_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "slicedp/accounting.h"
#include "slicedp/csv.h"
#include "slicedp/matrix.h"
#include "slicedp/schema.h"

namespace slicedp {

struct ColumnBlock {
  std::size_t offset = 0;
  std::size_t width = 0;
};

// Maps schema columns to blocks of encoded matrix columns.
struct Encoding {
  ColumnSchema schema;
  std::vector<ColumnBlock> blocks;
  std::size_t width = 0;
  double row_scale = 1.0;  // 1 / sqrt(width)

  static Encoding ForSchema(const ColumnSchema& schema);
};

// Private data in encoded form. Every entry lies in [0, row_scale], so every
// row has 2-norm at most 1.
struct EncodedMatrix {
  Matrix data;
  Encoding encoding;
  // Set when rows were Poisson-subsampled; part of the accounting trail.
  std::optional<double> subsample_rate;
};

// Numerical v -> (v - min) / (max - min); categorical -> one-hot block; then
// everything is multiplied by 1 / sqrt(encoded width).
EncodedMatrix Encode(const Table& table);
EncodedMatrix Encode(const RawTable& raw, const ColumnSchema& schema);

// Inverse of Encode for arbitrary real rows (e.g. generator output):
// numerical entries are rescaled and clipped to their bounds, categorical
// blocks are decoded by argmax (first maximum wins).
Table Decode(const Matrix& rows, const Encoding& encoding);

// Keeps each row independently with probability `rate`, preserving order.
EncodedMatrix PoissonSubsample(const EncodedMatrix& matrix, double rate,
                               std::uint64_t seed);

// Output of the mechanism. The raw data never enters this structure.
struct SliceBundle {
  Matrix projections;  // U, d x m'
  Matrix noisy;        // O = XU + V, n x m'
  double sigma = 0.0;
  MechanismDims dims;
  std::uint64_t seed = 0;

  std::size_t num_records() const { return noisy.rows(); }
  bool operator==(const SliceBundle&) const = default;
};

// Column j of U is drawn from stream ("U", j) and column j of V from
// ("V", j), so the result is bit-identical for any thread count.
SliceBundle ApplyMechanism(const EncodedMatrix& x, const MechanismDims& dims,
                           double sigma, std::uint64_t seed, int threads = 1);

// One slice: theta (d x k) and the matching projections (rows x k).
struct Slice {
  Matrix theta;
  Matrix proj;
};

// Slice s holds columns [s k, (s + 1) k) of U and O.
std::vector<Slice> SlicesView(const SliceBundle& bundle);

// Bundle file layout (all integers and floats little-endian):
//
//   offset  size  field
//        0     8  magic "SLDPBNDL"
//        8     4  u32 format version (1)
//       12     4  u32 reserved (0)
//       16     8  u64 d
//       24     8  u64 k
//       32     8  u64 m
//       40     8  u64 n (records)
//       48     8  f64 sigma
//       56     8  u64 seed
//       64        U: d * m' f64, row-major
//                 O: n * m' f64, row-major
inline constexpr std::uint32_t kBundleFormatVersion = 1;

void WriteBundle(std::ostream& out, const SliceBundle& bundle);
SliceBundle ReadBundle(std::istream& in);
void SaveBundle(const std::filesystem::path& path, const SliceBundle& bundle);
SliceBundle LoadBundle(const std::filesystem::path& path);

}  // namespace slicedp

#endif  // SLICEDP_MECHANISM_H_
