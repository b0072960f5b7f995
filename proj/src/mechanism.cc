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

#include "slicedp/mechanism.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "binary_io.h"
#include "slicedp/errors.h"
#include "slicedp/parallel.h"
#include "slicedp/rng.h"
#include "slicedp/simd/kernels.h"

namespace slicedp {

constexpr char kBundleMagic[] = "SLDPBNDL";

Encoding Encoding::ForSchema(const ColumnSchema& schema) {
  schema.Validate();
  Encoding enc;
  enc.schema = schema;
  for (const auto& col : schema.columns) {
    enc.blocks.push_back({enc.width, col.EncodedWidth()});
    enc.width += col.EncodedWidth();
  }
  enc.row_scale = 1.0 / std::sqrt(static_cast<double>(enc.width));
  return enc;
}

EncodedMatrix Encode(const Table& table) {
  EncodedMatrix out;
  out.encoding = Encoding::ForSchema(table.schema);
  const Encoding& enc = out.encoding;
  Require(table.columns.size() == enc.schema.columns.size(),
          ErrorCode::kInvalidArgument, "Encode: column count mismatch");
  const std::size_t n = table.num_rows();
  out.data = Matrix(n, enc.width, 0.0);
  for (std::size_t i = 0; i < enc.schema.columns.size(); ++i) {
    const ColumnSpec& spec = enc.schema.columns[i];
    const ColumnBlock& block = enc.blocks[i];
    const auto& values = table.columns[i];
    Require(values.size() == n, ErrorCode::kInvalidArgument,
            "Encode: ragged table");
    for (std::size_t r = 0; r < n; ++r) {
      const double v = values[r];
      if (spec.kind == ColumnKind::kNumerical) {
        Require(v >= spec.min && v <= spec.max, ErrorCode::kDataError,
                "row " + std::to_string(r + 1) + ", column '" + spec.name +
                    "': value outside declared bounds");
        out.data(r, block.offset) =
            (v - spec.min) / (spec.max - spec.min) * enc.row_scale;
      } else {
        const auto code = static_cast<std::size_t>(v);
        Require(v >= 0.0 && code < spec.categories.size() &&
                    static_cast<double>(code) == v,
                ErrorCode::kDataError,
                "row " + std::to_string(r + 1) + ", column '" + spec.name +
                    "': invalid category index");
        out.data(r, block.offset + code) = enc.row_scale;
      }
    }
  }
  return out;
}

EncodedMatrix Encode(const RawTable& raw, const ColumnSchema& schema) {
  return Encode(ParseTable(raw, schema));
}

Table Decode(const Matrix& rows, const Encoding& encoding) {
  Require(rows.cols() == encoding.width, ErrorCode::kInvalidArgument,
          "Decode: row width " + std::to_string(rows.cols()) +
              " does not match encoding width " +
              std::to_string(encoding.width));
  Table table = Table::Empty(encoding.schema);
  const std::size_t n = rows.rows();
  for (std::size_t i = 0; i < encoding.schema.columns.size(); ++i) {
    const ColumnSpec& spec = encoding.schema.columns[i];
    const ColumnBlock& block = encoding.blocks[i];
    auto& column = table.columns[i];
    column.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      if (spec.kind == ColumnKind::kNumerical) {
        const double unit = rows(r, block.offset) / encoding.row_scale;
        const double v = spec.min + unit * (spec.max - spec.min);
        column[r] = std::isnan(v) ? spec.min : std::clamp(v, spec.min, spec.max);
      } else {
        std::size_t best = 0;
        for (std::size_t c = 1; c < block.width; ++c) {
          if (rows(r, block.offset + c) > rows(r, block.offset + best)) {
            best = c;
          }
        }
        column[r] = static_cast<double>(best);
      }
    }
  }
  return table;
}

EncodedMatrix PoissonSubsample(const EncodedMatrix& matrix, double rate,
                               std::uint64_t seed) {
  Require(rate > 0.0 && rate <= 1.0, ErrorCode::kInvalidArgument,
          "subsampling rate must lie in (0, 1]");
  EncodedMatrix out;
  out.encoding = matrix.encoding;
  out.subsample_rate = rate * matrix.subsample_rate.value_or(1.0);
  if (rate == 1.0) {
    out.data = matrix.data;
    return out;
  }
  RandomStream stream(seed, "subsample");
  std::vector<std::size_t> kept;
  kept.reserve(static_cast<std::size_t>(rate * matrix.data.rows()) + 16);
  for (std::size_t r = 0; r < matrix.data.rows(); ++r) {
    if (stream.Bernoulli(rate)) kept.push_back(r);
  }
  out.data = matrix.data.GatherRows(kept);
  return out;
}

SliceBundle ApplyMechanism(const EncodedMatrix& x, const MechanismDims& dims,
                           double sigma, std::uint64_t seed, int threads) {
  dims.Validate();
  Require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::kInvalidArgument,
          "sigma must be positive");
  Require(x.data.cols() == dims.d, ErrorCode::kInvalidArgument,
          "mechanism: data has " + std::to_string(x.data.cols()) +
              " columns but d = " + std::to_string(dims.d));
  const std::size_t d = dims.d;
  const std::size_t mp = dims.m_prime();
  const std::size_t n = x.data.rows();
  const auto& kernels = simd::Kernels();
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = x.data.data() + r * d;
    const double norm2 = kernels.dot(row, row, d);
    Require(norm2 <= 1.0 + 1e-12, ErrorCode::kInvalidArgument,
            "mechanism: row " + std::to_string(r + 1) +
                " has 2-norm above 1; encode the table first");
  }

  SliceBundle bundle;
  bundle.sigma = sigma;
  bundle.dims = dims;
  bundle.seed = seed;
  bundle.projections = Matrix(d, mp);
  bundle.noisy = Matrix(n, mp);

  const double u_std = 1.0 / std::sqrt(static_cast<double>(d));
  ParallelFor(mp, threads, [&](std::size_t j) {
    RandomStream stream(seed, "U", j);
    for (std::size_t i = 0; i < d; ++i) {
      bundle.projections(i, j) = u_std * stream.Normal();
    }
  });

  // O = X U, row by row.
  ParallelFor(n, threads, [&](std::size_t r) {
    double* dst = bundle.noisy.data() + r * mp;
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = x.data(r, i);
      if (xi != 0.0) kernels.axpy(xi, bundle.projections.data() + i * mp, dst, mp);
    }
  });

  ParallelFor(mp, threads, [&](std::size_t j) {
    RandomStream stream(seed, "V", j);
    for (std::size_t r = 0; r < n; ++r) {
      bundle.noisy(r, j) += sigma * stream.Normal();
    }
  });
  return bundle;
}

std::vector<Slice> SlicesView(const SliceBundle& bundle) {
  const std::size_t k = bundle.dims.k;
  std::vector<Slice> slices;
  slices.reserve(bundle.dims.m);
  for (std::size_t s = 0; s < bundle.dims.m; ++s) {
    slices.push_back({bundle.projections.ColumnBlock(s * k, k),
                      bundle.noisy.ColumnBlock(s * k, k)});
  }
  return slices;
}

void WriteBundle(std::ostream& out, const SliceBundle& bundle) {
  using namespace internal;
  WriteMagic(out, {kBundleMagic, 8});
  WriteU32(out, kBundleFormatVersion);
  WriteU32(out, 0);
  WriteU64(out, bundle.dims.d);
  WriteU64(out, bundle.dims.k);
  WriteU64(out, bundle.dims.m);
  WriteU64(out, bundle.noisy.rows());
  WriteF64(out, bundle.sigma);
  WriteU64(out, bundle.seed);
  WriteF64s(out, bundle.projections.values());
  WriteF64s(out, bundle.noisy.values());
  if (!out) Fail(ErrorCode::kIo, "failed writing slice bundle");
}

SliceBundle ReadBundle(std::istream& in) {
  internal::Reader reader(in, "slice bundle");
  reader.ExpectMagic({kBundleMagic, 8});
  const std::uint32_t version = reader.U32();
  if (version != kBundleFormatVersion) {
    Fail(ErrorCode::kIo, "slice bundle: unsupported format version " +
                             std::to_string(version));
  }
  reader.U32();
  constexpr std::uint64_t kLimit = 1ULL << 32;
  SliceBundle bundle;
  bundle.dims.d = reader.Count(kLimit, "d");
  bundle.dims.k = reader.Count(kLimit, "k");
  bundle.dims.m = reader.Count(kLimit, "m");
  const std::uint64_t n = reader.Count(kLimit, "record count");
  bundle.sigma = reader.F64();
  bundle.seed = reader.U64();
  bundle.dims.Validate();
  bundle.projections = Matrix(bundle.dims.d, bundle.dims.m_prime());
  bundle.noisy = Matrix(n, bundle.dims.m_prime());
  reader.F64s(bundle.projections.values());
  reader.F64s(bundle.noisy.values());
  reader.ExpectEnd();
  return bundle;
}

void SaveBundle(const std::filesystem::path& path, const SliceBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  WriteBundle(out, bundle);
}

SliceBundle LoadBundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open slice bundle " + path.string());
  return ReadBundle(in);
}

}  // namespace slicedp
