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

// Little-endian binary read/write helpers shared by the bundle and checkpoint
// formats.

#ifndef SLICEDP_SRC_BINARY_IO_H_
#define SLICEDP_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "slicedp/errors.h"

namespace slicedp::internal {

inline std::uint64_t ToLittle64(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return __builtin_bswap64(v);
}
inline std::uint32_t ToLittle32(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return __builtin_bswap32(v);
}

inline void WriteU32(std::ostream& out, std::uint32_t v) {
  v = ToLittle32(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline void WriteU64(std::ostream& out, std::uint64_t v) {
  v = ToLittle64(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline void WriteF64(std::ostream& out, double v) {
  WriteU64(out, std::bit_cast<std::uint64_t>(v));
}
inline void WriteF64s(std::ostream& out, std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (double v : values) WriteF64(out, v);
  }
}
inline void WriteMagic(std::ostream& out, std::string_view magic) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

class Reader {
 public:
  Reader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  void ExpectMagic(std::string_view magic) {
    std::string buffer(magic.size(), '\0');
    Read(buffer.data(), buffer.size());
    if (buffer != magic) {
      Fail(ErrorCode::kIo, what_ + ": bad magic, not a " + what_ + " file");
    }
  }
  std::uint32_t U32() {
    std::uint32_t v;
    Read(&v, sizeof v);
    return ToLittle32(v);
  }
  std::uint64_t U64() {
    std::uint64_t v;
    Read(&v, sizeof v);
    return ToLittle64(v);
  }
  double F64() { return std::bit_cast<double>(U64()); }
  void F64s(std::span<double> out) {
    if constexpr (std::endian::native == std::endian::little) {
      Read(out.data(), out.size_bytes());
    } else {
      for (double& v : out) v = F64();
    }
  }
  // Size sanity limit for counts read from headers.
  std::uint64_t Count(std::uint64_t limit, const char* field) {
    const std::uint64_t v = U64();
    if (v > limit) {
      Fail(ErrorCode::kIo, what_ + ": implausible " + std::string(field));
    }
    return v;
  }
  void ExpectEnd() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      Fail(ErrorCode::kIo, what_ + ": trailing bytes after payload");
    }
  }

 private:
  void Read(void* dst, std::size_t bytes) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in_.gcount()) != bytes) {
      Fail(ErrorCode::kIo, what_ + ": truncated file");
    }
  }

  std::istream& in_;
  std::string what_;
};

}  // namespace slicedp::internal

#endif  // SLICEDP_SRC_BINARY_IO_H_
