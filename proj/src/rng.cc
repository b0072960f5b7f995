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

#include "slicedp/rng.h"

#include <cmath>
#include <numbers>

namespace slicedp {
namespace {

std::mt19937_64 MakeEngine(std::uint64_t master_seed, std::string_view label,
                           std::uint64_t index) {
  const std::uint64_t label_hash = HashLabel(label);
  std::seed_seq seq{
      static_cast<std::uint32_t>(master_seed),
      static_cast<std::uint32_t>(master_seed >> 32),
      static_cast<std::uint32_t>(label_hash),
      static_cast<std::uint32_t>(label_hash >> 32),
      static_cast<std::uint32_t>(index),
      static_cast<std::uint32_t>(index >> 32),
  };
  return std::mt19937_64(seq);
}

}  // namespace

std::uint64_t HashLabel(std::string_view label) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

RandomStream::RandomStream(std::uint64_t master_seed, std::string_view label,
                           std::uint64_t index)
    : engine_(MakeEngine(master_seed, label, index)) {}

double RandomStream::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::UniformPositive() {
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t RandomStream::UniformInt(std::uint64_t bound) {
  // Rejection sampling on the top of the range keeps the result unbiased.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double RandomStream::Normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = UniformPositive();
  const double u2 = Uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void RandomStream::FillNormal(std::span<double> out, double stddev) {
  for (double& x : out) x = stddev * Normal();
}

}  // namespace slicedp
