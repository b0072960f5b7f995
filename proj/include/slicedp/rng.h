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

#ifndef SLICEDP_RNG_H_
#define SLICEDP_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace slicedp {

// A reproducible random stream derived from a master seed, a fixed label and
// an index, e.g. ("U", column). Streams with different (label, index) pairs
// are independent, so results do not depend on evaluation order or thread
// count. Sampling is implemented on top of the raw engine output so that
// values are identical across standard library implementations.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::string_view label,
               std::uint64_t index = 0);

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform on (0, 1].
  double UniformPositive();
  // Uniform integer in [0, bound); bound > 0.
  std::uint64_t UniformInt(std::uint64_t bound);
  bool Bernoulli(double p) { return Uniform() < p; }
  // Standard normal via Box-Muller; one cached spare per pair.
  double Normal();
  double Normal(double mean, double stddev) {
    return mean + stddev * Normal();
  }
  void FillNormal(std::span<double> out, double stddev);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// FNV-1a hash of a stream label.
std::uint64_t HashLabel(std::string_view label);

}  // namespace slicedp

#endif  // SLICEDP_RNG_H_
