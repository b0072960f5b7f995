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

#include <cstdlib>
#include <string_view>

#include "kernels_internal.h"
#include "slicedp/simd/kernels.h"

namespace slicedp::simd {

const KernelTable* Avx2Kernels() {
#if defined(SLICEDP_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  if (supported) return &internal::Avx2KernelTable();
#endif
  return nullptr;
}

const KernelTable& Kernels() {
  static const KernelTable& active = []() -> const KernelTable& {
    const char* forced = std::getenv("SLICEDP_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") {
      return ScalarKernels();
    }
    if (const KernelTable* avx2 = Avx2Kernels()) return *avx2;
    return ScalarKernels();
  }();
  return active;
}

}  // namespace slicedp::simd
