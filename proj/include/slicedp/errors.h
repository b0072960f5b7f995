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

#ifndef SLICEDP_ERRORS_H_
#define SLICEDP_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace slicedp {

// Coarse error categories. The command-line front end maps these onto
// process exit codes.
enum class ErrorCode {
  kInvalidArgument,  // bad shapes, out-of-domain parameters
  kInfeasible,       // privacy constraint cannot be met (gamma >= d, budget)
  kDataError,        // input table does not conform to its schema
  kNumerical,        // factorization failure, non-finite loss
  kIo,               // missing/corrupt files, stage dependencies
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, ErrorCode code,
                    const std::string& message) {
  if (!condition) Fail(code, message);
}

}  // namespace slicedp

#endif  // SLICEDP_ERRORS_H_
