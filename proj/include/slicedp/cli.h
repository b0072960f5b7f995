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

// Command-line front end. Subcommands:
//
//   account   privacy accounting queries and noise calibration
//   slice     encode a CSV table and release its noisy projections
//   train     fit a generator to a released bundle
//   generate  sample synthetic rows from a trained generator
//   evaluate  compare a synthetic table with a real one
//
// Exit codes: 0 success, 2 usage/configuration/infeasible/missing input,
// 3 data does not match the schema, 4 numerical failure.

#ifndef SLICEDP_CLI_H_
#define SLICEDP_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "slicedp/accounting.h"
#include "slicedp/errors.h"

namespace slicedp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

int ExitCodeFor(ErrorCode code);

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// JSON rendering of an accounting report, including the trail.
std::string PrivacyReportToJson(const PrivacyReport& report);

// Human-readable summary printed by `account` and `slice`.
std::string FormatPrivacyReport(const PrivacyReport& report);

}  // namespace slicedp

#endif  // SLICEDP_CLI_H_
