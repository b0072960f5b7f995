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

#include <cstdio>
#include <string>

#include <json.hpp>

#include "slicedp/cli.h"

namespace slicedp {
namespace {

std::string Fixed(double v, int digits = 6) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, v);
  return buffer;
}

std::string General(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.10g", v);
  return buffer;
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDataError:
      return kExitData;
    case ErrorCode::kNumerical:
      return kExitNumerical;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInfeasible:
    case ErrorCode::kIo:
      return kExitUsage;
  }
  return kExitUsage;
}

std::string PrivacyReportToJson(const PrivacyReport& report) {
  nlohmann::ordered_json j;
  j["epsilon"] = report.epsilon;
  j["delta"] = report.delta;
  j["sigma"] = report.sigma;
  j["alpha_star"] = report.alpha_star;
  j["gamma"] = report.gamma;
  j["d"] = report.dims.d;
  j["k"] = report.dims.k;
  j["m"] = report.dims.m;
  j["m_prime"] = report.dims.m_prime();
  j["subsample_rate"] = report.subsample_rate
                            ? nlohmann::ordered_json(*report.subsample_rate)
                            : nlohmann::ordered_json(nullptr);
  j["mechanism_epsilon"] = report.mechanism_epsilon;
  j["mechanism_delta"] = report.mechanism_delta;
  j["deterministic_epsilon"] = report.deterministic_epsilon;
  j["trail"] = report.trail;
  return j.dump(2) + "\n";
}

std::string FormatPrivacyReport(const PrivacyReport& report) {
  std::string s;
  auto line = [&s](const std::string& key, const std::string& value) {
    s += key;
    s.append(key.size() < 24 ? 24 - key.size() : 1, ' ');
    s += value + "\n";
  };
  line("sigma", General(report.sigma));
  line("d / k / m", std::to_string(report.dims.d) + " / " +
                        std::to_string(report.dims.k) + " / " +
                        std::to_string(report.dims.m));
  line("alpha*", Fixed(report.alpha_star));
  line("gamma", Fixed(report.gamma));
  if (report.subsample_rate && *report.subsample_rate < 1.0) {
    line("mechanism epsilon", Fixed(report.mechanism_epsilon));
    line("mechanism delta", General(report.mechanism_delta));
    line("subsample rate", General(*report.subsample_rate));
  }
  line("epsilon*", Fixed(report.epsilon));
  line("delta", General(report.delta));
  line("deterministic epsilon", Fixed(report.deterministic_epsilon) +
                                    " (fixed projection, same alpha)");
  return s;
}

}  // namespace slicedp
