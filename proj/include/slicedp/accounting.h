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

// Privacy accounting for the slicing mechanism M(X) = (U, XU + V), where U
// has i.i.d. N(0, 1/d) entries and V has i.i.d. N(0, sigma^2) entries. All
// quantities are in nats.

#ifndef SLICEDP_ACCOUNTING_H_
#define SLICEDP_ACCOUNTING_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace slicedp {

struct MechanismDims {
  std::size_t d = 1;  // ambient (encoded) dimension
  std::size_t k = 1;  // slice dimension
  std::size_t m = 1;  // number of slices

  std::size_t m_prime() const { return k * m; }

  // Throws Error(kInvalidArgument) unless d >= 1, 1 <= k <= d, m >= 1.
  void Validate() const;

  bool operator==(const MechanismDims&) const = default;
};

struct RenyiPoint {
  double alpha = 2.0;
  double eps_rdp = 0.0;
};

struct PrivacyReport {
  double epsilon = 0.0;  // final guarantee, after amplification if any
  double delta = 0.0;
  double alpha_star = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;  // (alpha*^2 - alpha*) / sigma^2
  MechanismDims dims;
  std::optional<double> subsample_rate;
  // Guarantee of the mechanism itself, before subsampling amplification.
  double mechanism_epsilon = 0.0;
  double mechanism_delta = 0.0;
  // Same-order bound had U been a fixed (non-random) projection.
  double deterministic_epsilon = 0.0;
  std::vector<std::string> trail;
};

// gamma = (alpha^2 - alpha) / sigma^2.
double Gamma(double sigma, double alpha);

// Largest admissible order: positive root of alpha^2 - alpha = d sigma^2.
double MaxFeasibleAlpha(double sigma, std::size_t d);

// Renyi bound m' alpha / (2 sigma^2 (d - gamma)). Throws Error(kInfeasible)
// when gamma >= d.
double RdpEpsilon(double sigma, const MechanismDims& dims, double alpha);

// eps_rdp + ln(1/delta) / (alpha - 1).
double DpFromRdp(const RenyiPoint& point, double delta);

// (eps, delta)-DP bound at a fixed order: RdpEpsilon + conversion term.
double EpsilonAt(double sigma, const MechanismDims& dims, double alpha,
                 double delta);

// The approximate optimum 1 + sqrt(sigma^2 d ln(1/delta) / m'), clipped into
// the feasible interval.
double ApproximateAlpha(double sigma, const MechanismDims& dims, double delta);

struct AlphaOptimum {
  double alpha_star = 0.0;
  double epsilon_star = 0.0;
};

// Minimizes EpsilonAt over alpha in (1, alpha_max) by golden-section search.
// Throws Error(kInfeasible) if the feasible interval is empty.
AlphaOptimum OptimizeAlpha(double sigma, const MechanismDims& dims,
                           double delta);

struct CalibrationOptions {
  double sigma_min = 1e-3;
  double sigma_max = 1e6;
  int max_iterations = 200;
};

// Smallest sigma (to bisection precision) whose optimized epsilon does not
// exceed epsilon_target. Throws Error(kInfeasible) when even sigma_max does
// not reach the target.
double CalibrateSigma(double epsilon_target, double delta,
                      const MechanismDims& dims,
                      const CalibrationOptions& options = {});

struct AmplifiedGuarantee {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Poisson subsampling at `rate`: (log(1 + rate (e^eps - 1)), rate delta).
AmplifiedGuarantee Amplify(double epsilon, double delta, double rate);

// Inverse of Amplify: the mechanism-level (eps, delta) that amplifies to the
// requested pair. Throws Error(kInfeasible) if delta / rate >= 1.
AmplifiedGuarantee DeamplifyTarget(double epsilon, double delta, double rate);

// m alpha / (2 sigma^2) + ln(1/delta) / (alpha - 1).
double DeterministicEpsilon(double sigma, std::size_t m, double alpha,
                            double delta);

// Full report for a given noise level; `delta` is the final (post-
// amplification) delta.
PrivacyReport AccountForSigma(double sigma, const MechanismDims& dims,
                              double delta,
                              std::optional<double> subsample_rate);

// Calibrates sigma so that the final guarantee meets (epsilon, delta).
PrivacyReport CalibrateForBudget(double epsilon, double delta,
                                 const MechanismDims& dims,
                                 std::optional<double> subsample_rate,
                                 const CalibrationOptions& options = {});

}  // namespace slicedp

#endif  // SLICEDP_ACCOUNTING_H_
