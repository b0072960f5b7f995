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

#include "slicedp/accounting.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "slicedp/errors.h"

namespace slicedp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlphaMargin = 1e-9;

void CheckDelta(double delta) {
  Require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidArgument,
          "delta must lie in (0, 1)");
}

void CheckSigma(double sigma) {
  Require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::kInvalidArgument,
          "sigma must be positive and finite");
}

void CheckAlpha(double alpha) {
  Require(alpha > 1.0 && std::isfinite(alpha), ErrorCode::kInvalidArgument,
          "alpha must be greater than 1");
}

std::string Format(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// EpsilonAt without argument checks; +inf outside the feasible region.
double Objective(double sigma, const MechanismDims& dims, double alpha,
                 double log_inv_delta) {
  const double gamma = Gamma(sigma, alpha);
  const double d = static_cast<double>(dims.d);
  if (!(gamma < d)) return kInf;
  const double m_prime = static_cast<double>(dims.m_prime());
  return m_prime * alpha / (2.0 * sigma * sigma * (d - gamma)) +
         log_inv_delta / (alpha - 1.0);
}

struct FeasibleInterval {
  double lo;
  double hi;
};

FeasibleInterval Interval(double sigma, const MechanismDims& dims) {
  const double alpha_max = MaxFeasibleAlpha(sigma, dims.d);
  // Keep the margin above the spacing of doubles near alpha_max.
  const double margin = std::max(
      kAlphaMargin, 8.0 * std::numeric_limits<double>::epsilon() * alpha_max);
  return {1.0 + kAlphaMargin, alpha_max - margin};
}

}  // namespace

void MechanismDims::Validate() const {
  Require(d >= 1, ErrorCode::kInvalidArgument, "d must be at least 1");
  Require(k >= 1 && k <= d, ErrorCode::kInvalidArgument,
          "k must satisfy 1 <= k <= d");
  Require(m >= 1, ErrorCode::kInvalidArgument, "m must be at least 1");
}

double Gamma(double sigma, double alpha) {
  return (alpha * alpha - alpha) / (sigma * sigma);
}

double MaxFeasibleAlpha(double sigma, std::size_t d) {
  const double ds2 = static_cast<double>(d) * sigma * sigma;
  return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * ds2));
}

double RdpEpsilon(double sigma, const MechanismDims& dims, double alpha) {
  CheckSigma(sigma);
  CheckAlpha(alpha);
  const double gamma = Gamma(sigma, alpha);
  const double d = static_cast<double>(dims.d);
  if (!(gamma < d)) {
    Fail(ErrorCode::kInfeasible,
         "infeasible Renyi order: gamma = (alpha^2 - alpha)/sigma^2 = " +
             Format(gamma) + " must be < d = " + Format(d) +
             " (alpha too large for this sigma and d)");
  }
  const double m_prime = static_cast<double>(dims.m_prime());
  return m_prime * alpha / (2.0 * sigma * sigma * (d - gamma));
}

double DpFromRdp(const RenyiPoint& point, double delta) {
  CheckDelta(delta);
  CheckAlpha(point.alpha);
  return point.eps_rdp + std::log(1.0 / delta) / (point.alpha - 1.0);
}

double EpsilonAt(double sigma, const MechanismDims& dims, double alpha,
                 double delta) {
  return DpFromRdp({alpha, RdpEpsilon(sigma, dims, alpha)}, delta);
}

double ApproximateAlpha(double sigma, const MechanismDims& dims,
                        double delta) {
  CheckSigma(sigma);
  CheckDelta(delta);
  const FeasibleInterval interval = Interval(sigma, dims);
  const double m_prime = static_cast<double>(dims.m_prime());
  double alpha =
      m_prime > 0.0
          ? 1.0 + std::sqrt(sigma * sigma * static_cast<double>(dims.d) *
                            std::log(1.0 / delta) / m_prime)
          : interval.hi;
  return std::clamp(alpha, interval.lo, std::max(interval.lo, interval.hi));
}

AlphaOptimum OptimizeAlpha(double sigma, const MechanismDims& dims,
                           double delta) {
  CheckSigma(sigma);
  CheckDelta(delta);
  const FeasibleInterval interval = Interval(sigma, dims);
  if (!(interval.lo < interval.hi)) {
    Fail(ErrorCode::kInfeasible,
         "no Renyi order alpha > 1 satisfies gamma < d: d * sigma^2 = " +
             Format(static_cast<double>(dims.d) * sigma * sigma) +
             " is too small");
  }
  const double log_inv_delta = std::log(1.0 / delta);
  auto objective = [&](double alpha) {
    return Objective(sigma, dims, alpha, log_inv_delta);
  };

  // Golden-section search; the objective is convex on the interval.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = interval.lo;
  double b = interval.hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (int iter = 0; iter < 400; ++iter) {
    if (b - a <= 1e-13 * std::max(1.0, std::abs(a))) break;
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective(x2);
    }
  }

  AlphaOptimum best{x1, f1};
  if (f2 < best.epsilon_star) best = {x2, f2};
  // The closed-form seed and the interval ends guard against a bracket that
  // collapsed onto the boundary.
  for (double candidate : {ApproximateAlpha(sigma, dims, delta), interval.lo,
                           interval.hi}) {
    const double value = objective(candidate);
    if (value < best.epsilon_star) best = {candidate, value};
  }
  if (!std::isfinite(best.epsilon_star)) {
    Fail(ErrorCode::kInfeasible, "no finite epsilon on the feasible interval");
  }
  return best;
}

double CalibrateSigma(double epsilon_target, double delta,
                      const MechanismDims& dims,
                      const CalibrationOptions& options) {
  Require(epsilon_target > 0.0 && std::isfinite(epsilon_target),
          ErrorCode::kInvalidArgument, "target epsilon must be positive");
  CheckDelta(delta);
  dims.Validate();
  auto epsilon_of = [&](double sigma) {
    const FeasibleInterval interval = Interval(sigma, dims);
    if (!(interval.lo < interval.hi)) return kInf;
    return OptimizeAlpha(sigma, dims, delta).epsilon_star;
  };

  double hi = options.sigma_max;
  if (epsilon_of(hi) > epsilon_target) {
    Fail(ErrorCode::kInfeasible,
         "unreachable privacy budget: epsilon " + Format(epsilon_target) +
             " is below what sigma <= " + Format(hi) + " can achieve");
  }
  double lo = options.sigma_min;
  // Expand downwards while the lower end already satisfies the budget.
  while (epsilon_of(lo) <= epsilon_target) {
    hi = lo;
    lo *= 0.1;
    if (lo < 1e-300) return hi;
  }
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (hi / lo - 1.0 <= 1e-15) break;
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    if (epsilon_of(mid) <= epsilon_target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

AmplifiedGuarantee Amplify(double epsilon, double delta, double rate) {
  Require(rate > 0.0 && rate <= 1.0, ErrorCode::kInvalidArgument,
          "subsampling rate must lie in (0, 1]");
  CheckDelta(delta);
  Require(epsilon >= 0.0, ErrorCode::kInvalidArgument,
          "epsilon must be non-negative");
  if (rate == 1.0) return {epsilon, delta};
  return {std::log1p(rate * std::expm1(epsilon)), rate * delta};
}

AmplifiedGuarantee DeamplifyTarget(double epsilon, double delta,
                                   double rate) {
  Require(rate > 0.0 && rate <= 1.0, ErrorCode::kInvalidArgument,
          "subsampling rate must lie in (0, 1]");
  CheckDelta(delta);
  Require(epsilon > 0.0, ErrorCode::kInvalidArgument,
          "epsilon must be positive");
  if (rate == 1.0) return {epsilon, delta};
  const double mechanism_delta = delta / rate;
  if (!(mechanism_delta < 1.0)) {
    Fail(ErrorCode::kInfeasible,
         "delta / rate must be < 1 for amplification to apply");
  }
  return {std::log1p(std::expm1(epsilon) / rate), mechanism_delta};
}

double DeterministicEpsilon(double sigma, std::size_t m, double alpha,
                            double delta) {
  CheckSigma(sigma);
  CheckAlpha(alpha);
  CheckDelta(delta);
  return static_cast<double>(m) * alpha / (2.0 * sigma * sigma) +
         std::log(1.0 / delta) / (alpha - 1.0);
}

PrivacyReport AccountForSigma(double sigma, const MechanismDims& dims,
                              double delta,
                              std::optional<double> subsample_rate) {
  dims.Validate();
  CheckSigma(sigma);
  CheckDelta(delta);
  const double rate = subsample_rate.value_or(1.0);
  Require(rate > 0.0 && rate <= 1.0, ErrorCode::kInvalidArgument,
          "subsampling rate must lie in (0, 1]");

  PrivacyReport report;
  report.sigma = sigma;
  report.dims = dims;
  report.subsample_rate = subsample_rate;
  report.mechanism_delta = delta / rate;
  if (!(report.mechanism_delta < 1.0)) {
    Fail(ErrorCode::kInfeasible,
         "delta / rate must be < 1 for amplification to apply");
  }
  const AlphaOptimum opt = OptimizeAlpha(sigma, dims, report.mechanism_delta);
  report.alpha_star = opt.alpha_star;
  report.gamma = Gamma(sigma, opt.alpha_star);
  report.mechanism_epsilon = opt.epsilon_star;
  report.deterministic_epsilon = DeterministicEpsilon(
      sigma, dims.m, opt.alpha_star, report.mechanism_delta);
  const AmplifiedGuarantee final_guarantee =
      Amplify(opt.epsilon_star, report.mechanism_delta, rate);
  report.epsilon = final_guarantee.epsilon;
  report.delta = final_guarantee.delta;

  report.trail.push_back("mechanism: d=" + std::to_string(dims.d) +
                         " k=" + std::to_string(dims.k) +
                         " m=" + std::to_string(dims.m) +
                         " m'=" + std::to_string(dims.m_prime()) +
                         " sigma=" + Format(sigma));
  report.trail.push_back("renyi order optimized: alpha*=" +
                         Format(opt.alpha_star) +
                         " gamma=" + Format(report.gamma) +
                         " eps=" + Format(opt.epsilon_star) +
                         " delta=" + Format(report.mechanism_delta));
  if (rate < 1.0) {
    report.trail.push_back("poisson subsampling at rate " + Format(rate) +
                           ": eps'=" + Format(report.epsilon) +
                           " delta'=" + Format(report.delta));
  }
  return report;
}

PrivacyReport CalibrateForBudget(double epsilon, double delta,
                                 const MechanismDims& dims,
                                 std::optional<double> subsample_rate,
                                 const CalibrationOptions& options) {
  dims.Validate();
  const double rate = subsample_rate.value_or(1.0);
  const AmplifiedGuarantee target = DeamplifyTarget(epsilon, delta, rate);
  const double sigma =
      CalibrateSigma(target.epsilon, target.delta, dims, options);
  PrivacyReport report = AccountForSigma(sigma, dims, delta, subsample_rate);
  report.trail.insert(
      report.trail.begin(),
      "calibrated for target (eps=" + Format(epsilon) +
          ", delta=" + Format(delta) + "); mechanism-level target (eps=" +
          Format(target.epsilon) + ", delta=" + Format(target.delta) + ")");
  return report;
}

}  // namespace slicedp
