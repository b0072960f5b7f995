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

#include "slicedp/evaluate.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <json.hpp>

#include "slicedp/errors.h"
#include "slicedp/matrix.h"
#include "slicedp/mechanism.h"

namespace slicedp {
namespace {

void RequireNonEmpty(std::size_t real, std::size_t syn, const char* what) {
  Require(real > 0 && syn > 0, ErrorCode::kInvalidArgument,
          std::string(what) + ": empty input");
}

std::vector<std::size_t> ColumnsOfKind(const ColumnSchema& schema,
                                       ColumnKind kind) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    if (schema.columns[c].kind == kind) out.push_back(c);
  }
  return out;
}

double PairContingencyScore(const Table& real, const Table& syn,
                            std::size_t a, std::size_t b) {
  const std::size_t ca = real.schema.columns[a].categories.size();
  const std::size_t cb = real.schema.columns[b].categories.size();
  std::vector<double> diff(ca * cb, 0.0);
  const double wr = 1.0 / static_cast<double>(real.num_rows());
  const double ws = 1.0 / static_cast<double>(syn.num_rows());
  for (std::size_t r = 0; r < real.num_rows(); ++r) {
    const auto i = static_cast<std::size_t>(real.columns[a][r]);
    const auto j = static_cast<std::size_t>(real.columns[b][r]);
    diff[i * cb + j] += wr;
  }
  for (std::size_t r = 0; r < syn.num_rows(); ++r) {
    const auto i = static_cast<std::size_t>(syn.columns[a][r]);
    const auto j = static_cast<std::size_t>(syn.columns[b][r]);
    diff[i * cb + j] -= ws;
  }
  double tv = 0.0;
  for (double d : diff) tv += std::abs(d);
  return std::clamp(1.0 - 0.5 * tv, 0.0, 1.0);
}

Table SelectColumns(const Table& table, std::span<const std::size_t> keep) {
  Table out;
  for (std::size_t c : keep) {
    out.schema.columns.push_back(table.schema.columns[c]);
    out.columns.push_back(table.columns[c]);
  }
  return out;
}

Matrix Features(const Table& table, std::span<const std::size_t> keep) {
  if (keep.empty()) return Matrix(table.num_rows(), 0);
  return Encode(SelectColumns(table, keep)).data;
}

double Sigmoid(double t) {
  return t >= 0 ? 1.0 / (1.0 + std::exp(-t))
                : std::exp(t) / (1.0 + std::exp(t));
}

nlohmann::ordered_json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json PairsJson(const std::vector<PairScore>& pairs) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& p : pairs) {
    out.push_back({{"first", p.first}, {"second", p.second}, {"score", p.score}});
  }
  return out;
}

}  // namespace

double KsComplement(std::span<const double> real, std::span<const double> syn) {
  RequireNonEmpty(real.size(), syn.size(), "ks_complement");
  std::vector<double> a(real.begin(), real.end());
  std::vector<double> b(syn.begin(), syn.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
  }
  return std::clamp(1.0 - sup, 0.0, 1.0);
}

double TvComplement(std::span<const double> real, std::span<const double> syn) {
  RequireNonEmpty(real.size(), syn.size(), "tv_complement");
  std::map<double, double> diff;
  const double wr = 1.0 / static_cast<double>(real.size());
  const double ws = 1.0 / static_cast<double>(syn.size());
  for (double v : real) diff[v] += wr;
  for (double v : syn) diff[v] -= ws;
  double tv = 0.0;
  for (const auto& [label, d] : diff) tv += std::abs(d);
  return std::clamp(1.0 - 0.5 * tv, 0.0, 1.0);
}

std::optional<double> PearsonCorrelation(std::span<const double> x,
                                         std::span<const double> y) {
  Require(x.size() == y.size() && !x.empty(), ErrorCode::kInvalidArgument,
          "correlation: columns must be non-empty and of equal length");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> ContingencySimilarity(const Table& real,
                                            const Table& syn,
                                            std::vector<PairScore>* pairs) {
  const auto cats = ColumnsOfKind(real.schema, ColumnKind::kCategorical);
  if (cats.size() < 2) return std::nullopt;
  RequireNonEmpty(real.num_rows(), syn.num_rows(), "contingency_similarity");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t x = 0; x < cats.size(); ++x) {
    for (std::size_t y = x + 1; y < cats.size(); ++y) {
      const double s = PairContingencyScore(real, syn, cats[x], cats[y]);
      if (pairs) {
        pairs->push_back({real.schema.columns[cats[x]].name,
                          real.schema.columns[cats[y]].name, s});
      }
      total += s;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

std::optional<double> CorrelationSimilarity(const Table& real,
                                            const Table& syn,
                                            std::vector<PairScore>* pairs,
                                            std::vector<std::string>* warnings) {
  const auto nums = ColumnsOfKind(real.schema, ColumnKind::kNumerical);
  if (nums.size() < 2) return std::nullopt;
  RequireNonEmpty(real.num_rows(), syn.num_rows(), "correlation_similarity");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t x = 0; x < nums.size(); ++x) {
    for (std::size_t y = x + 1; y < nums.size(); ++y) {
      const std::string& a = real.schema.columns[nums[x]].name;
      const std::string& b = real.schema.columns[nums[y]].name;
      const auto rho_real =
          PearsonCorrelation(real.columns[nums[x]], real.columns[nums[y]]);
      const auto rho_syn =
          PearsonCorrelation(syn.columns[nums[x]], syn.columns[nums[y]]);
      if (!rho_real || !rho_syn) {
        if (warnings) {
          warnings->push_back("correlation_similarity: skipped pair (" + a +
                              ", " + b + "): constant column in " +
                              (rho_real ? "synthetic" : "real") + " data");
        }
        continue;
      }
      const double s =
          std::clamp(1.0 - std::abs(*rho_real - *rho_syn) / 2.0, 0.0, 1.0);
      if (pairs) pairs->push_back({a, b, s});
      total += s;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return total / static_cast<double>(count);
}

F1Result LogitF1(const Table& train, const Table& test,
                 std::string_view target, const LogitOptions& options) {
  Require(train.schema == test.schema, ErrorCode::kInvalidArgument,
          "logit_f1: train and test schemas differ");
  const auto target_index = train.schema.Find(target);
  Require(target_index.has_value(), ErrorCode::kInvalidArgument,
          "logit_f1: unknown target column '" + std::string(target) + "'");
  const ColumnSpec& spec = train.schema.columns[*target_index];
  Require(spec.kind == ColumnKind::kCategorical &&
              spec.categories.size() == 2,
          ErrorCode::kInvalidArgument,
          "logit_f1: target '" + spec.name +
              "' must be categorical with exactly two categories");
  RequireNonEmpty(train.num_rows(), test.num_rows(), "logit_f1");

  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < train.schema.columns.size(); ++c) {
    if (c != *target_index) keep.push_back(c);
  }
  Matrix x_train = Features(train, keep);
  Matrix x_test = Features(test, keep);
  const std::size_t dim = x_train.cols();

  // Standardize with the test statistics.
  for (std::size_t c = 0; c < dim; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < x_test.rows(); ++r) mean += x_test(r, c);
    mean /= static_cast<double>(x_test.rows());
    double var = 0.0;
    for (std::size_t r = 0; r < x_test.rows(); ++r) {
      var += (x_test(r, c) - mean) * (x_test(r, c) - mean);
    }
    var /= static_cast<double>(x_test.rows());
    const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    for (std::size_t r = 0; r < x_train.rows(); ++r) {
      x_train(r, c) = (x_train(r, c) - mean) * scale;
    }
    for (std::size_t r = 0; r < x_test.rows(); ++r) {
      x_test(r, c) = (x_test(r, c) - mean) * scale;
    }
  }

  F1Result result;
  const std::vector<double>& y_train = train.columns[*target_index];
  const std::vector<double>& y_test = test.columns[*target_index];
  const auto positives =
      std::count(y_train.begin(), y_train.end(), 1.0);
  if (positives == 0 || positives == static_cast<long>(y_train.size())) {
    result.warnings.push_back(
        "logit_f1: training data contains a single class; the fitted "
        "predictor is degenerate");
  }

  std::vector<double> w(dim, 0.0), grad(dim);
  double bias = 0.0;
  const double n = static_cast<double>(x_train.rows());
  for (int it = 0; it < options.steps; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t r = 0; r < x_train.rows(); ++r) {
      double t = bias;
      for (std::size_t c = 0; c < dim; ++c) t += w[c] * x_train(r, c);
      const double e = Sigmoid(t) - y_train[r];
      for (std::size_t c = 0; c < dim; ++c) grad[c] += e * x_train(r, c);
      grad_b += e;
    }
    for (std::size_t c = 0; c < dim; ++c) {
      w[c] -= options.learning_rate * (grad[c] / n + options.l2 * w[c]);
    }
    bias -= options.learning_rate * grad_b / n;
  }

  double tp = 0.0, fp = 0.0, fn = 0.0;
  for (std::size_t r = 0; r < x_test.rows(); ++r) {
    double t = bias;
    for (std::size_t c = 0; c < dim; ++c) t += w[c] * x_test(r, c);
    const bool predicted = t > 0.0;
    const bool actual = y_test[r] == 1.0;
    if (predicted && actual) tp += 1.0;
    if (predicted && !actual) fp += 1.0;
    if (!predicted && actual) fn += 1.0;
  }
  result.precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
  result.recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
  const double denom = 2.0 * tp + fp + fn;
  if (denom == 0.0) {
    result.warnings.push_back(
        "logit_f1: no positive predictions or labels in the test data; F1 "
        "reported as 0");
    result.f1 = 0.0;
  } else {
    result.f1 = 2.0 * tp / denom;
  }
  return result;
}

MetricsReport Evaluate(const Table& real, const Table& syn,
                       const EvaluateOptions& options) {
  Require(real.schema == syn.schema, ErrorCode::kInvalidArgument,
          "evaluate: real and synthetic tables use different schemas");
  RequireNonEmpty(real.num_rows(), syn.num_rows(), "evaluate");
  MetricsReport report;
  double ks_total = 0.0, tv_total = 0.0;
  std::size_t ks_count = 0, tv_count = 0;
  for (std::size_t c = 0; c < real.schema.columns.size(); ++c) {
    const ColumnSpec& spec = real.schema.columns[c];
    if (spec.kind == ColumnKind::kNumerical) {
      const double s = KsComplement(real.columns[c], syn.columns[c]);
      report.columns.push_back({spec.name, "ks_complement", s});
      ks_total += s;
      ++ks_count;
    } else {
      const double s = TvComplement(real.columns[c], syn.columns[c]);
      report.columns.push_back({spec.name, "tv_complement", s});
      tv_total += s;
      ++tv_count;
    }
  }
  if (ks_count > 0) report.ks_complement = ks_total / ks_count;
  if (tv_count > 0) report.tv_complement = tv_total / tv_count;
  report.contingency_similarity =
      ContingencySimilarity(real, syn, &report.contingency_pairs);
  report.correlation_similarity = CorrelationSimilarity(
      real, syn, &report.correlation_pairs, &report.warnings);
  if (!options.target.empty()) {
    F1Result f1 = LogitF1(syn, real, options.target, options.logit);
    report.logit_f1 = f1.f1;
    report.warnings.insert(report.warnings.end(), f1.warnings.begin(),
                           f1.warnings.end());
  }
  return report;
}

std::string MetricsToJson(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["ks_complement"] = OptionalJson(report.ks_complement);
  j["tv_complement"] = OptionalJson(report.tv_complement);
  j["contingency_similarity"] = OptionalJson(report.contingency_similarity);
  j["correlation_similarity"] = OptionalJson(report.correlation_similarity);
  j["logit_f1"] = OptionalJson(report.logit_f1);
  nlohmann::ordered_json columns = nlohmann::ordered_json::array();
  for (const auto& c : report.columns) {
    columns.push_back({{"name", c.name}, {"metric", c.metric}, {"score", c.score}});
  }
  j["columns"] = std::move(columns);
  j["contingency_pairs"] = PairsJson(report.contingency_pairs);
  j["correlation_pairs"] = PairsJson(report.correlation_pairs);
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

}  // namespace slicedp
