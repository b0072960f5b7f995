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

// Synthetic-data quality metrics. Every score lies in [0, 1]; 1 means the
// synthetic table matches the real one on that statistic.

#ifndef SLICEDP_EVALUATE_H_
#define SLICEDP_EVALUATE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slicedp/schema.h"

namespace slicedp {

// 1 - sup_x |F_real(x) - F_syn(x)|.
double KsComplement(std::span<const double> real, std::span<const double> syn);

// 1 - (1/2) sum_c |p_real(c) - p_syn(c)| over the union of observed labels.
// Labels are category indices.
double TvComplement(std::span<const double> real, std::span<const double> syn);

// Pearson correlation; nullopt when either column is constant.
std::optional<double> PearsonCorrelation(std::span<const double> x,
                                         std::span<const double> y);

struct PairScore {
  std::string first;
  std::string second;
  double score = 0.0;
};

// Mean over categorical column pairs of 1 - TV between the normalized
// two-way contingency tables. nullopt with fewer than two categorical
// columns.
std::optional<double> ContingencySimilarity(
    const Table& real, const Table& syn,
    std::vector<PairScore>* pairs = nullptr);

// Mean over numerical column pairs of 1 - |rho_real - rho_syn| / 2. Pairs
// with a constant column in either table are skipped and reported in
// `warnings`. nullopt with fewer than two numerical columns or when every
// pair was skipped.
std::optional<double> CorrelationSimilarity(
    const Table& real, const Table& syn,
    std::vector<PairScore>* pairs = nullptr,
    std::vector<std::string>* warnings = nullptr);

struct LogitOptions {
  int steps = 500;
  double learning_rate = 0.1;
  double l2 = 1e-4;
};

struct F1Result {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::vector<std::string> warnings;
};

// Fits a binary logistic regression on `train` by full-batch gradient
// descent and scores F1 of the positive class on `test`. The target must be
// a categorical column with exactly two categories; the second category is
// the positive class. Features are the remaining columns, encoded through
// the schema and standardized with the test table's statistics.
F1Result LogitF1(const Table& train, const Table& test,
                 std::string_view target, const LogitOptions& options = {});

struct ColumnScore {
  std::string name;
  std::string metric;  // "ks_complement" or "tv_complement"
  double score = 0.0;
};

struct MetricsReport {
  std::optional<double> ks_complement;
  std::optional<double> tv_complement;
  std::optional<double> contingency_similarity;
  std::optional<double> correlation_similarity;
  std::optional<double> logit_f1;
  std::vector<ColumnScore> columns;
  std::vector<PairScore> contingency_pairs;
  std::vector<PairScore> correlation_pairs;
  std::vector<std::string> warnings;
};

struct EvaluateOptions {
  // Column used for the logistic-regression F1; skipped when empty.
  std::string target;
  LogitOptions logit;
};

// Both tables must share the same schema.
MetricsReport Evaluate(const Table& real, const Table& syn,
                       const EvaluateOptions& options = {});

// JSON object with keys ks_complement, tv_complement,
// contingency_similarity, correlation_similarity, logit_f1 (null when not
// applicable), columns, contingency_pairs, correlation_pairs, warnings.
std::string MetricsToJson(const MetricsReport& report);

}  // namespace slicedp

#endif  // SLICEDP_EVALUATE_H_
