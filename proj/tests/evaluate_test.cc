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
#include <numeric>

#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "slicedp/errors.h"
#include "slicedp/rng.h"

namespace slicedp {
namespace {

Table MakeTable(const char* schema_text,
                std::vector<std::vector<double>> columns) {
  Table t;
  t.schema = ColumnSchema::Parse(schema_text);
  t.columns = std::move(columns);
  return t;
}

constexpr const char* kMixed =
    "color,categorical,red,green,blue\n"
    "size,categorical,s,l\n"
    "x,numerical,0,10\n"
    "y,numerical,0,10\n"
    "label,categorical,no,yes\n";

Table RandomMixed(std::size_t n, std::uint64_t seed) {
  RandomStream s(seed, "table");
  std::vector<std::vector<double>> cols(5, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    cols[0][i] = static_cast<double>(s.UniformInt(3));
    cols[1][i] = static_cast<double>(s.UniformInt(2));
    cols[2][i] = 10.0 * s.Uniform();
    cols[3][i] = std::clamp(cols[2][i] + s.Normal(), 0.0, 10.0);
    cols[4][i] = cols[2][i] + 0.5 * s.Normal() > 5.0 ? 1.0 : 0.0;
  }
  return MakeTable(kMixed, std::move(cols));
}

TEST(EvaluateTest, KsByHand) {
  const std::vector<double> real = {1, 2, 3, 4};
  const std::vector<double> syn = {3, 4, 5, 6};
  EXPECT_DOUBLE_EQ(KsComplement(real, syn), 0.5);
  EXPECT_DOUBLE_EQ(KsComplement(real, real), 1.0);
  const std::vector<double> far = {10, 11};
  EXPECT_DOUBLE_EQ(KsComplement(real, far), 0.0);
  // Ties across the two samples.
  const std::vector<double> a = {1, 1, 2};
  const std::vector<double> b = {1, 2, 2};
  EXPECT_NEAR(KsComplement(a, b), 1.0 - 1.0 / 3.0, 1e-15);
}

TEST(EvaluateTest, TvByHand) {
  const std::vector<double> real = {0, 0, 1, 1};
  const std::vector<double> syn = {0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(TvComplement(real, syn), 0.5);
  const std::vector<double> other = {2, 2};
  EXPECT_DOUBLE_EQ(TvComplement(real, other), 0.0);
}

TEST(EvaluateTest, ContingencyByHand) {
  const char* schema = "a,categorical,p,q\nb,categorical,u,v\n";
  const Table real = MakeTable(schema, {{0, 1}, {0, 1}});
  const Table syn = MakeTable(schema, {{0, 0}, {0, 1}});
  std::vector<PairScore> pairs;
  const auto score = ContingencySimilarity(real, syn, &pairs);
  ASSERT_TRUE(score.has_value());
  EXPECT_DOUBLE_EQ(*score, 0.5);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].first, "a");
  EXPECT_EQ(pairs[0].second, "b");
  const Table single = MakeTable("a,categorical,p,q\n", {{0, 1}});
  EXPECT_FALSE(ContingencySimilarity(single, single).has_value());
}

TEST(EvaluateTest, CorrelationByHand) {
  const char* schema = "x,numerical,0,10\ny,numerical,0,10\n";
  const Table real = MakeTable(schema, {{1, 2, 3, 4}, {1, 2, 3, 4}});
  const Table syn = MakeTable(schema, {{1, 2, 3, 4}, {1, 3, 2, 4}});
  const std::vector<double> x = {1, 2, 3, 4}, y = {1, 3, 2, 4};
  EXPECT_NEAR(*PearsonCorrelation(x, y), 0.8, 1e-15);
  EXPECT_NEAR(*CorrelationSimilarity(real, syn), 0.9, 1e-15);

  const Table flat = MakeTable(schema, {{1, 2, 3, 4}, {5, 5, 5, 5}});
  std::vector<std::string> warnings;
  EXPECT_FALSE(CorrelationSimilarity(real, flat, nullptr, &warnings));
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_FALSE(PearsonCorrelation(flat.columns[1], x).has_value());
}

TEST(EvaluateTest, IdenticalTablesScoreOne) {
  const Table t = RandomMixed(300, 1);
  EvaluateOptions opts;
  opts.target = "label";
  const MetricsReport r = Evaluate(t, t, opts);
  EXPECT_DOUBLE_EQ(*r.ks_complement, 1.0);
  EXPECT_DOUBLE_EQ(*r.tv_complement, 1.0);
  EXPECT_DOUBLE_EQ(*r.contingency_similarity, 1.0);
  EXPECT_DOUBLE_EQ(*r.correlation_similarity, 1.0);
  ASSERT_TRUE(r.logit_f1.has_value());
  EXPECT_GT(*r.logit_f1, 0.8);
  EXPECT_EQ(r.columns.size(), 5u);
}

TEST(EvaluateTest, RowOrderDoesNotMatter) {
  const Table real = RandomMixed(200, 2);
  const Table syn = RandomMixed(150, 3);
  Table shuffled = syn;
  std::vector<std::size_t> perm(syn.num_rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  for (std::size_t c = 0; c < syn.columns.size(); ++c) {
    for (std::size_t i = 0; i < perm.size(); ++i) {
      shuffled.columns[c][i] = syn.columns[c][perm[i]];
    }
  }
  const MetricsReport a = Evaluate(real, syn);
  const MetricsReport b = Evaluate(real, shuffled);
  EXPECT_NEAR(*a.ks_complement, *b.ks_complement, 1e-12);
  EXPECT_NEAR(*a.tv_complement, *b.tv_complement, 1e-12);
  EXPECT_NEAR(*a.contingency_similarity, *b.contingency_similarity, 1e-12);
  EXPECT_NEAR(*a.correlation_similarity, *b.correlation_similarity, 1e-12);
}

TEST(EvaluateTest, LogitSeparable) {
  const char* schema = "x,numerical,0,1\nt,categorical,neg,pos\n";
  std::vector<double> x, t;
  for (int i = 0; i < 100; ++i) {
    x.push_back(i / 99.0);
    t.push_back(i >= 50 ? 1.0 : 0.0);
  }
  const Table table = MakeTable(schema, {x, t});
  const F1Result r = LogitF1(table, table, "t");
  EXPECT_DOUBLE_EQ(r.f1, 1.0);
  EXPECT_DOUBLE_EQ(r.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(EvaluateTest, LogitFlippedLabelsScoreZero) {
  const char* schema = "x,numerical,0,1\nt,categorical,neg,pos\n";
  std::vector<double> x, t, flipped;
  for (int i = 0; i < 100; ++i) {
    x.push_back(i / 99.0);
    t.push_back(i >= 50 ? 1.0 : 0.0);
    flipped.push_back(i >= 50 ? 0.0 : 1.0);
  }
  const F1Result r =
      LogitF1(MakeTable(schema, {x, flipped}), MakeTable(schema, {x, t}), "t");
  EXPECT_DOUBLE_EQ(r.f1, 0.0);
}

TEST(EvaluateTest, LogitSingleClassWarns) {
  const char* schema = "x,numerical,0,1\nt,categorical,neg,pos\n";
  const Table train = MakeTable(schema, {{0.1, 0.5, 0.9}, {0, 0, 0}});
  const Table test = MakeTable(schema, {{0.1, 0.9}, {0, 1}});
  const F1Result r = LogitF1(train, test, "t");
  EXPECT_DOUBLE_EQ(r.f1, 0.0);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(EvaluateTest, LogitRejectsBadTargets) {
  const Table t = RandomMixed(50, 4);
  EXPECT_THROW(LogitF1(t, t, "x"), Error);
  EXPECT_THROW(LogitF1(t, t, "color"), Error);
  EXPECT_THROW(LogitF1(t, t, "missing"), Error);
}

TEST(EvaluateTest, SchemaMismatchThrows) {
  const Table a = RandomMixed(20, 1);
  Table b = a;
  b.schema.columns[2].max = 11.0;
  EXPECT_THROW(Evaluate(a, b), Error);
}

TEST(EvaluateTest, JsonKeys) {
  const Table t = RandomMixed(100, 5);
  const MetricsReport r = Evaluate(t, RandomMixed(100, 6));
  const auto j = nlohmann::json::parse(MetricsToJson(r));
  for (const char* key :
       {"ks_complement", "tv_complement", "contingency_similarity",
        "correlation_similarity", "logit_f1", "columns", "contingency_pairs",
        "correlation_pairs", "warnings"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(j["logit_f1"].is_null());
  EXPECT_EQ(j["columns"].size(), 5u);
  EXPECT_NEAR(j["ks_complement"].get<double>(), *r.ks_complement, 1e-15);
}

}  // namespace
}  // namespace slicedp
