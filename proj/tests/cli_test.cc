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

#include "slicedp/cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "slicedp/mechanism.h"

namespace slicedp {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path DataFile(const std::string& name) {
  return fs::path(SLICEDP_SOURCE_DIR) / "data" / name;
}

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("slicedp_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string ReadAll(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> SliceArgs(const fs::path& out) {
  return {"--seed", "11", "slice", "--input", DataFile("customers.csv").string(),
          "--schema", DataFile("customers.schema").string(), "--out",
          out.string(), "--m", "8", "--sigma", "1.0", "--delta", "1e-5"};
}

TEST(CliTest, AccountSigma) {
  const Outcome r = Invoke({"account", "--sigma", "1", "--delta", "1e-5", "--d",
                        "100", "--m", "10", "--alpha", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("11.614966"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("21.512925"), std::string::npos) << r.out;
}

TEST(CliTest, AccountJsonAndCalibration) {
  const fs::path dir = Scratch("account");
  const Outcome r = Invoke({"account", "--epsilon", "2", "--delta", "1e-5", "--d",
                        "20", "--m", "10", "--json",
                        (dir / "p.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(ReadAll(dir / "p.json"));
  EXPECT_LE(j["epsilon"].get<double>(), 2.0);
  EXPECT_GT(j["sigma"].get<double>(), 0.0);
  EXPECT_TRUE(j.contains("trail"));
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"account", "--sigma", "1", "--d", "5", "--m", "2"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"account", "--sigma", "1", "--epsilon", "1", "--delta",
                    "1e-5", "--d", "5", "--m", "2"})
                .code,
            kExitUsage);
  EXPECT_EQ(Invoke({"bogus"}).code, kExitUsage);
}

TEST(CliTest, InfeasibleParameters) {
  const Outcome order = Invoke({"account", "--sigma", "1", "--delta", "1e-5",
                                "--d", "4", "--m", "2", "--alpha", "3"});
  EXPECT_EQ(order.code, kExitUsage);
  EXPECT_NE(order.err.find("infeasible"), std::string::npos) << order.err;
  EXPECT_NE(order.err.find("< d"), std::string::npos) << order.err;
  const Outcome empty = Invoke({"account", "--sigma", "1e-6", "--delta",
                                "1e-5", "--d", "2", "--m", "5"});
  EXPECT_EQ(empty.code, kExitUsage);
  EXPECT_NE(empty.err.find("infeasible"), std::string::npos) << empty.err;
}

TEST(CliTest, DataErrorExitCode) {
  const fs::path dir = Scratch("bad");
  {
    std::ofstream csv(dir / "bad.csv");
    csv << "region,plan,churned,age,monthly_spend\n"
        << "north,basic,no,200,10\n"
        << "mars,basic,no,30,10\n";
  }
  const Outcome r = Invoke({"slice", "--input", (dir / "bad.csv").string(),
                        "--schema", DataFile("customers.schema").string(),
                        "--out", (dir / "out").string(), "--m", "4",
                        "--sigma", "1", "--delta", "1e-5"});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("row 1"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("row 2"), std::string::npos) << r.err;
}

TEST(CliTest, SliceIsReproducible) {
  const fs::path a = Scratch("slice_a");
  const fs::path b = Scratch("slice_b");
  ASSERT_EQ(Invoke(SliceArgs(a)).code, kExitOk);
  auto args = SliceArgs(b);
  args.insert(args.begin(), {"--threads", "3"});
  ASSERT_EQ(Invoke(args).code, kExitOk);
  EXPECT_EQ(ReadAll(a / "bundle.bin"), ReadAll(b / "bundle.bin"));
  const SliceBundle bundle = LoadBundle(a / "bundle.bin");
  EXPECT_EQ(bundle.num_records(), 500u);
  EXPECT_EQ(bundle.dims.d, 11u);
  EXPECT_EQ(bundle.dims.m, 8u);
  EXPECT_TRUE(fs::exists(a / "privacy.json"));
  EXPECT_TRUE(fs::exists(a / "schema.txt"));
}

TEST(CliTest, SliceWithSubsampling) {
  const fs::path dir = Scratch("rate");
  auto args = SliceArgs(dir);
  args.insert(args.end(), {"--rate", "0.25"});
  ASSERT_EQ(Invoke(args).code, kExitOk);
  const SliceBundle bundle = LoadBundle(dir / "bundle.bin");
  EXPECT_GT(bundle.num_records(), 80u);
  EXPECT_LT(bundle.num_records(), 170u);
  const auto j = nlohmann::json::parse(ReadAll(dir / "privacy.json"));
  EXPECT_DOUBLE_EQ(j["subsample_rate"].get<double>(), 0.25);
  EXPECT_LT(j["epsilon"].get<double>(),
            j["mechanism_epsilon"].get<double>());
}

TEST(CliTest, PipelineAndStageIsolation) {
  const fs::path dir = Scratch("pipeline");
  EXPECT_EQ(Invoke({"train", "--dir", dir.string()}).code, kExitUsage);
  EXPECT_EQ(Invoke({"generate", "--dir", dir.string(), "--rows", "5"}).code,
            kExitUsage);

  ASSERT_EQ(Invoke(SliceArgs(dir)).code, kExitOk);
  // Training only needs the released artifacts.
  fs::path moved = Scratch("pipeline_moved");
  for (const char* f : {"bundle.bin", "schema.txt"}) {
    fs::copy_file(dir / f, moved / f);
  }
  const Outcome t = Invoke({"--seed", "3", "train", "--dir", moved.string(),
                        "--steps", "5", "--batch-size", "32", "--lr", "1e-3",
                        "--hidden", "16,16"});
  ASSERT_EQ(t.code, kExitOk) << t.err;
  EXPECT_TRUE(fs::exists(moved / "model.bin"));
  EXPECT_EQ(ReadAll(moved / "history.csv").rfind("step,loss\n", 0), 0u);

  const Outcome g = Invoke({"generate", "--dir", moved.string(), "--rows", "40"});
  ASSERT_EQ(g.code, kExitOk) << g.err;
  const Outcome e = Invoke({"evaluate", "--real",
                        DataFile("heldout.csv").string(), "--synthetic",
                        (moved / "synthetic.csv").string(), "--schema",
                        DataFile("customers.schema").string(), "--target",
                        "churned"});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  const auto j = nlohmann::json::parse(e.out);
  EXPECT_GE(j["tv_complement"].get<double>(), 0.0);
  EXPECT_LE(j["tv_complement"].get<double>(), 1.0);
}

TEST(CliTest, GenerateZeroRowsWritesHeader) {
  const fs::path dir = Scratch("zero");
  ASSERT_EQ(Invoke(SliceArgs(dir)).code, kExitOk);
  ASSERT_EQ(Invoke({"train", "--dir", dir.string(), "--steps", "0",
                    "--hidden", "8"})
                .code,
            kExitOk);
  ASSERT_EQ(Invoke({"generate", "--dir", dir.string(), "--rows", "0"}).code,
            kExitOk);
  EXPECT_EQ(ReadAll(dir / "synthetic.csv"),
            "region,plan,churned,age,monthly_spend\n");
}

TEST(CliTest, EvaluateRealAgainstItself) {
  const Outcome e = Invoke({"evaluate", "--real", DataFile("customers.csv").string(),
                        "--synthetic", DataFile("customers.csv").string(),
                        "--schema", DataFile("customers.schema").string()});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  const auto j = nlohmann::json::parse(e.out);
  for (const char* key : {"ks_complement", "tv_complement",
                          "contingency_similarity", "correlation_similarity"}) {
    EXPECT_DOUBLE_EQ(j[key].get<double>(), 1.0) << key;
  }
}

TEST(CliTest, ConfigFile) {
  const fs::path dir = Scratch("config");
  {
    std::ofstream cfg(dir / "account.ini");
    cfg << "seed=4\n[account]\nsigma=1\ndelta=1e-5\nd=100\nm=10\nalpha=2\n";
  }
  const Outcome r =
      Invoke({"--config", (dir / "account.ini").string(), "account"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("11.614966"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace slicedp
