// Copyright 2026 The citetrend Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "citetrend/datasets.hpp"
#include "fixtures.hpp"

namespace citetrend {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = testing::scratch_dir("cli");
    {
      std::ofstream cfg(dir_ / "small.json");
      cfg << R"({"n_nodes": 220, "seed": 3, "corpus": "small"})";
    }
    ASSERT_EQ(run("generate --config " + (dir_ / "small.json").string() + " --out " + (dir_ / "small").string()).code, 0);
    save_bundle(symmetric_bundle(), dir_ / "symmetric");
  }

  // 100 papers: 50 in 2010 with 50 mutual citations, 50 in 2011 citing one each.
  static GraphBundle symmetric_bundle() {
    GraphBundle b;
    b.corpus = "symmetric";
    for (int i = 0; i < 50; ++i) b.nodes.push_back(testing::doc("p" + std::to_string(i), 2010));
    for (int i = 0; i < 50; ++i) b.nodes.push_back(testing::doc("t" + std::to_string(i), 2011));
    for (int i = 1; i < 50; ++i) b.edges.emplace_back("p" + std::to_string(i), "p" + std::to_string(i - 1));
    b.edges.emplace_back("p2", "p0");
    for (int i = 0; i < 50; ++i) b.edges.emplace_back("t" + std::to_string(i), "p" + std::to_string(i));
    return b;
  }

  static Result run(const std::string& args) {
    static int counter = 0;
    const fs::path out = dir_ / ("out" + std::to_string(counter) + ".txt");
    const fs::path err = dir_ / ("err" + std::to_string(counter++) + ".txt");
    const std::string cmd = std::string("\"") + CITETREND_CLI_PATH + "\" " + args + " > \"" + out.string() +
                            "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  static std::string bundle(const char* name) { return " --bundle " + (dir_ / name).string(); }

  static inline fs::path dir_;
};

TEST_F(Cli, LambdaOnSymmetricBundle) {
  const Result r = run("lambda" + bundle("symmetric") + " --target-year 2011 --window 10");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "1.000000\n");
}

TEST_F(Cli, GnnAndMlpReportEqualParameterCounts) {
  const Result gnn = run("train --model gnn --seed 1 --epochs 3" + bundle("small"));
  const Result mlp = run("train --model mlp --seed 1 --epochs 3" + bundle("small"));
  ASSERT_EQ(gnn.code, 0) << gnn.err;
  ASSERT_EQ(mlp.code, 0) << mlp.err;
  auto params = [](const std::string& csv) {
    const std::string row = csv.substr(csv.find('\n') + 1);
    return row.substr(row.rfind(',', row.size() - 2) + 1);
  };
  EXPECT_EQ(gnn.out.rfind("model,seed,precision,recall,f1,lambda,params\ngnn,1,", 0), 0u) << gnn.out;
  EXPECT_EQ(params(gnn.out), params(mlp.out));
}

TEST_F(Cli, TrainIsByteStableAndEvaluateMatches) {
  const std::string ckpt = (dir_ / "m.ckpt").string();
  const Result a = run("train --model gnn --seed 4 --epochs 3 --out " + ckpt + bundle("small"));
  const Result b = run("train --model gnn --seed 4 --epochs 3" + bundle("small"));
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const Result e = run("evaluate --ckpt " + ckpt + bundle("small"));
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(e.out, a.out);
}

TEST_F(Cli, AblateWritesCsv) {
  const std::string out = (dir_ / "ablate.csv").string();
  const Result r = run("ablate --fractions 0,1 --seeds 2 --epochs 2 --out " + out + bundle("small"));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(out);
  EXPECT_EQ(csv.rfind("fraction,seed,gnn_f1,mlp_f1\n0.000000,0,", 0), 0u) << csv;
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST_F(Cli, GenerateIsByteStable) {
  const fs::path a = dir_ / "gen_a", b = dir_ / "gen_b";
  const std::string cfg = " --config " + (dir_ / "small.json").string();
  ASSERT_EQ(run("generate" + cfg + " --out " + a.string()).code, 0);
  ASSERT_EQ(run("generate" + cfg + " --out " + b.string()).code, 0);
  for (const char* f : {"manifest.json", "nodes.jsonl", "edges.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f));
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("train --model svm" + bundle("small")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, DataErrorsExitOne) {
  const Result missing = run("lambda --bundle /nonexistent/bundle");
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(missing.err.rfind("error: ", 0), 0u) << missing.err;
  EXPECT_EQ(run("evaluate --ckpt /nonexistent.ckpt" + bundle("small")).code, 1);
  EXPECT_EQ(run("lambda --target-year 1990" + bundle("small")).code, 1);
}

}  // namespace
}  // namespace citetrend
