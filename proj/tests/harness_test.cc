//
// Copyright 2026 The nildp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gtest/gtest.h"
#include "nildp/glm.h"
#include "nildp/harness/config.h"
#include "nildp/harness/datasets.h"
#include "nildp/harness/rate_fit.h"
#include "nildp/harness/runner.h"
#include "nildp/sparse_linreg.h"

namespace nildp::harness {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nildp_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

json SmokeJson() {
  return {{"task", "mean"},        {"n", {1500, 3000}}, {"d", 40},
          {"epsilon", {1.0, 2.0}}, {"replications", 3}, {"seed", 17},
          {"mean", {{"s", 2}}}};
}

TEST(DatasetsTest, SparseMeanConstruction) {
  const MeanDataset ds = *GenSparseMeanData(100000, 20, 1, 0.5, 1);
  EXPECT_EQ((ds.mu.array() != 0.0).count(), 1);
  EXPECT_NEAR(ds.mu.lpNorm<1>(), 0.5, 1e-15);
  EXPECT_LE(ds.x.rowwise().norm().maxCoeff(), 1.0 + 1e-15);
  // Per-coordinate spread is at most 1/sqrt(d).
  const Eigen::VectorXd mean = ds.x.colwise().mean().transpose();
  EXPECT_LT((mean - ds.mu).cwiseAbs().maxCoeff(),
            4.0 * 0.5 / std::sqrt(20.0) / std::sqrt(1e5));
  EXPECT_EQ(GenSparseMeanData(50, 20, 1, 0.5, 1)->x,
            GenSparseMeanData(50, 20, 1, 0.5, 1)->x);
  EXPECT_FALSE(GenSparseMeanData(10, 5, 6, 0.5, 1).ok());
  EXPECT_FALSE(GenSparseMeanData(10, 5, 2, 1.5, 1).ok());
}

TEST(DatasetsTest, LinregBoundsAndNoiselessOracle) {
  const RegressionDataset ds = *GenSparseLinregData(3000, 30, 3, 0.0, 2);
  EXPECT_LE(ds.y.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_LE(ds.x.rowwise().norm().maxCoeff(), 1.0 + 1e-15);
  EXPECT_NEAR(ds.w_star.lpNorm<1>(), 1.0, 1e-12);
  EXPECT_EQ((ds.w_star.array() != 0.0).count(), 3);
  const Eigen::VectorXd ref = *sparse_linreg::ReferenceSolution(ds.x, ds.y);
  EXPECT_NEAR(sparse_linreg::EmpiricalLoss(ref, ds.x, ds.y),
              sparse_linreg::EmpiricalLoss(ds.w_star, ds.x, ds.y), 1e-6);
  const RegressionDataset noisy = *GenSparseLinregData(3000, 30, 3, 2.0, 2);
  EXPECT_LE(noisy.y.cwiseAbs().maxCoeff(), 1.0);
}

TEST(DatasetsTest, LogisticBalanceAndRecoverableDirection) {
  const LabelledDataset ds = *GenLogisticData(100000, 5, 1.0, 0.0, 3, 4);
  EXPECT_NEAR(ds.y.mean(), 0.0, 0.02);
  EXPECT_TRUE((ds.y.array().abs() == 1.0).all());
  const glm::SgllSpec spec = *glm::LogisticSpec(1.0);
  const Eigen::VectorXd w = *glm::ReferenceMinimizer(spec, ds.x, ds.y);
  const double angle =
      std::acos(std::clamp(w.normalized().dot(ds.w_star), -1.0, 1.0));
  EXPECT_LT(angle * 180.0 / std::numbers::pi, 5.0);
  // Same w_seed, different sample seed: same model.
  EXPECT_EQ(GenLogisticData(10, 5, 1.0, 0.0, 3, 9)->w_star, ds.w_star);
}

TEST(ConfigTest, ParsesAndRoundTrips) {
  const ExperimentConfig c = *ParseConfig(SmokeJson());
  EXPECT_EQ(c.task, Task::kMean);
  EXPECT_EQ(c.mean.s, 2);
  EXPECT_EQ(c.replications, 3);
  EXPECT_EQ(ToJson(*ParseConfig(ToJson(c))), ToJson(c));
}

TEST(ConfigTest, RejectsUnknownKeysAndBadValues) {
  json j = SmokeJson();
  j["replicatons"] = 3;
  EXPECT_EQ(ParseConfig(j).status().code(), absl::StatusCode::kInvalidArgument);
  j = SmokeJson();
  j["mean"]["lamda"] = 1.0;
  EXPECT_NE(ParseConfig(j).status().message().find("mean.lamda"),
            std::string::npos);
  j = SmokeJson();
  j["krr"] = json::object();  // block of another task
  EXPECT_FALSE(ParseConfig(j).ok());
  j = SmokeJson();
  j["n"] = json::array();
  EXPECT_FALSE(ParseConfig(j).ok());
  j = SmokeJson();
  j["replications"] = 0;
  EXPECT_FALSE(ParseConfig(j).ok());
  j = SmokeJson();
  j["d"] = "forty";
  EXPECT_FALSE(ParseConfig(j).ok());
  j = SmokeJson();
  j["task"] = "median";
  EXPECT_FALSE(ParseConfig(j).ok());
}

TEST(ConfigTest, GridOrderAndKeys) {
  json j = {{"task", "krr"}, {"n", {100, 200}}, {"d", 3}, {"epsilon", {1.0}},
            {"krr", {{"d_p", {8, 16}}}}};
  const std::vector<Cell> cells = ExpandGrid(*ParseConfig(j));
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[0].key, "krr/n=100/d=3/eps=1/d_p=8");
  EXPECT_EQ(cells[1].key, "krr/n=100/d=3/eps=1/d_p=16");
  EXPECT_EQ(cells[2].n, 200);
}

TEST(RunnerTest, SmokeConfigWritesExactlyRRecords) {
  json j = SmokeJson();
  j["n"] = {1500};
  j["epsilon"] = {1.0};
  const ExperimentConfig c = *ParseConfig(j);
  const fs::path dir = FreshDir("smoke");
  const RunSummary s = *RunExperiment(c, dir.string());
  EXPECT_EQ(s.written, 3);
  EXPECT_EQ(s.failed, 0);
  const std::vector<ResultRecord> records = *ReadResults(dir.string());
  ASSERT_EQ(records.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(records[i].replication, i);
    EXPECT_EQ(records[i].metric, "l2_error");
  }
  const AuditReport audit = *AuditRun(dir.string());
  EXPECT_EQ(audit.exact, 3);
  EXPECT_TRUE(audit.problems.empty());
}

TEST(RunnerTest, RepeatedRunIsByteIdentical) {
  const ExperimentConfig c = *ParseConfig(SmokeJson());
  const fs::path a = FreshDir("det_a"), b = FreshDir("det_b");
  ASSERT_TRUE(RunExperiment(c, a.string()).ok());
  RunOptions threaded;
  threaded.threads = 3;
  ASSERT_TRUE(RunExperiment(c, b.string(), threaded).ok());
  for (const char* f : {"results.csv", "diagnostics.jsonl", "config.json"}) {
    EXPECT_EQ(Slurp(a / f), Slurp(b / f)) << f;
  }
  // A different root seed changes the records.
  ExperimentConfig other = c;
  other.seed = 18;
  const fs::path o = FreshDir("det_o");
  ASSERT_TRUE(RunExperiment(other, o.string()).ok());
  EXPECT_NE(Slurp(a / "results.csv"), Slurp(o / "results.csv"));
}

TEST(RunnerTest, ResumeAfterInterruptionIsByteIdentical) {
  const ExperimentConfig c = *ParseConfig(SmokeJson());
  const fs::path full = FreshDir("full"), part = FreshDir("part");
  ASSERT_TRUE(RunExperiment(c, full.string()).ok());
  RunOptions stop;
  stop.stop_after = 5;
  EXPECT_EQ(RunExperiment(c, part.string(), stop)->written, 5);
  // Simulate a kill mid-write: a torn line at the end of both files.
  std::ofstream(part / "results.csv", std::ios::app) << "1,mean,mean/n=30";
  std::ofstream(part / "diagnostics.jsonl", std::ios::app) << "{\"cell\":";
  const RunSummary s = *RunExperiment(c, part.string());
  EXPECT_EQ(s.resumed, 5);
  EXPECT_EQ(s.written, 7);
  EXPECT_EQ(Slurp(full / "results.csv"), Slurp(part / "results.csv"));
  EXPECT_EQ(Slurp(full / "diagnostics.jsonl"), Slurp(part / "diagnostics.jsonl"));
}

TEST(RunnerTest, RefusesToMixConfigs) {
  const fs::path dir = FreshDir("mix");
  ASSERT_TRUE(RunExperiment(*ParseConfig(SmokeJson()), dir.string()).ok());
  json j = SmokeJson();
  j["d"] = 41;
  EXPECT_EQ(RunExperiment(*ParseConfig(j), dir.string()).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(RunnerTest, FailedCellIsRecordedAndRunContinues) {
  json j = {{"task", "glm-logistic"}, {"n", {200}}, {"d", 3},
            {"epsilon", {4.0}}, {"replications", 2}, {"seed", 1},
            {"glm", {{"p", {glm::kMaxDegree + 1, 1}}, {"held_out", 500}}}};
  const fs::path dir = FreshDir("fail");
  const RunSummary s = *RunExperiment(*ParseConfig(j), dir.string());
  EXPECT_EQ(s.written, 4);
  EXPECT_EQ(s.failed, 2);
  const std::vector<ResultRecord> r = *ReadResults(dir.string());
  EXPECT_NE(r[0].status, "ok");
  EXPECT_TRUE(std::isnan(r[0].value));
  EXPECT_EQ(r[2].status, "ok");
}

TEST(RunnerTest, OracleSharedAcrossReplicationsNoiseIsNot) {
  json j = {{"task", "linreg"}, {"n", {800}}, {"d", 20}, {"epsilon", {2.0}},
            {"replications", 2}, {"seed", 5}};
  const fs::path dir = FreshDir("oracle");
  ASSERT_TRUE(RunExperiment(*ParseConfig(j), dir.string()).ok());
  std::ifstream in(dir / "diagnostics.jsonl");
  std::string l0, l1;
  std::getline(in, l0);
  std::getline(in, l1);
  const json d0 = json::parse(l0)["diagnostics"], d1 = json::parse(l1)["diagnostics"];
  EXPECT_EQ(d0["reference_loss"], d1["reference_loss"]);
  EXPECT_NE(d0["loss"], d1["loss"]);
}

TEST(RateFitTest, RecoversKnownSlope) {
  std::vector<double> x = {1e3, 4e3, 1.6e4, 6.4e4}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.25));
  const LogLogFit f = *FitLogLog(x, y);
  EXPECT_NEAR(f.slope, -0.25, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(f.slope_stderr, 0.0, 1e-12);
  // Independent closed form for the slope standard error on 3 points.
  const LogLogFit g = *FitLogLog({1.0, std::exp(1.0), std::exp(2.0)},
                                 {1.0, std::exp(1.0), 1.0});
  EXPECT_NEAR(g.slope, 0.0, 1e-12);
  // residuals (-1/3, 2/3, -1/3): rss = 2/3, sxx = 2.
  EXPECT_NEAR(g.slope_stderr, std::sqrt((2.0 / 3.0) / 1.0 / 2.0), 1e-12);
  EXPECT_FALSE(FitLogLog({1.0}, {1.0}).ok());
  EXPECT_FALSE(FitLogLog({1.0, 2.0}, {1.0, -1.0}).ok());
}

TEST(RateFitTest, MediansPerGroup) {
  std::vector<ResultRecord> recs;
  for (int64_t n : {100, 400}) {
    for (double v : {3.0, 1.0, 2.0}) {
      ResultRecord r;
      r.task = "mean";
      r.n = n;
      r.d = 5;
      r.epsilon = 1.0;
      r.value = v / (n == 400 ? 2.0 : 1.0);
      recs.push_back(r);
    }
  }
  recs.back().status = "failed";
  const std::vector<RateSeries> s = *FitRates(recs);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].medians[0], 2.0);
  EXPECT_EQ(s[0].medians[1], 1.0);  // median of {1.5, 0.5}
  EXPECT_EQ(s[0].counts[1], 2);
  EXPECT_TRUE(s[0].strictly_decreasing);
  EXPECT_NEAR(s[0].fit.slope, -0.5, 1e-12);
}

TEST(ResultRecordTest, CsvRoundTrip) {
  ResultRecord r;
  r.task = "krr";
  r.cell = "krr/n=5/d=2/eps=1/d_p=8";
  r.n = 5;
  r.d = 2;
  r.epsilon = 0.1;
  r.delta = 1e-5;
  r.param = "d_p";
  r.param_value = 8;
  r.replication = 3;
  r.metric = "prediction_sup_gap";
  r.value = 1.0 / 3.0;
  r.status = "bad, really\nbad";
  r.audit_digest = "00ff";
  const ResultRecord back = *ParseCsvLine(r.CsvLine());
  EXPECT_EQ(back.value, r.value);
  EXPECT_EQ(back.epsilon, r.epsilon);
  EXPECT_EQ(back.status, "bad; really;bad");
  EXPECT_EQ(back.CsvLine(), ParseCsvLine(back.CsvLine())->CsvLine());
}

}  // namespace
}  // namespace nildp::harness
