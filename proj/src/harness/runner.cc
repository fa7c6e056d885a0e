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

#include "nildp/harness/runner.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "nildp/glm.h"
#include "nildp/harness/datasets.h"
#include "nildp/kernel_krr.h"
#include "nildp/mean_est.h"
#include "nildp/rng.h"
#include "nildp/sparse_linreg.h"
#include "nildp/status_macros.h"

namespace nildp::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string Num(double v) { return absl::StrFormat("%.17g", v); }

// Keeps free text out of the CSV structure.
std::string Sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::string JobKey(const std::string& cell, int64_t replication) {
  return absl::StrCat(cell, "#", replication);
}

privacy::NoisePolicy PolicyFor(const ExperimentConfig& c) {
  privacy::NoisePolicy policy;
  if (c.paper_exact) policy = privacy::NoisePolicy::PaperExact();
  policy.test_mode = c.test_mode;
  return policy;
}

std::string MetricName(Task task) {
  switch (task) {
    case Task::kMean: return "l2_error";
    case Task::kLinreg: return "excess_empirical_risk";
    case Task::kKrr: return "prediction_sup_gap";
    case Task::kGlmLogistic: return "population_excess_risk";
  }
  return "";
}

// Everything about a cell that does not depend on privacy noise: the sample
// and the non-private oracle fitted to it.
struct CellData {
  int64_t n = -1;
  MeanDataset mean;
  RegressionDataset reg;
  Eigen::VectorXd w_ref;
  double ref_value = 0.0;
  Eigen::MatrixXd test_x;
  std::optional<kernel_krr::ExactKrr> krr_oracle;
  LabelledDataset train, held_out;
  double start_excess = 0.0;
};

kernel_krr::KernelSpec KernelFor(const KrrParams& p) {
  kernel_krr::KernelSpec k;
  k.kind = p.kernel == "laplacian" ? kernel_krr::KernelKind::kLaplacian
                                   : kernel_krr::KernelKind::kGaussian;
  k.lengthscale = p.lengthscale;
  k.scale = p.scale;
  return k;
}

absl::StatusOr<CellData> PrepareCell(const ExperimentConfig& c, int64_t n) {
  CellData data;
  data.n = n;
  const uint64_t seed = DataSeed(c, n);
  switch (c.task) {
    case Task::kMean: {
      ASSIGN_OR_RETURN(data.mean, GenSparseMeanData(n, c.d, c.mean.s,
                                                    c.mean.lambda, seed));
      break;
    }
    case Task::kLinreg: {
      ASSIGN_OR_RETURN(data.reg, GenSparseLinregData(n, c.d, c.linreg.s,
                                                     c.linreg.noise, seed));
      ASSIGN_OR_RETURN(data.w_ref,
                       sparse_linreg::ReferenceSolution(data.reg.x, data.reg.y));
      data.ref_value =
          sparse_linreg::EmpiricalLoss(data.w_ref, data.reg.x, data.reg.y);
      break;
    }
    case Task::kKrr: {
      ASSIGN_OR_RETURN(data.reg, GenKernelData(n, c.d, c.krr.noise, seed));
      ASSIGN_OR_RETURN(RegressionDataset test,
                       GenKernelData(c.krr.test_points, c.d, c.krr.noise,
                                     MixSeed(seed, 2)));
      data.test_x = std::move(test.x);
      ASSIGN_OR_RETURN(data.krr_oracle,
                       kernel_krr::ExactKrr::Fit(data.reg.x, data.reg.y,
                                                 KernelFor(c.krr), c.krr.c));
      break;
    }
    case Task::kGlmLogistic: {
      ASSIGN_OR_RETURN(const glm::SgllSpec spec, glm::LogisticSpec(c.glm.r));
      ASSIGN_OR_RETURN(data.train, GenLogisticData(n, c.d, c.glm.r, c.glm.margin,
                                                   seed, MixSeed(seed, 1)));
      ASSIGN_OR_RETURN(data.held_out,
                       GenLogisticData(c.glm.held_out, c.d, c.glm.r,
                                       c.glm.margin, seed, MixSeed(seed, 2)));
      ASSIGN_OR_RETURN(data.w_ref, glm::ReferenceMinimizer(spec, data.held_out.x,
                                                           data.held_out.y));
      data.ref_value =
          glm::MeanLoss(spec, data.w_ref, data.held_out.x, data.held_out.y);
      data.start_excess =
          glm::MeanLoss(spec, Eigen::VectorXd::Zero(c.d), data.held_out.x,
                        data.held_out.y) -
          data.ref_value;
      break;
    }
  }
  return data;
}

// Runs one replication and returns (metric value, diagnostics).
absl::StatusOr<std::pair<double, json>> RunPipeline(const ExperimentConfig& c,
                                                    const Cell& cell,
                                                    const CellData& data,
                                                    uint64_t seed) {
  const privacy::PrivacyBudget budget{cell.epsilon, c.delta};
  const privacy::NoisePolicy policy = PolicyFor(c);
  switch (c.task) {
    case Task::kMean: {
      mean_est::MeanEstConfig mc;
      mc.lambda = c.mean.lambda;
      mc.budget = budget;
      mc.policy = policy;
      mc.residual_constant = c.mean.residual_constant;
      mc.seed = seed;
      ASSIGN_OR_RETURN(mean_est::MeanEstimate est,
                       mean_est::EstimateMean(data.mean.x, mc));
      ASSIGN_OR_RETURN(const Eigen::VectorXd naive,
                       mean_est::NaiveMeanBaseline(data.mean.x, mc));
      est.diagnostics["naive_l2_error"] = (naive - data.mean.mu).norm();
      return std::make_pair((est.z - data.mean.mu).norm(),
                            std::move(est.diagnostics));
    }
    case Task::kLinreg: {
      sparse_linreg::LinRegConfig lc;
      lc.budget = budget;
      lc.policy = policy;
      lc.m = c.linreg.m;
      lc.m_coefficient = c.linreg.m_coefficient;
      lc.seed = seed;
      lc.solver.max_iterations = c.linreg.max_iterations;
      ASSIGN_OR_RETURN(sparse_linreg::LinRegFit fit,
                       sparse_linreg::FitPrivate(data.reg.x, data.reg.y, lc));
      const double loss =
          sparse_linreg::EmpiricalLoss(fit.w, data.reg.x, data.reg.y);
      fit.diagnostics["loss"] = loss;
      fit.diagnostics["reference_loss"] = data.ref_value;
      fit.diagnostics["zero_excess"] =
          sparse_linreg::EmpiricalLoss(Eigen::VectorXd::Zero(c.d), data.reg.x,
                                       data.reg.y) -
          data.ref_value;
      return std::make_pair(loss - data.ref_value, std::move(fit.diagnostics));
    }
    case Task::kKrr: {
      kernel_krr::KrrConfig kc;
      kc.c = c.krr.c;
      kc.d_p = cell.param_value;
      kc.budget = budget;
      kc.policy = policy;
      if (c.paper_exact) {
        kc.scaling = kernel_krr::FeatureScaling::kPaperExact;
        kc.objective = kernel_krr::KrrObjective::kPaperExact;
      }
      kc.paper_exact_radius = c.krr.paper_exact_radius;
      kc.seed = seed;
      ASSIGN_OR_RETURN(kernel_krr::KrrFit fit,
                       kernel_krr::KrrPipeline(data.reg.x, data.reg.y,
                                               KernelFor(c.krr), kc));
      double oracle_sup = 0.0;
      for (Eigen::Index i = 0; i < data.test_x.rows(); ++i) {
        oracle_sup = std::max(
            oracle_sup,
            std::abs(data.krr_oracle->Predict(data.test_x.row(i).transpose())));
      }
      fit.diagnostics["oracle_sup"] = oracle_sup;
      const double gap = kernel_krr::PredictionSupGap(
          fit.map, fit.w, *data.krr_oracle, data.test_x);
      return std::make_pair(gap, std::move(fit.diagnostics));
    }
    case Task::kGlmLogistic: {
      ASSIGN_OR_RETURN(const glm::SgllSpec spec, glm::LogisticSpec(c.glm.r));
      glm::LearnConfig lc;
      lc.budget = budget;
      lc.policy = policy;
      lc.oracle.gamma = c.glm.gamma;
      lc.oracle.c = c.glm.c;
      lc.oracle.explicit_p = cell.param_value;
      if (c.paper_exact) lc.oracle.constant = glm::ConstantTerm::kFixedHalf;
      lc.step_scale = c.glm.step_scale;
      lc.tail_fraction = c.glm.tail_fraction;
      lc.seed = seed;
      ASSIGN_OR_RETURN(glm::LearnResult res,
                       glm::Learn(data.train.x, data.train.y, spec, lc,
                                  Eigen::VectorXd::Zero(c.d)));
      const auto excess = [&](const Eigen::VectorXd& w) {
        return glm::MeanLoss(spec, w, data.held_out.x, data.held_out.y) -
               data.ref_value;
      };
      res.diagnostics["reference_risk"] = data.ref_value;
      res.diagnostics["excess_risk_at_start"] = data.start_excess;
      res.diagnostics["excess_risk_last"] = excess(res.last);
      res.diagnostics["alpha1"] = res.coeffs.alpha1;
      res.diagnostics["alpha2"] = res.coeffs.alpha2;
      return std::make_pair(excess(res.average), std::move(res.diagnostics));
    }
  }
  return absl::InternalError("unreachable");
}

// Lines of `path` that end in a newline; a torn last line is dropped.
std::vector<std::string> CompleteLines(const fs::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path, std::ios::binary);
  if (!in) return lines;
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  size_t start = 0;
  for (size_t pos; (pos = text.find('\n', start)) != std::string::npos;
       start = pos + 1) {
    lines.push_back(text.substr(start, pos - start));
  }
  return lines;
}

void WriteLines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const std::string& l : lines) out << l << '\n';
}

json Comparable(const ExperimentConfig& c) {
  json j = ToJson(c);
  j.erase("output");
  j.erase("threads");
  return j;
}

// Restores the longest consistent prefix of an earlier run in `dir` and
// returns the job keys it covers.
absl::StatusOr<std::set<std::string>> Recover(const ExperimentConfig& c,
                                              const fs::path& dir) {
  std::set<std::string> done;
  const fs::path cfg = dir / "config.json";
  if (fs::exists(cfg)) {
    std::ifstream in(cfg);
    const json prev = json::parse(in, nullptr, false);
    if (prev.is_discarded() || prev != Comparable(c)) {
      return absl::InvalidArgumentError(absl::StrCat(
          dir.string(), " holds the output of a different config"));
    }
  }
  std::vector<std::string> csv = CompleteLines(dir / "results.csv");
  std::vector<std::string> diag = CompleteLines(dir / "diagnostics.jsonl");
  std::vector<std::string> keep_csv = {kResultsHeader}, keep_diag;
  if (!csv.empty() && csv.front() != kResultsHeader) {
    return absl::InvalidArgumentError("results.csv has an unknown header");
  }
  for (size_t i = 1; i < csv.size() && i - 1 < diag.size(); ++i) {
    absl::StatusOr<ResultRecord> rec = ParseCsvLine(csv[i]);
    const json d = json::parse(diag[i - 1], nullptr, false);
    if (!rec.ok() || d.is_discarded() || !d.contains("cell") ||
        d["cell"] != rec->cell || d["replication"] != rec->replication) {
      break;
    }
    done.insert(JobKey(rec->cell, rec->replication));
    keep_csv.push_back(csv[i]);
    keep_diag.push_back(diag[i - 1]);
  }
  std::vector<std::string> timings = {"cell,replication,wall_seconds"};
  for (const std::string& l : CompleteLines(dir / "timings.csv")) {
    std::vector<std::string> f = absl::StrSplit(l, ',');
    int64_t rep = 0;
    if (f.size() == 3 && absl::SimpleAtoi(f[1], &rep) &&
        done.count(JobKey(f[0], rep))) {
      timings.push_back(l);
    }
  }
  WriteLines(dir / "results.csv", keep_csv);
  WriteLines(dir / "diagnostics.jsonl", keep_diag);
  WriteLines(dir / "timings.csv", timings);
  std::ofstream(cfg, std::ios::trunc) << Comparable(c).dump(2) << '\n';
  return done;
}

}  // namespace

std::string ResultRecord::CsvLine() const {
  return absl::StrCat(kSchemaVersion, ",", task, ",", cell, ",", n, ",", d, ",",
                      Num(epsilon), ",", Num(delta), ",", param, ",",
                      param_value, ",", replication, ",", metric, ",",
                      Num(value), ",", Sanitize(status), ",", audit_digest);
}

absl::StatusOr<ResultRecord> ParseCsvLine(const std::string& line) {
  std::vector<std::string> f = absl::StrSplit(line, ',');
  if (f.size() != 14) {
    return absl::InvalidArgumentError(absl::StrCat("bad record: ", line));
  }
  int schema = 0;
  ResultRecord r;
  bool ok = absl::SimpleAtoi(f[0], &schema) && schema == kSchemaVersion &&
            absl::SimpleAtoi(f[3], &r.n) && absl::SimpleAtoi(f[4], &r.d) &&
            absl::SimpleAtod(f[5], &r.epsilon) &&
            absl::SimpleAtod(f[6], &r.delta) &&
            absl::SimpleAtoi(f[8], &r.param_value) &&
            absl::SimpleAtoi(f[9], &r.replication);
  if (!ok) return absl::InvalidArgumentError(absl::StrCat("bad record: ", line));
  // SimpleAtod rejects "nan", which failed records carry.
  r.value = std::strtod(f[11].c_str(), nullptr);
  r.task = f[1];
  r.cell = f[2];
  r.param = f[7];
  r.metric = f[10];
  r.status = f[12];
  r.audit_digest = f[13];
  return r;
}

std::string AuditDigest(const json& audit) {
  return absl::StrFormat("%016x", Fnv1a(audit.dump()));
}

uint64_t DataSeed(const ExperimentConfig& c, int64_t n) {
  return MixSeed(c.seed, Fnv1a(absl::StrCat(TaskName(c.task), "/n=", n,
                                            "/d=", c.d)));
}

uint64_t PrivacySeed(const ExperimentConfig& c, const Cell& cell,
                     int64_t replication) {
  return MixSeed(MixSeed(c.seed, Fnv1a(cell.key)),
                 static_cast<uint64_t>(replication));
}

absl::StatusOr<RunSummary> RunExperiment(const ExperimentConfig& c,
                                         const std::string& out_dir,
                                         const RunOptions& options) {
  if (out_dir.empty()) return absl::InvalidArgumentError("no output directory");
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot create ", out_dir, ": ", ec.message()));
  }
  ASSIGN_OR_RETURN(const std::set<std::string> done, Recover(c, dir));

  std::ofstream csv(dir / "results.csv", std::ios::app | std::ios::binary);
  std::ofstream diag(dir / "diagnostics.jsonl", std::ios::app | std::ios::binary);
  std::ofstream timing(dir / "timings.csv", std::ios::app | std::ios::binary);
  if (!csv || !diag || !timing) {
    return absl::InternalError(absl::StrCat("cannot write to ", out_dir));
  }

  RunSummary summary;
  summary.resumed = static_cast<int64_t>(done.size());
  int64_t threads = options.threads > 0 ? options.threads : c.threads;
  if (threads <= 0) {
    threads = std::max<int64_t>(1, std::thread::hardware_concurrency());
  }
  bool stopped = false;
  std::optional<CellData> data;

  for (const Cell& cell : ExpandGrid(c)) {
    std::vector<int64_t> todo;
    for (int64_t rep = 0; rep < c.replications; ++rep) {
      if (!done.count(JobKey(cell.key, rep))) todo.push_back(rep);
    }
    if (todo.empty()) continue;
    if (stopped) break;

    std::string cell_error;
    if (!data || data->n != cell.n) {
      data.reset();
      absl::StatusOr<CellData> prepared = PrepareCell(c, cell.n);
      if (prepared.ok()) {
        data = std::move(prepared).value();
      } else {
        cell_error = prepared.status().ToString();
      }
    }

    std::vector<std::optional<ResultRecord>> slots(todo.size());
    size_t next_write = 0;
    std::atomic<size_t> next_job{0};
    std::mutex mu;

    const auto flush_locked = [&] {
      while (next_write < slots.size() && slots[next_write].has_value()) {
        if (options.stop_after >= 0 && summary.written >= options.stop_after) {
          stopped = true;
          return;
        }
        const ResultRecord& r = *slots[next_write];
        csv << r.CsvLine() << '\n';
        json d = {{"cell", r.cell},
                  {"replication", r.replication},
                  {"status", r.status},
                  {"diagnostics", r.diagnostics}};
        diag << d.dump() << '\n';
        timing << r.cell << "," << r.replication << ","
               << absl::StrFormat("%.6f", r.wall_seconds) << '\n';
        csv.flush();
        diag.flush();
        timing.flush();
        ++summary.written;
        if (r.status != "ok") ++summary.failed;
        slots[next_write].reset();
        ++next_write;
      }
    };

    const auto worker = [&] {
      for (;;) {
        {
          std::lock_guard<std::mutex> lock(mu);
          if (stopped) return;
        }
        const size_t job = next_job.fetch_add(1);
        if (job >= todo.size()) return;
        ResultRecord r;
        r.task = TaskName(c.task);
        r.cell = cell.key;
        r.n = cell.n;
        r.d = c.d;
        r.epsilon = cell.epsilon;
        r.delta = c.delta;
        r.param = cell.param;
        r.param_value = cell.param_value;
        r.replication = todo[job];
        r.metric = MetricName(c.task);
        const auto start = std::chrono::steady_clock::now();
        absl::StatusOr<std::pair<double, json>> out =
            absl::InternalError(cell_error);
        if (cell_error.empty()) {
          try {
            out = RunPipeline(c, cell, *data,
                              PrivacySeed(c, cell, r.replication));
          } catch (const std::exception& e) {
            out = absl::InternalError(e.what());
          }
        }
        r.wall_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        if (out.ok()) {
          r.value = out->first;
          r.diagnostics = std::move(out->second);
          if (!std::isfinite(r.value)) r.status = "non-finite metric";
        } else {
          r.value = std::nan("");
          r.status = out.status().ToString();
        }
        r.audit_digest = r.diagnostics.contains("budget_audit")
                             ? AuditDigest(r.diagnostics["budget_audit"])
                             : "none";
        std::lock_guard<std::mutex> lock(mu);
        slots[job] = std::move(r);
        flush_locked();
      }
    };

    const int64_t pool = std::min<int64_t>(threads, todo.size());
    if (pool <= 1) {
      worker();
    } else {
      std::vector<std::thread> workers;
      for (int64_t t = 0; t < pool; ++t) workers.emplace_back(worker);
      for (std::thread& t : workers) t.join();
    }
    if (stopped) break;
  }
  return summary;
}

absl::StatusOr<std::vector<ResultRecord>> ReadResults(const std::string& out_dir) {
  const fs::path path = fs::path(out_dir) / "results.csv";
  if (!fs::exists(path)) {
    return absl::NotFoundError(absl::StrCat(path.string(), " does not exist"));
  }
  const std::vector<std::string> lines = CompleteLines(path);
  if (lines.empty() || lines.front() != kResultsHeader) {
    return absl::InvalidArgumentError("results.csv has an unknown header");
  }
  std::vector<ResultRecord> out;
  for (size_t i = 1; i < lines.size(); ++i) {
    ASSIGN_OR_RETURN(ResultRecord r, ParseCsvLine(lines[i]));
    out.push_back(std::move(r));
  }
  return out;
}

absl::StatusOr<AuditReport> AuditRun(const std::string& out_dir) {
  ASSIGN_OR_RETURN(const std::vector<ResultRecord> records, ReadResults(out_dir));
  const std::vector<std::string> diag =
      CompleteLines(fs::path(out_dir) / "diagnostics.jsonl");
  AuditReport report;
  for (size_t i = 0; i < records.size(); ++i) {
    const ResultRecord& r = records[i];
    const std::string where = JobKey(r.cell, r.replication);
    ++report.records;
    if (i >= diag.size()) {
      report.problems.push_back(absl::StrCat(where, ": no diagnostics line"));
      continue;
    }
    const json d = json::parse(diag[i], nullptr, false);
    if (d.is_discarded() || !d.contains("diagnostics") ||
        !d["diagnostics"].contains("budget_audit")) {
      report.problems.push_back(absl::StrCat(where, ": no budget audit"));
      continue;
    }
    const json& a = d["diagnostics"]["budget_audit"];
    if (AuditDigest(a) != r.audit_digest) {
      report.problems.push_back(absl::StrCat(where, ": digest mismatch"));
    }
    if (!a.value("privacy_claimed", true)) ++report.test_mode;
    const double eps = a["declared"]["epsilon"].get<double>();
    const double delta = a["declared"]["delta"].get<double>();
    if (eps != r.epsilon || delta != r.delta) {
      report.problems.push_back(
          absl::StrCat(where, ": declared budget differs from the record"));
    }
    // Recompose from the entries rather than trusting the stored flag.
    double total_eps = 0.0, total_delta = 0.0;
    for (const json& e : a["entries"]) {
      const int64_t copies = e["copies"].get<int64_t>();
      for (int64_t k = 0; k < copies; ++k) {
        total_eps += e["epsilon"].get<double>();
        total_delta += e["delta"].get<double>();
      }
    }
    if (std::abs(total_eps - eps) <= privacy::kBudgetTolerance &&
        std::abs(total_delta - delta) <= privacy::kBudgetTolerance) {
      ++report.exact;
    } else {
      report.problems.push_back(absl::StrFormat(
          "%s: composed (%.17g, %.17g) != declared (%.17g, %.17g)", where,
          total_eps, total_delta, eps, delta));
    }
  }
  return report;
}

}  // namespace nildp::harness
