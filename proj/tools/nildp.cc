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

// nildp: command-line driver for the experiment harness.
//
//   nildp mean --config configs/mean_rate.json --out out/mean
//   nildp rate-fit --out out/mean
//   nildp audit --out out/mean
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "json.hpp"
#include "nildp/harness/config.h"
#include "nildp/harness/rate_fit.h"
#include "nildp/harness/runner.h"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

using nildp::harness::ExperimentConfig;

int ExitFor(const absl::Status& s) {
  std::cerr << "error: " << s.message() << "\n";
  return s.code() == absl::StatusCode::kInvalidArgument ? kConfigError
                                                        : kNumericalFailure;
}

struct RunFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out;
  bool paper_exact = false;
  bool test_mode = false;
  int64_t threads = 0;
};

absl::StatusOr<ExperimentConfig> Resolve(const std::string& task,
                                         const RunFlags& f) {
  std::ifstream in(f.config);
  if (!in) return absl::InvalidArgumentError("cannot read " + f.config);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false, true);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError(f.config + ": malformed JSON");
  }
  if (!j.contains("task")) j["task"] = task;
  if (j["task"] != task) {
    return absl::InvalidArgumentError(
        f.config + ": config is for task " + j["task"].dump() +
        ", not " + task);
  }
  absl::StatusOr<ExperimentConfig> c = nildp::harness::ParseConfig(j);
  if (!c.ok()) return c;
  if (f.seed) c->seed = *f.seed;
  if (!f.out.empty()) c->output = f.out;
  if (f.paper_exact) c->paper_exact = true;
  if (f.test_mode) c->test_mode = true;
  if (f.threads > 0) c->threads = f.threads;
  if (c->output.empty()) {
    return absl::InvalidArgumentError("no output directory (use --out)");
  }
  return c;
}

void PrintRates(const std::vector<nildp::harness::RateSeries>& series) {
  std::cout << "group,points,slope,slope_stderr,strictly_decreasing,medians\n";
  for (const auto& s : series) {
    std::cout << s.group << "," << s.x.size() << ",";
    if (s.fitted) {
      std::cout << absl::StrFormat("%.4f,%.4f", s.fit.slope, s.fit.slope_stderr);
    } else {
      std::cout << "nan,nan";
    }
    std::cout << "," << (s.strictly_decreasing ? "true" : "false") << ","
              << absl::StrJoin(s.medians, " ", [](std::string* o, double v) {
                   o->append(absl::StrFormat("%.6g", v));
                 })
              << "\n";
  }
}

int RunTask(const std::string& task, const RunFlags& flags) {
  absl::StatusOr<ExperimentConfig> c = Resolve(task, flags);
  if (!c.ok()) return ExitFor(c.status());
  if (c->test_mode) {
    std::cerr << "note: test mode, no privacy is claimed for this run\n";
  }
  absl::StatusOr<nildp::harness::RunSummary> s =
      nildp::harness::RunExperiment(*c, c->output);
  if (!s.ok()) return ExitFor(s.status());
  std::cout << "wrote " << s->written << " records to " << c->output << " ("
            << s->resumed << " resumed, " << s->failed << " failed)\n";
  absl::StatusOr<std::vector<nildp::harness::ResultRecord>> records =
      nildp::harness::ReadResults(c->output);
  if (records.ok() && c->n.size() >= 2) {
    absl::StatusOr<std::vector<nildp::harness::RateSeries>> rates =
        nildp::harness::FitRates(*records);
    if (rates.ok()) PrintRates(*rates);
  }
  return s->failed > 0 ? kNumericalFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-interactive locally private learning experiments"};
  app.require_subcommand(1);

  RunFlags flags;
  for (const char* task : {"mean", "linreg", "krr", "glm-logistic"}) {
    CLI::App* sub = app.add_subcommand(task, std::string("run the ") + task +
                                                 " experiment grid");
    sub->add_option("--config", flags.config, "experiment config (JSON)")
        ->required();
    sub->add_option("--seed", flags.seed, "root seed, overrides the config");
    sub->add_option("--out", flags.out, "output directory, overrides the config");
    sub->add_flag("--paper-exact", flags.paper_exact,
                  "use the published constants and conventions throughout");
    sub->add_flag("--test-mode", flags.test_mode,
                  "noise scale 0; privacy claims disabled");
    sub->add_option("--threads", flags.threads, "worker threads");
  }

  std::string rate_dir, axis = "n";
  CLI::App* rate = app.add_subcommand("rate-fit", "log-log slope of median metric");
  rate->add_option("--out", rate_dir, "run directory")->required();
  rate->add_option("--axis", axis, "n or param")
      ->check(CLI::IsMember({"n", "param"}));

  std::string audit_dir;
  CLI::App* audit = app.add_subcommand("audit", "verify the budget audit of every record");
  audit->add_option("--out", audit_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kConfigError;
  }

  if (rate->parsed()) {
    auto records = nildp::harness::ReadResults(rate_dir);
    if (!records.ok()) return ExitFor(records.status());
    auto series = nildp::harness::FitRates(
        *records, axis == "n" ? nildp::harness::RateAxis::kN
                              : nildp::harness::RateAxis::kParam);
    if (!series.ok()) return ExitFor(series.status());
    PrintRates(*series);
    return kOk;
  }
  if (audit->parsed()) {
    auto report = nildp::harness::AuditRun(audit_dir);
    if (!report.ok()) return ExitFor(report.status());
    std::cout << report->exact << "/" << report->records
              << " records compose exactly to their declared budget";
    if (report->test_mode > 0) {
      std::cout << " (" << report->test_mode << " in test mode, no privacy claimed)";
    }
    std::cout << "\n";
    for (const std::string& p : report->problems) std::cout << "  " << p << "\n";
    return report->problems.empty() ? kOk : kNumericalFailure;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    return RunTask(sub->get_name(), flags);
  }
  return kConfigError;
}
