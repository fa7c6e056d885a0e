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

// Runs an experiment grid and persists the records.
//
// Output directory layout:
//   results.csv        one line per (cell, replication); byte-identical for a
//                      given config, see kResultsHeader for the columns
//   diagnostics.jsonl  same order, one JSON object per record with the full
//                      pipeline diagnostics and budget audit
//   timings.csv        wall time per record; kept apart because it is the only
//                      non-deterministic output
//   config.json        the resolved config
//
// Records are appended in grid order as soon as they and all their
// predecessors are done, so an interrupted run leaves a prefix and rerunning
// the same config resumes after it.

#ifndef NILDP_HARNESS_RUNNER_H_
#define NILDP_HARNESS_RUNNER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "nildp/harness/config.h"

namespace nildp::harness {

inline constexpr int kSchemaVersion = 1;
inline constexpr char kResultsHeader[] =
    "schema,task,cell,n,d,epsilon,delta,param,param_value,replication,metric,"
    "value,status,audit_digest";

struct ResultRecord {
  std::string task;
  std::string cell;
  int64_t n = 0;
  int64_t d = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::string param;
  int64_t param_value = 0;
  int64_t replication = 0;
  std::string metric;
  double value = 0.0;
  std::string status = "ok";  // "ok" or the failure message
  std::string audit_digest;
  nlohmann::json diagnostics;  // not part of the CSV line
  double wall_seconds = 0.0;   // not part of the CSV line

  std::string CsvLine() const;
};

absl::StatusOr<ResultRecord> ParseCsvLine(const std::string& line);

// Hex FNV-1a of the audit's JSON text.
std::string AuditDigest(const nlohmann::json& audit);

// Seeds. Data (and the non-private oracle fitted on it) depend on the root
// seed, task, n and d only, so every epsilon and task-axis value of one n sees
// the same sample. Privacy noise depends on the full cell and the
// replication.
uint64_t DataSeed(const ExperimentConfig& config, int64_t n);
uint64_t PrivacySeed(const ExperimentConfig& config, const Cell& cell,
                     int64_t replication);

struct RunOptions {
  // Stop after writing this many new records (negative: no limit). Used to
  // simulate an interrupted run.
  int64_t stop_after = -1;
  // Overrides config.threads when positive.
  int64_t threads = 0;
};

struct RunSummary {
  int64_t written = 0;
  int64_t resumed = 0;  // records already present and skipped
  int64_t failed = 0;
};

// Config problems are InvalidArgument. Per-record failures do not stop the
// run; they are written with a non-"ok" status and counted in `failed`.
absl::StatusOr<RunSummary> RunExperiment(const ExperimentConfig& config,
                                         const std::string& out_dir,
                                         const RunOptions& options = {});

// Reads results.csv of a run.
absl::StatusOr<std::vector<ResultRecord>> ReadResults(const std::string& out_dir);

// Checks every record of a run: its audit in diagnostics.jsonl composes to
// the declared budget exactly, the declared budget is the record's
// (epsilon, delta), and the digest matches the CSV.
struct AuditReport {
  int64_t records = 0;
  int64_t exact = 0;
  int64_t test_mode = 0;  // records that claim no privacy
  std::vector<std::string> problems;
};
absl::StatusOr<AuditReport> AuditRun(const std::string& out_dir);

}  // namespace nildp::harness

#endif  // NILDP_HARNESS_RUNNER_H_
