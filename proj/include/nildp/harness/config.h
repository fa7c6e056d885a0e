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

// Experiment configuration. A config is one JSON object; every object in it
// is checked against a fixed key set, so a misspelt key is an error rather
// than a silently ignored default.
//
//   {
//     "task": "mean",                 // mean | linreg | krr | glm-logistic
//     "n": [1000, 4000],
//     "d": 200,
//     "epsilon": [1.0],
//     "delta": 1e-5,
//     "replications": 20,
//     "seed": 1,
//     "output": "out/mean",
//     "mean": {"s": 5, "lambda": 1.0}
//   }
//
// Only the block named after the task may appear ("glm" for glm-logistic).

#ifndef NILDP_HARNESS_CONFIG_H_
#define NILDP_HARNESS_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace nildp::harness {

enum class Task { kMean, kLinreg, kKrr, kGlmLogistic };

absl::StatusOr<Task> ParseTask(const std::string& name);
std::string TaskName(Task task);

struct MeanParams {
  int64_t s = 5;
  double lambda = 1.0;
  double residual_constant = 100.0;
};

struct LinregParams {
  int64_t s = 3;
  double noise = 0.1;
  int64_t m = 0;  // 0: ceil(m_coefficient sqrt(n eps^2 ln d))
  double m_coefficient = 1.0;
  int64_t max_iterations = 1000;
};

struct KrrParams {
  std::string kernel = "gaussian";  // gaussian | laplacian
  double lengthscale = 1.0;
  double scale = 1.0;
  double c = 1.0;
  std::vector<int64_t> d_p = {0};  // grid axis; 0 selects the default size
  double noise = 0.1;
  int64_t test_points = 100;
  double paper_exact_radius = 1.0;
};

struct GlmParams {
  double r = 1.0;
  std::vector<int64_t> p = {0};  // grid axis; 0 selects the degree formula
  double gamma = 0.1;
  double c = 2.0;
  double margin = 0.0;
  int64_t held_out = 10000;
  double step_scale = 1.0;
  double tail_fraction = 0.5;
};

struct ExperimentConfig {
  Task task = Task::kMean;
  std::vector<int64_t> n;
  int64_t d = 0;
  std::vector<double> epsilon;
  double delta = 1e-5;
  int64_t replications = 1;
  uint64_t seed = 0;
  std::string output;
  bool paper_exact = false;
  bool test_mode = false;
  int64_t threads = 0;  // 0: hardware concurrency

  MeanParams mean;
  LinregParams linreg;
  KrrParams krr;
  GlmParams glm;
};

// Errors are InvalidArgument and name the offending key.
absl::StatusOr<ExperimentConfig> ParseConfig(const nlohmann::json& j);
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path);

// Fully resolved form, including defaults. ParseConfig(ToJson(c)) == c.
nlohmann::json ToJson(const ExperimentConfig& config);

// One point of the experiment grid.
struct Cell {
  int64_t n = 0;
  double epsilon = 0.0;
  std::string param;       // "d_p" (krr), "p" (glm-logistic) or empty
  int64_t param_value = 0;
  std::string key;         // stable identifier used for seeds and resume
};

// Grid order: n outermost, then epsilon, then the task axis.
std::vector<Cell> ExpandGrid(const ExperimentConfig& config);

}  // namespace nildp::harness

#endif  // NILDP_HARNESS_CONFIG_H_
