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

// Projected stochastic gradient driver for (gamma, beta, sigma) inexact
// oracles on an l2 ball.

#ifndef NILDP_NUMERICS_INEXACT_SGD_H_
#define NILDP_NUMERICS_INEXACT_SGD_H_

#include <cstdint>
#include <functional>
#include <optional>

#include "Eigen/Core"
#include "absl/status/statusor.h"

namespace nildp::numerics {

// One stochastic gradient returned by an oracle, tagged with the user whose
// data produced it.
struct OracleSample {
  Eigen::VectorXd gradient;
  uint64_t user = 0;
  uint64_t stream_id = 0;
};

// Called once per step with the current iterate and the 1-based step index.
// Returning std::nullopt ends the run early (oracle exhausted).
using GradientOracle =
    std::function<std::optional<OracleSample>(const Eigen::VectorXd& w,
                                              int64_t step)>;

// eta_k = min(1 / smoothness, scale / (sigma * sqrt(k))). With sigma == 0 the
// step is 1 / smoothness.
struct StepRule {
  double smoothness = 1.0;
  double sigma = 0.0;
  double scale = 1.0;

  double StepSize(int64_t k) const;
};

struct InexactSgdOptions {
  int64_t steps = 0;
  StepRule rule;
  double radius = 1.0;
  // Iterates after step (1 - tail_fraction) * steps enter the average.
  double tail_fraction = 0.5;
  // Observes (k, w_{k+1}) after every update.
  std::function<void(int64_t, const Eigen::VectorXd&)> observer;
};

struct InexactSgdResult {
  Eigen::VectorXd last;
  Eigen::VectorXd average;  // tail (Polyak-Ruppert) average
  int64_t steps_taken = 0;
  int64_t skipped = 0;  // samples with non-finite gradients
};

Eigen::VectorXd ProjectOntoL2Ball(const Eigen::VectorXd& w, double radius);

absl::StatusOr<InexactSgdResult> InexactSgd(const GradientOracle& oracle,
                                            const Eigen::VectorXd& w1,
                                            const InexactSgdOptions& options);

}  // namespace nildp::numerics

#endif  // NILDP_NUMERICS_INEXACT_SGD_H_
