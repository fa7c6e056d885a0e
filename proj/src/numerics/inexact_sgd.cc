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

#include "nildp/numerics/inexact_sgd.h"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "absl/status/status.h"

namespace nildp::numerics {

double StepRule::StepSize(int64_t k) const {
  const double base = 1.0 / smoothness;
  if (sigma <= 0.0) return base;
  return std::min(base, scale / (sigma * std::sqrt(static_cast<double>(k))));
}

Eigen::VectorXd ProjectOntoL2Ball(const Eigen::VectorXd& w, double radius) {
  const double norm = w.norm();
  return norm > radius ? Eigen::VectorXd(w * (radius / norm)) : w;
}

absl::StatusOr<InexactSgdResult> InexactSgd(const GradientOracle& oracle,
                                            const Eigen::VectorXd& w1,
                                            const InexactSgdOptions& options) {
  if (options.steps < 0) return absl::InvalidArgumentError("steps must be >= 0");
  if (!(options.rule.smoothness > 0.0)) {
    return absl::InvalidArgumentError("smoothness must be > 0");
  }
  if (!(options.radius > 0.0)) {
    return absl::InvalidArgumentError("radius must be > 0");
  }
  if (!(options.tail_fraction > 0.0 && options.tail_fraction <= 1.0)) {
    return absl::InvalidArgumentError("tail_fraction must be in (0, 1]");
  }
  InexactSgdResult res;
  Eigen::VectorXd w = ProjectOntoL2Ball(w1, options.radius);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(w.size());
  int64_t averaged = 0;
  const int64_t tail_start = static_cast<int64_t>(std::floor(
      (1.0 - options.tail_fraction) * static_cast<double>(options.steps)));

  for (int64_t k = 1; k <= options.steps; ++k) {
    std::optional<OracleSample> sample = oracle(w, k);
    if (!sample.has_value()) break;
    res.steps_taken = k;
    if (sample->gradient.size() != w.size()) {
      return absl::InvalidArgumentError("oracle gradient has wrong dimension");
    }
    if (!sample->gradient.allFinite()) {
      ++res.skipped;
      std::clog << "inexact_sgd: skipped non-finite gradient at step " << k
                << " (user " << sample->user << ")\n";
    } else {
      w = ProjectOntoL2Ball(w - options.rule.StepSize(k) * sample->gradient,
                            options.radius);
    }
    if (options.observer) options.observer(k, w);
    if (k > tail_start) {
      sum += w;
      ++averaged;
    }
  }
  res.last = w;
  res.average = averaged > 0 ? Eigen::VectorXd(sum / averaged) : w;
  return res;
}

}  // namespace nildp::numerics
