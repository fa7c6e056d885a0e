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

// Log-log rate fits over the records of a run.

#ifndef NILDP_HARNESS_RATE_FIT_H_
#define NILDP_HARNESS_RATE_FIT_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nildp/harness/runner.h"

namespace nildp::harness {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  // 0 with only two points
};

// Ordinary least squares of log(y) on log(x). Needs >= 2 distinct positive x
// and positive y.
absl::StatusOr<LogLogFit> FitLogLog(const std::vector<double>& x,
                                    const std::vector<double>& y);

enum class RateAxis { kN, kParam };

struct RateSeries {
  std::string group;  // the fixed coordinates, e.g. "eps=1" or "n=2000/eps=1"
  std::vector<double> x;
  std::vector<double> medians;  // median over replications with status ok
  std::vector<int64_t> counts;
  bool strictly_decreasing = false;
  LogLogFit fit;
  bool fitted = false;
};

// Groups the ok records by every grid coordinate except `axis`, takes the
// median across replications at each axis value and fits log-log.
absl::StatusOr<std::vector<RateSeries>> FitRates(
    const std::vector<ResultRecord>& records, RateAxis axis = RateAxis::kN);

double Median(std::vector<double> v);

}  // namespace nildp::harness

#endif  // NILDP_HARNESS_RATE_FIT_H_
