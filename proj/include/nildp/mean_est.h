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

// Sparse mean estimation from one-shot projected, noised reports:
// random sketch -> Gaussian noise -> median of group means in l1 ->
// l1-gauge recovery.

#ifndef NILDP_MEAN_EST_H_
#define NILDP_MEAN_EST_H_

#include <cstdint>
#include <span>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "nildp/numerics/projection.h"
#include "nildp/privacy.h"

namespace nildp::mean_est {

struct MeanEstConfig {
  double lambda = 1.0;  // l1 bound on the population mean
  privacy::PrivacyBudget budget;
  privacy::NoisePolicy policy;
  // Constant in front of the residual bound of the recovery program.
  double residual_constant = 100.0;
  uint64_t seed = 0;
};

struct DerivedSizes {
  int64_t p = 0;  // sketch dimension, min(ceil(lambda eps sqrt(n)), d)
  int64_t m = 0;  // number of groups, min(ceil(18 ln(1/delta)), n)
  bool p_capped = false;
  bool m_capped = false;
};

absl::StatusOr<DerivedSizes> ComputeSizes(const MeanEstConfig& config,
                                          int64_t n, int64_t d);

// C0 * p * ln(n d / delta) / eps * sqrt(m / n); 0 in test mode.
double ResidualBound(const MeanEstConfig& config, int64_t n, int64_t d,
                     const DerivedSizes& sizes);

// y = G x + r with r ~ N(0, sigma^2 I_p), x clipped to the unit ball first.
absl::StatusOr<Eigen::VectorXd> ClientReport(
    const Eigen::VectorXd& x, const numerics::ProjectionOperator& g,
    const privacy::PrivacyBudget& budget, const privacy::NoisePolicy& policy,
    SeededRng& rng);

// Per-user ledger of ClientReport: a single invocation at the full budget.
privacy::BudgetAudit ReportAudit(const MeanEstConfig& config);

struct GroupMean {
  Eigen::VectorXd mean;
  int64_t size = 0;
};

// Contiguous groups of floor(n/m) reports (one report per row); the last
// n mod m reports are dropped.
absl::StatusOr<std::vector<GroupMean>> GroupMeans(
    const Eigen::MatrixXd& reports, int64_t m);

struct MedianOfMeans {
  Eigen::VectorXd center;
  int64_t index = 0;     // j*
  double radius = 0.0;   // r_{j*}
};

// r_j is the ceil(m/2)-th smallest l1 distance from mu_j to the members of the
// set (itself included); returns mu_{j*} with j* = argmin r_j, lowest index
// on ties.
absl::StatusOr<MedianOfMeans> SelectMedianOfMeans(
    std::span<const GroupMean> means);

struct MeanEstimate {
  Eigen::VectorXd z;
  nlohmann::json diagnostics;
};

// Full pipeline over the rows of `data` (n x d). The sketch is sampled once
// from config.seed and shared by all users; user i draws its noise from
// stream (kReport, i).
absl::StatusOr<MeanEstimate> EstimateMean(const Eigen::MatrixXd& data,
                                          const MeanEstConfig& config);

// Same pipeline with a caller-supplied sketch (p x d) in place of the sampled
// one, e.g. the identity in noiseless checks.
absl::StatusOr<MeanEstimate> EstimateMeanWithSketch(
    const Eigen::MatrixXd& data, const MeanEstConfig& config,
    const numerics::ProjectionOperator& g);

// Reference point for experiments: every user privatizes x directly in R^d at
// the same budget and the server averages.
absl::StatusOr<Eigen::VectorXd> NaiveMeanBaseline(const Eigen::MatrixXd& data,
                                                  const MeanEstConfig& config);

}  // namespace nildp::mean_est

#endif  // NILDP_MEAN_EST_H_
