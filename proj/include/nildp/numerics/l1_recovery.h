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

#ifndef NILDP_NUMERICS_L1_RECOVERY_H_
#define NILDP_NUMERICS_L1_RECOVERY_H_

#include "Eigen/Core"
#include "absl/status/statusor.h"

namespace nildp::numerics {

// argmin ||z||_K  s.t.  ||G z - u||_1 <= residual_bound, where K is the l1
// ball of radius gauge_radius (so ||z||_K = ||z||_1 / gauge_radius).
struct RecoveryProblem {
  Eigen::MatrixXd op;        // G, p x d
  Eigen::VectorXd observation;  // u, length p
  double residual_bound = 0.0;
  double gauge_radius = 1.0;

  static absl::StatusOr<RecoveryProblem> Create(Eigen::MatrixXd op,
                                                Eigen::VectorXd observation,
                                                double residual_bound,
                                                double gauge_radius);
};

struct RecoveryResult {
  Eigen::VectorXd z;
  double l1_norm = 0.0;
  double gauge = 0.0;     // l1_norm / gauge_radius
  double residual = 0.0;  // ||G z - u||_1
  int64_t iterations = 0;
};

// Solves the recovery program as a linear program in split variables
// (z+, z-, s+, s-) >= 0 with G(z+ - z-) - (s+ - s-) = u and
// sum(s+ + s-) <= residual_bound. On success the residual is at most
// residual_bound + tol.
//
// If the bound is below the smallest achievable l1 residual, returns
// FailedPrecondition whose message reports that minimal residual.
absl::StatusOr<RecoveryResult> L1Recovery(const RecoveryProblem& problem,
                                          double tol = 1e-9);

// min_z ||G z - u||_1, i.e. the smallest residual bound for which the
// recovery program is feasible.
absl::StatusOr<double> MinimalL1Residual(const Eigen::MatrixXd& op,
                                         const Eigen::VectorXd& observation);

}  // namespace nildp::numerics

#endif  // NILDP_NUMERICS_L1_RECOVERY_H_
