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

// Dense two-phase primal simplex for small linear programs
//
//   minimize    c^T x
//   subject to  A_eq x  = b_eq
//               A_ub x <= b_ub
//               x >= 0.

#ifndef NILDP_NUMERICS_SIMPLEX_H_
#define NILDP_NUMERICS_SIMPLEX_H_

#include <cstdint>

#include "Eigen/Core"
#include "absl/status/statusor.h"

namespace nildp::numerics {

struct LinearProgram {
  Eigen::VectorXd cost;
  Eigen::MatrixXd a_eq;  // may have zero rows
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd a_ub;  // may have zero rows
  Eigen::VectorXd b_ub;
};

struct SimplexOptions {
  double pivot_tolerance = 1e-9;
  double feasibility_tolerance = 1e-8;
  // Degenerate pivots tolerated under Dantzig's rule before switching to
  // Bland's rule for the rest of the phase.
  int64_t degenerate_streak_limit = 50;
  int64_t max_iterations = 0;  // 0 means 50 * (rows + cols)
};

struct LpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  int64_t iterations = 0;
};

// Errors: InvalidArgument on shape mismatch, FailedPrecondition when
// infeasible (the message carries the minimal phase-one infeasibility),
// OutOfRange when unbounded, ResourceExhausted on the iteration cap.
absl::StatusOr<LpSolution> SolveLinearProgram(
    const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace nildp::numerics

#endif  // NILDP_NUMERICS_SIMPLEX_H_
