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

#ifndef NILDP_NUMERICS_FRANK_WOLFE_H_
#define NILDP_NUMERICS_FRANK_WOLFE_H_

#include <cstdint>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"

namespace nildp::numerics {

struct FrankWolfeOptions {
  int64_t max_iterations = 1000;
  double gap_tolerance = 1e-6;
  bool record_gaps = false;
};

struct FrankWolfeResult {
  Eigen::VectorXd w;
  double objective = 0.0;
  double gap = 0.0;  // duality gap at the returned iterate
  int64_t iterations = 0;
  bool converged = false;
  std::vector<double> gaps;  // per iteration, when requested
};

// Frank-Wolfe for min 1/2 w^T A w + b^T w over {||w||_1 <= radius} with A
// PSD. The linear oracle picks the coordinate of largest |gradient| (lowest
// index on ties) and the step uses exact line search. Every iterate is a
// convex combination of ball vertices, so ||w||_1 <= radius holds throughout.
absl::StatusOr<FrankWolfeResult> FrankWolfeL1(const Eigen::MatrixXd& a,
                                              const Eigen::VectorXd& b,
                                              double radius,
                                              const FrankWolfeOptions& options);

// Euclidean projection onto {||w||_1 <= radius} (sort-based).
Eigen::VectorXd ProjectOntoL1Ball(const Eigen::VectorXd& v, double radius);

struct ProjectedGradientOptions {
  int64_t max_iterations = 20000;
  double tolerance = 1e-12;  // stop once the FW gap falls below this
};

// Accelerated projected gradient (FISTA with restarts) for the same
// l1-constrained quadratic. Used for non-private reference solutions where
// high accuracy matters more than sparsity of iterates.
absl::StatusOr<FrankWolfeResult> ProjectedGradientL1(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double radius,
    const ProjectedGradientOptions& options = {});

// Frank-Wolfe duality gap of w for the l1-ball quadratic.
double L1QuadraticGap(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                      double radius, const Eigen::VectorXd& w);

}  // namespace nildp::numerics

#endif  // NILDP_NUMERICS_FRANK_WOLFE_H_
