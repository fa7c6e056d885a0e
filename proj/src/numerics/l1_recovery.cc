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

#include "nildp/numerics/l1_recovery.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nildp/numerics/simplex.h"
#include "nildp/status_macros.h"

namespace nildp::numerics {
namespace {

// Equality block [G, -G, -I, I] shared by both programs.
Eigen::MatrixXd SplitEquality(const Eigen::MatrixXd& g) {
  const Eigen::Index p = g.rows();
  const Eigen::Index d = g.cols();
  Eigen::MatrixXd a(p, 2 * d + 2 * p);
  a << g, -g, -Eigen::MatrixXd::Identity(p, p),
      Eigen::MatrixXd::Identity(p, p);
  return a;
}

}  // namespace

absl::StatusOr<RecoveryProblem> RecoveryProblem::Create(
    Eigen::MatrixXd op, Eigen::VectorXd observation, double residual_bound,
    double gauge_radius) {
  if (op.rows() != observation.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "operator has ", op.rows(), " rows but observation has length ",
        observation.size()));
  }
  if (!(residual_bound >= 0.0) || !std::isfinite(residual_bound)) {
    return absl::InvalidArgumentError("residual bound must be >= 0");
  }
  if (!(gauge_radius > 0.0)) {
    return absl::InvalidArgumentError("gauge radius must be > 0");
  }
  if (!op.allFinite() || !observation.allFinite()) {
    return absl::InvalidArgumentError("recovery inputs must be finite");
  }
  return RecoveryProblem{std::move(op), std::move(observation), residual_bound,
                         gauge_radius};
}

absl::StatusOr<double> MinimalL1Residual(const Eigen::MatrixXd& op,
                                         const Eigen::VectorXd& observation) {
  const Eigen::Index p = op.rows();
  const Eigen::Index d = op.cols();
  LinearProgram lp;
  lp.cost = Eigen::VectorXd::Zero(2 * d + 2 * p);
  lp.cost.tail(2 * p).setOnes();
  lp.a_eq = SplitEquality(op);
  lp.b_eq = observation;
  lp.a_ub.resize(0, lp.cost.size());
  lp.b_ub.resize(0);
  ASSIGN_OR_RETURN(const LpSolution sol, SolveLinearProgram(lp));
  const Eigen::VectorXd z = sol.x.head(d) - sol.x.segment(d, d);
  return (op * z - observation).lpNorm<1>();
}

absl::StatusOr<RecoveryResult> L1Recovery(const RecoveryProblem& problem,
                                          double tol) {
  if (!(tol > 0.0)) return absl::InvalidArgumentError("tol must be > 0");
  const Eigen::MatrixXd& g = problem.op;
  const Eigen::VectorXd& u = problem.observation;
  const Eigen::Index p = g.rows();
  const Eigen::Index d = g.cols();

  RecoveryResult result;
  if (u.lpNorm<1>() <= problem.residual_bound) {
    // z = 0 is feasible and has zero norm.
    result.z = Eigen::VectorXd::Zero(d);
    result.residual = u.lpNorm<1>();
    return result;
  }

  LinearProgram lp;
  lp.cost = Eigen::VectorXd::Zero(2 * d + 2 * p);
  lp.cost.head(2 * d).setOnes();
  lp.a_eq = SplitEquality(g);
  lp.b_eq = u;
  lp.a_ub = Eigen::MatrixXd::Zero(1, lp.cost.size());
  lp.a_ub.rightCols(2 * p).setOnes();
  lp.b_ub = Eigen::VectorXd::Constant(1, problem.residual_bound);

  absl::StatusOr<LpSolution> sol = SolveLinearProgram(lp);
  if (absl::IsFailedPrecondition(sol.status())) {
    absl::StatusOr<double> minimal = MinimalL1Residual(g, u);
    return absl::FailedPreconditionError(absl::StrCat(
        "recovery program infeasible: residual bound ",
        problem.residual_bound, " is below the minimal achievable residual ",
        minimal.ok() ? absl::StrCat(*minimal) : std::string("(unknown)")));
  }
  if (!sol.ok()) return sol.status();

  result.z = sol->x.head(d) - sol->x.segment(d, d);
  result.residual = (g * result.z - u).lpNorm<1>();
  result.iterations = sol->iterations;
  if (result.residual > problem.residual_bound + tol) {
    return absl::InternalError(absl::StrCat(
        "recovery residual ", result.residual, " exceeds bound ",
        problem.residual_bound, " + ", tol));
  }
  result.l1_norm = result.z.lpNorm<1>();
  result.gauge = result.l1_norm / problem.gauge_radius;
  return result;
}

}  // namespace nildp::numerics
