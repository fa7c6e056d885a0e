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

// Reference solvers used only by tests. They share no code with the library
// so that agreement between the two is evidence of correctness.

#ifndef NILDP_TESTS_SUPPORT_ORACLES_H_
#define NILDP_TESTS_SUPPORT_ORACLES_H_

#include <vector>

#include "Eigen/Core"

namespace nildp::testing {

struct IpmResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  bool converged = false;
};

// Primal-dual path following for min c^T x s.t. A x = b, x >= 0 (A full row
// rank). Normal equations are solved with a dense Cholesky factorization.
IpmResult InteriorPointLp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                          const Eigen::VectorXd& b, int max_iterations = 200,
                          double tolerance = 1e-10);

// min |z|_1 s.t. |G z - u|_1 <= bound, posed independently of the library:
// variables (z+, z-, s+, s-, slack) >= 0.
IpmResult L1RecoveryByInteriorPoint(const Eigen::MatrixXd& g,
                                    const Eigen::VectorXd& u, double bound);

// Projection onto {|w|_1 <= radius} by bisection on the soft threshold.
Eigen::VectorXd BisectionL1Projection(const Eigen::VectorXd& v, double radius);

// Plain projected gradient with step 1/L for 1/2 w^T A w + b^T w over the l1
// ball; returns the final iterate.
Eigen::VectorXd PlainProjectedGradient(const Eigen::MatrixXd& a,
                                       const Eigen::VectorXd& b, double radius,
                                       int iterations);

double Quadratic(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                 const Eigen::VectorXd& w);

// Least-squares slope of log(y) against log(x).
double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nildp::testing

#endif  // NILDP_TESTS_SUPPORT_ORACLES_H_
