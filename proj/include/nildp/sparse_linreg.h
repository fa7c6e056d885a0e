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

// Sparse linear regression from projected, noised (x, y) reports. The server
// debiases the Gram matrix of the reports, projects it onto the PSD cone and
// minimizes the resulting quadratic over the unit l1 ball.

#ifndef NILDP_SPARSE_LINREG_H_
#define NILDP_SPARSE_LINREG_H_

#include <cstdint>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "nildp/numerics/frank_wolfe.h"
#include "nildp/numerics/projection.h"
#include "nildp/privacy.h"

namespace nildp::sparse_linreg {

struct LinRegConfig {
  privacy::PrivacyBudget budget;
  privacy::NoisePolicy policy;
  // Projection dimension. 0 selects ceil(coefficient * sqrt(n eps^2 ln d)),
  // capped at d.
  int64_t m = 0;
  double m_coefficient = 1.0;
  uint64_t seed = 0;
  numerics::FrankWolfeOptions solver;
};

absl::StatusOr<int64_t> ProjectionDim(const LinRegConfig& config, int64_t n,
                                      int64_t d);

// The sketch Phi^T is stored as an m x d operator M, so a report is
// z = privatize(M x).
struct EncodedPair {
  Eigen::VectorXd z;
  double v = 0.0;
  bool clipped = false;  // M x left the unit ball and was rescaled
};

// Each of z and v is released at half the budget. Noise for z comes from
// `z_rng` and for v from `v_rng`.
absl::StatusOr<EncodedPair> ClientEncode(const Eigen::VectorXd& x, double y,
                                         const numerics::ProjectionOperator& m,
                                         const privacy::PrivacyBudget& budget,
                                         const privacy::NoisePolicy& policy,
                                         SeededRng& z_rng, SeededRng& v_rng);

privacy::BudgetAudit EncoderAudit(const LinRegConfig& config);

// Per-coordinate noise scale of the reports, i.e. the sigma used to debias.
absl::StatusOr<double> ReportSigma(const LinRegConfig& config);

struct DebiasedObjective {
  Eigen::MatrixXd q;  // Proj_S+(Z^T Z - n sigma^2 I), m x m
  Eigen::VectorXd c;  // Z^T v
  int64_t n = 0;
  double sigma = 0.0;
};

// `z` holds one report per row (n x m), `v` the matching labels.
absl::StatusOr<DebiasedObjective> BuildObjective(const Eigen::MatrixXd& z,
                                                 const Eigen::VectorXd& v,
                                                 double sigma);

// Minimizes (1/2n) (Mw)^T Q (Mw) - (1/n) c^T M w over ||w||_1 <= 1 in R^d.
absl::StatusOr<numerics::FrankWolfeResult> Solve(
    const DebiasedObjective& objective, const numerics::ProjectionOperator& m,
    const numerics::FrankWolfeOptions& options = {});

// (1/2n) sum_i (x_i^T w - y_i)^2.
double EmpiricalLoss(const Eigen::VectorXd& w, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& y);

// Non-private minimizer of the empirical loss over the unit l1 ball.
absl::StatusOr<Eigen::VectorXd> ReferenceSolution(const Eigen::MatrixXd& x,
                                                  const Eigen::VectorXd& y);

// L(w; D) - L(w_star; D).
double ExcessRisk(const Eigen::VectorXd& w, const Eigen::VectorXd& w_star,
                  const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

struct LinRegFit {
  Eigen::VectorXd w;
  nlohmann::json diagnostics;
};

// Encodes every row of (x, y) with user streams (kReport, i) and (kLabel, i)
// under one shared sketch sampled from config.seed, builds the objective and
// solves it.
absl::StatusOr<LinRegFit> FitPrivate(const Eigen::MatrixXd& x,
                                     const Eigen::VectorXd& y,
                                     const LinRegConfig& config);

}  // namespace nildp::sparse_linreg

#endif  // NILDP_SPARSE_LINREG_H_
