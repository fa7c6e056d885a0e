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

#include "nildp/sparse_linreg.h"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nildp/numerics/symmetric.h"
#include "nildp/status_macros.h"

namespace nildp::sparse_linreg {

namespace {

privacy::PrivacyBudget HalfBudget(const LinRegConfig& config) {
  return config.budget.Fraction(2.0);
}

}  // namespace

absl::StatusOr<int64_t> ProjectionDim(const LinRegConfig& config, int64_t n,
                                      int64_t d) {
  RETURN_IF_ERROR(privacy::ValidateBudget(config.budget));
  if (n < 1 || d < 1) return absl::InvalidArgumentError("need n, d >= 1");
  if (config.m > 0) {
    if (config.m > d) {
      return absl::InvalidArgumentError(
          absl::StrCat("projection dimension ", config.m, " exceeds d = ", d));
    }
    return config.m;
  }
  if (!(config.m_coefficient > 0.0)) {
    return absl::InvalidArgumentError("m coefficient must be positive");
  }
  const double eps = config.budget.epsilon;
  // ln d is 0 at d = 1; the max keeps m >= 1.
  const double raw = std::ceil(
      config.m_coefficient *
      std::sqrt(static_cast<double>(n) * eps * eps *
                std::log(static_cast<double>(d))));
  return std::clamp<int64_t>(static_cast<int64_t>(raw), 1, d);
}

absl::StatusOr<EncodedPair> ClientEncode(const Eigen::VectorXd& x, double y,
                                         const numerics::ProjectionOperator& m,
                                         const privacy::PrivacyBudget& budget,
                                         const privacy::NoisePolicy& policy,
                                         SeededRng& z_rng, SeededRng& v_rng) {
  if (x.size() != m.cols()) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature dimension ", x.size(), " but sketch expects ",
                     m.cols()));
  }
  if (!x.allFinite()) return absl::InvalidArgumentError("x is not finite");
  const privacy::PrivacyBudget half = budget.Fraction(2.0);
  Eigen::VectorXd xc = x;
  privacy::ClipToUnitBall(xc);
  EncodedPair out;
  ASSIGN_OR_RETURN(out.z, privacy::PrivatizeVector(m.Apply(xc), half, policy,
                                                   z_rng, &out.clipped));
  ASSIGN_OR_RETURN(out.v, privacy::PrivatizeScalar(y, half, policy, v_rng));
  return out;
}

privacy::BudgetAudit EncoderAudit(const LinRegConfig& config) {
  privacy::BudgetAudit audit("sparse_linreg", config.budget,
                             config.policy.test_mode);
  audit.Add("projected_features", HalfBudget(config));
  audit.Add("label", HalfBudget(config));
  return audit;
}

absl::StatusOr<double> ReportSigma(const LinRegConfig& config) {
  return config.policy.Sigma(HalfBudget(config));
}

absl::StatusOr<DebiasedObjective> BuildObjective(const Eigen::MatrixXd& z,
                                                 const Eigen::VectorXd& v,
                                                 double sigma) {
  if (z.rows() < 1) return absl::InvalidArgumentError("no reports");
  if (z.rows() != v.size()) {
    return absl::InvalidArgumentError("report and label counts differ");
  }
  if (!(sigma >= 0.0)) return absl::InvalidArgumentError("sigma must be >= 0");
  const double n = static_cast<double>(z.rows());
  ASSIGN_OR_RETURN(const numerics::PsdFactor factor,
                   numerics::PsdProjectShiftedGram(z, n * sigma * sigma));
  DebiasedObjective obj;
  obj.q = factor.Dense();
  obj.c = z.transpose() * v;
  obj.n = z.rows();
  obj.sigma = sigma;
  return obj;
}

absl::StatusOr<numerics::FrankWolfeResult> Solve(
    const DebiasedObjective& objective, const numerics::ProjectionOperator& m,
    const numerics::FrankWolfeOptions& options) {
  if (objective.q.rows() != m.rows()) {
    return absl::InvalidArgumentError("objective order does not match sketch");
  }
  const double n = static_cast<double>(objective.n);
  const Eigen::MatrixXd& mm = m.matrix();
  Eigen::MatrixXd a = mm.transpose() * (objective.q * mm) / n;
  a = 0.5 * (a + a.transpose()).eval();
  const Eigen::VectorXd b = -(mm.transpose() * objective.c) / n;
  ASSIGN_OR_RETURN(numerics::FrankWolfeResult res,
                   numerics::FrankWolfeL1(a, b, 1.0, options));
  if (!res.converged) {
    std::clog << "sparse_linreg: Frank-Wolfe stopped at the iteration cap ("
              << res.iterations << "), gap " << res.gap << "\n";
  }
  return res;
}

double EmpiricalLoss(const Eigen::VectorXd& w, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& y) {
  return 0.5 * (x * w - y).squaredNorm() / static_cast<double>(x.rows());
}

absl::StatusOr<Eigen::VectorXd> ReferenceSolution(const Eigen::MatrixXd& x,
                                                  const Eigen::VectorXd& y) {
  if (x.rows() < 1 || x.rows() != y.size()) {
    return absl::InvalidArgumentError("bad regression data");
  }
  const double n = static_cast<double>(x.rows());
  Eigen::MatrixXd a = x.transpose() * x / n;
  const Eigen::VectorXd b = -(x.transpose() * y) / n;
  ASSIGN_OR_RETURN(numerics::FrankWolfeResult res,
                   numerics::ProjectedGradientL1(a, b, 1.0));
  return res.w;
}

double ExcessRisk(const Eigen::VectorXd& w, const Eigen::VectorXd& w_star,
                  const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return EmpiricalLoss(w, x, y) - EmpiricalLoss(w_star, x, y);
}

absl::StatusOr<LinRegFit> FitPrivate(const Eigen::MatrixXd& x,
                                     const Eigen::VectorXd& y,
                                     const LinRegConfig& config) {
  if (x.rows() != y.size()) {
    return absl::InvalidArgumentError("feature and label counts differ");
  }
  if (!x.allFinite() || !y.allFinite()) {
    return absl::InvalidArgumentError("data is not finite");
  }
  const int64_t n = x.rows();
  const int64_t d = x.cols();
  ASSIGN_OR_RETURN(const int64_t m, ProjectionDim(config, n, d));
  ASSIGN_OR_RETURN(const numerics::ProjectionOperator sketch,
                   numerics::SampleProjection(
                       numerics::ProjectionKind::kRegressionSketch, m, d,
                       config.seed));
  ASSIGN_OR_RETURN(const double sigma, ReportSigma(config));

  // Batched ClientEncode: same clipping and the same per-user streams.
  Eigen::MatrixXd xc = x;
  for (int64_t i = 0; i < n; ++i) {
    Eigen::VectorXd row = xc.row(i).transpose();
    privacy::ClipToUnitBall(row);
    xc.row(i) = row.transpose();
  }
  Eigen::MatrixXd z = xc * sketch.matrix().transpose();
  Eigen::VectorXd v(n);
  int64_t clip_count = 0;
  for (int64_t i = 0; i < n; ++i) {
    Eigen::VectorXd row = z.row(i).transpose();
    if (privacy::ClipToUnitBall(row)) ++clip_count;
    SeededRng z_rng(config.seed,
                    MakeStreamId(StreamPurpose::kReport,
                                 static_cast<uint64_t>(i)));
    for (int64_t k = 0; k < m; ++k) row(k) += sigma * z_rng.Gaussian();
    z.row(i) = row.transpose();
    SeededRng v_rng(config.seed,
                    MakeStreamId(StreamPurpose::kLabel,
                                 static_cast<uint64_t>(i)));
    v(i) = std::clamp(y(i), -1.0, 1.0) + sigma * v_rng.Gaussian();
  }
  if (clip_count > 0) {
    std::clog << "sparse_linreg: " << clip_count << " of " << n
              << " projected features clipped\n";
  }

  ASSIGN_OR_RETURN(const DebiasedObjective obj, BuildObjective(z, v, sigma));
  ASSIGN_OR_RETURN(const numerics::FrankWolfeResult res,
                   Solve(obj, sketch, config.solver));

  const privacy::BudgetAudit audit = EncoderAudit(config);
  LinRegFit fit;
  fit.w = res.w;
  fit.diagnostics = {
      {"n", n},
      {"d", d},
      {"m", m},
      {"sigma", sigma},
      {"clip_count", clip_count},
      {"fw_gap", res.gap},
      {"fw_iterations", res.iterations},
      {"fw_converged", res.converged},
      {"budget_audit", audit.ToJson()},
  };
  return fit;
}

}  // namespace nildp::sparse_linreg
