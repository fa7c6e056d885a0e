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

#include "nildp/kernel_krr.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

#include "Eigen/Cholesky"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nildp/numerics/symmetric.h"
#include "nildp/status_macros.h"

namespace nildp::kernel_krr {

absl::Status KernelSpec::Validate() const {
  if (kind == KernelKind::kGaussian &&
      !(lengthscale > 0.0 && std::isfinite(lengthscale))) {
    return absl::InvalidArgumentError("gaussian lengthscale must be positive");
  }
  if (kind == KernelKind::kLaplacian && !(scale > 0.0 && std::isfinite(scale))) {
    return absl::InvalidArgumentError("laplacian scale must be positive");
  }
  return absl::OkStatus();
}

double KernelSpec::Evaluate(const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y) const {
  if (kind == KernelKind::kGaussian) {
    return std::exp(-(x - y).squaredNorm() / (2.0 * lengthscale * lengthscale));
  }
  return std::exp(-(x - y).lpNorm<1>() / scale);
}

Eigen::VectorXd RffMap::Feature(const Eigen::VectorXd& x) const {
  Eigen::VectorXd arg = frequencies * x + phases;
  return scale * arg.array().cos().matrix();
}

Eigen::MatrixXd RffMap::Features(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd arg = x * frequencies.transpose();
  arg.rowwise() += phases.transpose();
  return scale * arg.array().cos().matrix();
}

absl::StatusOr<RffMap> SampleRff(const KernelSpec& kernel, int64_t d,
                                 int64_t d_p, FeatureScaling scaling,
                                 uint64_t seed) {
  RETURN_IF_ERROR(kernel.Validate());
  if (d < 1 || d_p < 1) return absl::InvalidArgumentError("need d, d_p >= 1");
  RffMap map;
  map.seed = seed;
  map.scale = std::sqrt((scaling == FeatureScaling::kStandard ? 2.0 : 1.0) /
                        static_cast<double>(d_p));
  map.frequencies.resize(d_p, d);
  map.phases.resize(d_p);
  SeededRng freq_rng(seed, MakeStreamId(StreamPurpose::kFourierFeatures, 0, 0));
  SeededRng phase_rng(seed,
                      MakeStreamId(StreamPurpose::kFourierFeatures, 0, 1));
  for (int64_t k = 0; k < d_p; ++k) {
    for (int64_t j = 0; j < d; ++j) {
      if (kernel.kind == KernelKind::kGaussian) {
        map.frequencies(k, j) = freq_rng.Gaussian() / kernel.lengthscale;
      } else {
        // Cauchy(0, 1/b) by inversion.
        const double u = freq_rng.Uniform();
        map.frequencies(k, j) =
            std::tan(std::numbers::pi * (u - 0.5)) / kernel.scale;
      }
    }
    map.phases(k) = 2.0 * std::numbers::pi * phase_rng.Uniform();
  }
  return map;
}

absl::StatusOr<int64_t> FeatureDim(const KrrConfig& config, int64_t n,
                                   int64_t d) {
  if (n < 1 || d < 1) return absl::InvalidArgumentError("need n, d >= 1");
  if (config.d_p > 0) return config.d_p;
  const double eps = config.budget.epsilon;
  return std::max<int64_t>(
      1, static_cast<int64_t>(std::ceil(std::sqrt(
             static_cast<double>(d) * static_cast<double>(n) * eps * eps))));
}

privacy::BudgetAudit KrrAudit(const KrrConfig& config) {
  privacy::BudgetAudit audit("kernel_krr", config.budget,
                             config.policy.test_mode);
  audit.Add("fourier_features", config.budget.Fraction(2.0));
  audit.Add("label", config.budget.Fraction(2.0));
  return audit;
}

absl::StatusOr<KrrFit> KrrPipeline(const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& y,
                                   const KernelSpec& kernel,
                                   const KrrConfig& config) {
  RETURN_IF_ERROR(privacy::ValidateBudget(config.budget));
  if (!(config.c > 0.0)) {
    return absl::InvalidArgumentError("regularization constant must be > 0");
  }
  if (x.rows() < 1 || x.rows() != y.size()) {
    return absl::InvalidArgumentError("bad regression data");
  }
  if (!x.allFinite() || !y.allFinite()) {
    return absl::InvalidArgumentError("data is not finite");
  }
  const int64_t n = x.rows();
  ASSIGN_OR_RETURN(const int64_t d_p, FeatureDim(config, n, x.cols()));
  ASSIGN_OR_RETURN(
      RffMap map, SampleRff(kernel, x.cols(), d_p, config.scaling, config.seed));
  const privacy::PrivacyBudget half = config.budget.Fraction(2.0);
  ASSIGN_OR_RETURN(const double sigma, config.policy.Sigma(half));

  Eigen::MatrixXd xc = x;
  for (int64_t i = 0; i < n; ++i) {
    Eigen::VectorXd row = xc.row(i).transpose();
    privacy::ClipToUnitBall(row);
    xc.row(i) = row.transpose();
  }
  Eigen::MatrixXd z = map.Features(xc);
  Eigen::VectorXd v(n);
  int64_t clip_count = 0;
  for (int64_t i = 0; i < n; ++i) {
    Eigen::VectorXd row = z.row(i).transpose();
    if (privacy::ClipToUnitBall(row)) ++clip_count;
    SeededRng z_rng(config.seed, MakeStreamId(StreamPurpose::kReport,
                                              static_cast<uint64_t>(i)));
    for (int64_t k = 0; k < d_p; ++k) row(k) += sigma * z_rng.Gaussian();
    z.row(i) = row.transpose();
    SeededRng v_rng(config.seed, MakeStreamId(StreamPurpose::kLabel,
                                              static_cast<uint64_t>(i)));
    v(i) = std::clamp(y(i), -1.0, 1.0) + sigma * v_rng.Gaussian();
  }

  const double nn = static_cast<double>(n);
  ASSIGN_OR_RETURN(const numerics::PsdFactor q,
                   numerics::PsdProjectShiftedGram(z, nn * sigma * sigma));
  const Eigen::VectorXd ztv = z.transpose() * v;

  KrrFit fit;
  nlohmann::json solver;
  if (config.objective == KrrObjective::kRidge) {
    // ((C/n) V L V^T + I)^{-1} = I - V diag(t / (1 + t)) V^T, t = (C/n) L.
    const double cn = config.c / nn;
    const Eigen::VectorXd rhs = cn * ztv;
    const Eigen::ArrayXd t = cn * q.eigenvalues.array();
    const Eigen::VectorXd coef =
        (t / (1.0 + t) * (q.basis.transpose() * rhs).array()).matrix();
    fit.w = rhs - q.basis * coef;
    const Eigen::VectorXd residual = cn * q.Multiply(fit.w) + fit.w - rhs;
    const double rel = residual.norm() / std::max(rhs.norm(), 1e-300);
    if (!(rel <= 1e-8)) {
      return absl::InternalError(
          absl::StrCat("ridge solve residual ", rel, " exceeds 1e-8"));
    }
    solver = {{"kind", "closed_form"}, {"relative_residual", rel}};
  } else {
    Eigen::MatrixXd a = q.Dense() / nn;
    const Eigen::VectorXd b = -ztv / nn;
    ASSIGN_OR_RETURN(
        const numerics::FrankWolfeResult res,
        numerics::FrankWolfeL1(a, b, config.paper_exact_radius, config.solver));
    fit.w = res.w;
    solver = {{"kind", "frank_wolfe"},
              {"radius", config.paper_exact_radius},
              {"gap", res.gap},
              {"iterations", res.iterations},
              {"converged", res.converged}};
  }

  fit.training_objective =
      (0.5 * fit.w.dot(q.Multiply(fit.w)) - ztv.dot(fit.w)) / nn;
  fit.map = std::move(map);
  fit.diagnostics = {
      {"n", n},
      {"d", x.cols()},
      {"d_p", d_p},
      {"sigma", sigma},
      {"q_rank", q.rank()},
      {"training_objective", fit.training_objective},
      {"clip_count", clip_count},
      {"solver", solver},
      {"budget_audit", KrrAudit(config).ToJson()},
  };
  return fit;
}

absl::StatusOr<Eigen::VectorXd> RidgeNormalEquations(const Eigen::MatrixXd& z,
                                                     const Eigen::VectorXd& v,
                                                     double c) {
  if (z.rows() != v.size() || !(c > 0.0)) {
    return absl::InvalidArgumentError("bad ridge inputs");
  }
  const double cn = c / static_cast<double>(z.rows());
  Eigen::MatrixXd h = cn * z.transpose() * z;
  h.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) {
    return absl::InternalError("ridge normal equations not positive definite");
  }
  return Eigen::VectorXd(llt.solve(cn * (z.transpose() * v)));
}

absl::StatusOr<ExactKrr> ExactKrr::Fit(const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& y,
                                       const KernelSpec& kernel, double c) {
  RETURN_IF_ERROR(kernel.Validate());
  if (x.rows() < 1 || x.rows() != y.size() || !(c > 0.0)) {
    return absl::InvalidArgumentError("bad kernel ridge inputs");
  }
  const int64_t n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) =
          kernel.Evaluate(x.row(i).transpose(), x.row(j).transpose());
    }
  }
  k.diagonal().array() += static_cast<double>(n) / c;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    return absl::InternalError("kernel system not positive definite");
  }
  ExactKrr out;
  out.x_ = x;
  out.alpha_ = llt.solve(y);
  out.kernel_ = kernel;
  return out;
}

double ExactKrr::Predict(const Eigen::VectorXd& x) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x_.rows(); ++i) {
    s += alpha_(i) * kernel_.Evaluate(x_.row(i).transpose(), x);
  }
  return s;
}

double PredictionSupGap(const RffMap& map, const Eigen::VectorXd& w,
                        const ExactKrr& oracle, const Eigen::MatrixXd& test) {
  const Eigen::VectorXd pred = map.Features(test) * w;
  double sup = 0.0;
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    sup = std::max(sup,
                   std::abs(pred(i) - oracle.Predict(test.row(i).transpose())));
  }
  return sup;
}

}  // namespace nildp::kernel_krr
