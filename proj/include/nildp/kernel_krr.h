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

// Kernel ridge regression through random Fourier features: each user
// releases a noised feature vector and label, and the server solves the
// debiased ridge problem in feature space.

#ifndef NILDP_KERNEL_KRR_H_
#define NILDP_KERNEL_KRR_H_

#include <cstdint>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "nildp/numerics/frank_wolfe.h"
#include "nildp/privacy.h"

namespace nildp::kernel_krr {

enum class KernelKind { kGaussian, kLaplacian };

struct KernelSpec {
  KernelKind kind = KernelKind::kGaussian;
  double lengthscale = 1.0;  // gaussian: exp(-|x - y|^2 / (2 l^2))
  double scale = 1.0;        // laplacian: exp(-|x - y|_1 / b)

  absl::Status Validate() const;
  double Evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
};

// Feature scaling. kStandard, sqrt(2/d_p), makes the feature inner product
// an unbiased estimate of the kernel; kPaperExact, sqrt(1/d_p), estimates
// half of it.
enum class FeatureScaling { kStandard, kPaperExact };

struct RffMap {
  Eigen::MatrixXd frequencies;  // d_p x d, row k is s_k
  Eigen::VectorXd phases;       // d_p, uniform on [0, 2 pi)
  double scale = 0.0;
  uint64_t seed = 0;

  Eigen::Index dim() const { return phases.size(); }
  Eigen::VectorXd Feature(const Eigen::VectorXd& x) const;
  // One feature vector per row of `x`.
  Eigen::MatrixXd Features(const Eigen::MatrixXd& x) const;
};

absl::StatusOr<RffMap> SampleRff(const KernelSpec& kernel, int64_t d,
                                 int64_t d_p, FeatureScaling scaling,
                                 uint64_t seed);

enum class KrrObjective {
  // (C/2n) w^T Q w - (C/n) v^T Z w + 1/2 |w|^2, solved in closed form.
  kRidge,
  // (1/2n) w^T Q w - (1/n) v^T Z w over an l1 ball, by Frank-Wolfe.
  kPaperExact,
};

struct KrrConfig {
  double c = 1.0;  // regularization constant
  // Feature dimension. 0 selects ceil(sqrt(d n eps^2)).
  int64_t d_p = 0;
  privacy::PrivacyBudget budget;
  privacy::NoisePolicy policy;
  FeatureScaling scaling = FeatureScaling::kStandard;
  KrrObjective objective = KrrObjective::kRidge;
  double paper_exact_radius = 1.0;
  numerics::FrankWolfeOptions solver;
  uint64_t seed = 0;
};

absl::StatusOr<int64_t> FeatureDim(const KrrConfig& config, int64_t n,
                                   int64_t d);

privacy::BudgetAudit KrrAudit(const KrrConfig& config);

struct KrrFit {
  Eigen::VectorXd w;
  RffMap map;
  // (1/2n) w^T Q w - (1/n) v^T Z w at the returned w.
  double training_objective = 0.0;
  nlohmann::json diagnostics;
};

// Users draw feature noise from (kReport, i) and label noise from
// (kLabel, i); the feature map comes from config.seed.
absl::StatusOr<KrrFit> KrrPipeline(const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& y,
                                   const KernelSpec& kernel,
                                   const KrrConfig& config);

// Minimizer of (C/2n) sum (g^T z_i - v_i)^2 + 1/2 |g|^2 from the normal
// equations (Z^T Z C/n + I) g = (C/n) Z^T v. Non-private reference.
absl::StatusOr<Eigen::VectorXd> RidgeNormalEquations(const Eigen::MatrixXd& z,
                                                     const Eigen::VectorXd& v,
                                                     double c);

// Exact kernel ridge regression: alpha = (K + (n/C) I)^{-1} y, predictions
// k(x, X) alpha.
class ExactKrr {
 public:
  static absl::StatusOr<ExactKrr> Fit(const Eigen::MatrixXd& x,
                                      const Eigen::VectorXd& y,
                                      const KernelSpec& kernel, double c);
  double Predict(const Eigen::VectorXd& x) const;
  const Eigen::VectorXd& alpha() const { return alpha_; }

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd alpha_;
  KernelSpec kernel_;
};

// max over rows of `test` of |feature(x)^T w - oracle(x)|.
double PredictionSupGap(const RffMap& map, const Eigen::VectorXd& w,
                        const ExactKrr& oracle, const Eigen::MatrixXd& test);

}  // namespace nildp::kernel_krr

#endif  // NILDP_KERNEL_KRR_H_
