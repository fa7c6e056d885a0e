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

#include "nildp/mean_est.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nildp/numerics/l1_recovery.h"
#include "nildp/status_macros.h"

namespace nildp::mean_est {

namespace {

absl::Status ValidateConfig(const MeanEstConfig& config) {
  if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) {
    return absl::InvalidArgumentError("lambda must be positive and finite");
  }
  if (!(config.residual_constant >= 0.0)) {
    return absl::InvalidArgumentError("residual constant must be >= 0");
  }
  return privacy::ValidateBudget(config.budget);
}

// Clipped rows of `data`.
Eigen::MatrixXd ClipRows(const Eigen::MatrixXd& data) {
  Eigen::MatrixXd clipped = data;
  for (Eigen::Index i = 0; i < clipped.rows(); ++i) {
    Eigen::VectorXd row = clipped.row(i).transpose();
    privacy::ClipToUnitBall(row);
    clipped.row(i) = row.transpose();
  }
  return clipped;
}

absl::Status CheckFinite(const Eigen::MatrixXd& data) {
  if (!data.allFinite()) {
    return absl::InvalidArgumentError("data contains non-finite entries");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<DerivedSizes> ComputeSizes(const MeanEstConfig& config,
                                          int64_t n, int64_t d) {
  RETURN_IF_ERROR(ValidateConfig(config));
  if (n < 1 || d < 1) {
    return absl::InvalidArgumentError("need n >= 1 and d >= 1");
  }
  DerivedSizes sizes;
  const double eps = config.budget.epsilon;
  const int64_t p_raw = static_cast<int64_t>(
      std::ceil(config.lambda * eps * std::sqrt(static_cast<double>(n))));
  const int64_t m_raw = static_cast<int64_t>(
      std::ceil(18.0 * std::log(1.0 / config.budget.delta)));
  sizes.p = std::max<int64_t>(1, std::min(p_raw, d));
  sizes.m = std::max<int64_t>(1, std::min(m_raw, n));
  sizes.p_capped = p_raw > d;
  sizes.m_capped = m_raw > n;
  if (sizes.p_capped) {
    std::clog << "mean_est: sketch dimension " << p_raw << " capped at d = "
              << d << "\n";
  }
  if (sizes.m_capped) {
    std::clog << "mean_est: group count " << m_raw << " capped at n = " << n
              << "\n";
  }
  return sizes;
}

double ResidualBound(const MeanEstConfig& config, int64_t n, int64_t d,
                     const DerivedSizes& sizes) {
  // The bound absorbs privacy noise; without noise the observation is exact.
  if (config.policy.test_mode) return 0.0;
  const double nd = static_cast<double>(n) * static_cast<double>(d);
  return config.residual_constant * static_cast<double>(sizes.p) *
         std::log(nd / config.budget.delta) / config.budget.epsilon *
         std::sqrt(static_cast<double>(sizes.m) / static_cast<double>(n));
}

absl::StatusOr<Eigen::VectorXd> ClientReport(
    const Eigen::VectorXd& x, const numerics::ProjectionOperator& g,
    const privacy::PrivacyBudget& budget, const privacy::NoisePolicy& policy,
    SeededRng& rng) {
  if (x.size() != g.cols()) {
    return absl::InvalidArgumentError(
        absl::StrCat("input has dimension ", x.size(), ", sketch expects ",
                     g.cols()));
  }
  if (!x.allFinite()) {
    return absl::InvalidArgumentError("input is not finite");
  }
  ASSIGN_OR_RETURN(const double sigma, policy.Sigma(budget));
  Eigen::VectorXd clipped = x;
  privacy::ClipToUnitBall(clipped);
  Eigen::VectorXd y = g.Apply(clipped);
  for (Eigen::Index k = 0; k < y.size(); ++k) y(k) += sigma * rng.Gaussian();
  return y;
}

privacy::BudgetAudit ReportAudit(const MeanEstConfig& config) {
  privacy::BudgetAudit audit("mean_est", config.budget,
                             config.policy.test_mode);
  audit.Add("sketch_report", config.budget);
  return audit;
}

absl::StatusOr<std::vector<GroupMean>> GroupMeans(
    const Eigen::MatrixXd& reports, int64_t m) {
  const int64_t n = reports.rows();
  if (m < 1 || m > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("group count ", m, " must lie in [1, ", n, "]"));
  }
  const int64_t size = n / m;
  std::vector<GroupMean> means;
  means.reserve(m);
  for (int64_t j = 0; j < m; ++j) {
    GroupMean g;
    g.size = size;
    g.mean = reports.middleRows(j * size, size).colwise().sum().transpose() /
             static_cast<double>(size);
    means.push_back(std::move(g));
  }
  return means;
}

absl::StatusOr<MedianOfMeans> SelectMedianOfMeans(
    std::span<const GroupMean> means) {
  const int64_t m = static_cast<int64_t>(means.size());
  if (m < 1) return absl::InvalidArgumentError("no group means");
  const int64_t rank = (m + 1) / 2;  // ceil(m/2)
  std::vector<double> dist(m);
  MedianOfMeans best;
  best.radius = std::numeric_limits<double>::infinity();
  for (int64_t j = 0; j < m; ++j) {
    for (int64_t l = 0; l < m; ++l) {
      dist[l] = (means[j].mean - means[l].mean).lpNorm<1>();
    }
    std::nth_element(dist.begin(), dist.begin() + (rank - 1), dist.end());
    const double r = dist[rank - 1];
    if (r < best.radius) {
      best.radius = r;
      best.index = j;
    }
  }
  best.center = means[best.index].mean;
  return best;
}

absl::StatusOr<MeanEstimate> EstimateMean(const Eigen::MatrixXd& data,
                                          const MeanEstConfig& config) {
  RETURN_IF_ERROR(CheckFinite(data));
  const int64_t n = data.rows();
  const int64_t d = data.cols();
  ASSIGN_OR_RETURN(const DerivedSizes sizes, ComputeSizes(config, n, d));
  ASSIGN_OR_RETURN(
      const numerics::ProjectionOperator g,
      numerics::SampleProjection(numerics::ProjectionKind::kMeanSketch,
                                 sizes.p, d, config.seed));
  return EstimateMeanWithSketch(data, config, g);
}

absl::StatusOr<MeanEstimate> EstimateMeanWithSketch(
    const Eigen::MatrixXd& data, const MeanEstConfig& config,
    const numerics::ProjectionOperator& g) {
  RETURN_IF_ERROR(CheckFinite(data));
  const int64_t n = data.rows();
  const int64_t d = data.cols();
  if (g.cols() != d) {
    return absl::InvalidArgumentError(
        absl::StrCat("sketch has ", g.cols(), " columns, data has ", d));
  }
  ASSIGN_OR_RETURN(DerivedSizes sizes, ComputeSizes(config, n, d));
  sizes.p = g.rows();
  ASSIGN_OR_RETURN(const double sigma, config.policy.Sigma(config.budget));

  // Batched form of ClientReport: one product for all users, then each user's
  // own noise stream.
  Eigen::MatrixXd reports = ClipRows(data) * g.matrix().transpose();
  if (sigma > 0.0) {
    for (int64_t i = 0; i < n; ++i) {
      SeededRng rng(config.seed,
                    MakeStreamId(StreamPurpose::kReport,
                                 static_cast<uint64_t>(i)));
      for (int64_t k = 0; k < sizes.p; ++k) {
        reports(i, k) += sigma * rng.Gaussian();
      }
    }
  }

  ASSIGN_OR_RETURN(const std::vector<GroupMean> means,
                   GroupMeans(reports, sizes.m));
  ASSIGN_OR_RETURN(const MedianOfMeans mom, SelectMedianOfMeans(means));

  const double bound = ResidualBound(config, n, d, sizes);
  ASSIGN_OR_RETURN(numerics::RecoveryProblem problem,
                   numerics::RecoveryProblem::Create(g.matrix(), mom.center,
                                                     bound, config.lambda));
  ASSIGN_OR_RETURN(numerics::RecoveryResult rec,
                   numerics::L1Recovery(problem));

  const privacy::BudgetAudit audit = ReportAudit(config);
  MeanEstimate out;
  out.z = std::move(rec.z);
  out.diagnostics = {
      {"n", n},
      {"d", d},
      {"p", sizes.p},
      {"m", sizes.m},
      {"p_capped", sizes.p_capped},
      {"m_capped", sizes.m_capped},
      {"groups_dropped", n % sizes.m},
      {"sigma", sigma},
      {"residual_bound", bound},
      {"selected_group", mom.index},
      {"selected_radius", mom.radius},
      {"recovery_residual", rec.residual},
      {"recovery_l1", rec.l1_norm},
      {"recovery_iterations", rec.iterations},
      {"budget_audit", audit.ToJson()},
  };
  return out;
}

absl::StatusOr<Eigen::VectorXd> NaiveMeanBaseline(const Eigen::MatrixXd& data,
                                                  const MeanEstConfig& config) {
  RETURN_IF_ERROR(ValidateConfig(config));
  RETURN_IF_ERROR(CheckFinite(data));
  if (data.rows() < 1) return absl::InvalidArgumentError("empty data");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    SeededRng rng(config.seed,
                  MakeStreamId(StreamPurpose::kReport,
                               static_cast<uint64_t>(i), 1));
    ASSIGN_OR_RETURN(Eigen::VectorXd y,
                     privacy::PrivatizeVector(data.row(i).transpose(),
                                              config.budget, config.policy,
                                              rng));
    sum += y;
  }
  return Eigen::VectorXd(sum / static_cast<double>(data.rows()));
}

}  // namespace nildp::mean_est
