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

#include "nildp/numerics/frank_wolfe.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "Eigen/Eigenvalues"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace nildp::numerics {
namespace {

absl::Status ValidateQuadratic(const Eigen::MatrixXd& a,
                               const Eigen::VectorXd& b, double radius) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("quadratic shapes mismatch: A is ", a.rows(), "x",
                     a.cols(), ", b has ", b.size()));
  }
  if (!(radius > 0.0)) return absl::InvalidArgumentError("radius must be > 0");
  if (!a.allFinite() || !b.allFinite()) {
    return absl::InvalidArgumentError("quadratic has non-finite entries");
  }
  return absl::OkStatus();
}

double Objective(const Eigen::VectorXd& aw, const Eigen::VectorXd& b,
                 const Eigen::VectorXd& w) {
  return 0.5 * w.dot(aw) + b.dot(w);
}

// Rescales w back into the ball if rounding pushed ||w||_1 past the radius.
void KeepInBall(Eigen::VectorXd& w, double radius) {
  double l1 = w.lpNorm<1>();
  while (l1 > radius) {
    w *= radius / l1;
    w *= 1.0 - 1e-16;
    l1 = w.lpNorm<1>();
  }
}

}  // namespace

double L1QuadraticGap(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                      double radius, const Eigen::VectorXd& w) {
  const Eigen::VectorXd g = a * w + b;
  return std::max(0.0, g.dot(w) + radius * g.cwiseAbs().maxCoeff());
}

absl::StatusOr<FrankWolfeResult> FrankWolfeL1(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double radius,
    const FrankWolfeOptions& options) {
  if (absl::Status s = ValidateQuadratic(a, b, radius); !s.ok()) return s;
  if (options.max_iterations < 1) {
    return absl::InvalidArgumentError("max_iterations must be >= 1");
  }
  const Eigen::Index d = b.size();
  FrankWolfeResult res;
  res.w = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd aw = Eigen::VectorXd::Zero(d);
  double w_aw = 0.0;

  for (int64_t it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd grad = aw + b;
    Eigen::Index j = 0;
    double best = std::abs(grad[0]);
    for (Eigen::Index i = 1; i < d; ++i) {
      const double v = std::abs(grad[i]);
      if (v > best) {
        best = v;
        j = i;
      }
    }
    // Non-negative in exact arithmetic; clamp rounding noise.
    const double gap = std::max(0.0, grad.dot(res.w) + radius * best);
    res.gap = gap;
    if (options.record_gaps) res.gaps.push_back(gap);
    if (gap <= options.gap_tolerance) {
      res.converged = true;
      break;
    }
    const double s_j = grad[j] > 0.0 ? -radius : radius;
    // Curvature along s - w: s^T A s - 2 s^T A w + w^T A w.
    const double curvature =
        s_j * s_j * a(j, j) - 2.0 * s_j * aw[j] + w_aw;
    const double step =
        curvature > 0.0 ? std::clamp(gap / curvature, 0.0, 1.0) : 1.0;
    res.w *= 1.0 - step;
    res.w[j] += step * s_j;
    aw = (1.0 - step) * aw + (step * s_j) * a.col(j);
    KeepInBall(res.w, radius);
    res.iterations = it + 1;
    if (res.iterations % 256 == 0) aw = a * res.w;  // limit drift
    w_aw = res.w.dot(aw);
  }
  aw = a * res.w;
  res.objective = Objective(aw, b, res.w);
  if (!res.converged) {
    res.gap = L1QuadraticGap(a, b, radius, res.w);
    res.converged = res.gap <= options.gap_tolerance;
  }
  return res;
}

Eigen::VectorXd ProjectOntoL1Ball(const Eigen::VectorXd& v, double radius) {
  if (v.lpNorm<1>() <= radius) return v;
  std::vector<double> u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) u[i] = std::abs(v[i]);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double t = (cumulative - radius) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  Eigen::VectorXd w(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::max(std::abs(v[i]) - theta, 0.0);
    w[i] = v[i] >= 0.0 ? m : -m;
  }
  KeepInBall(w, radius);
  return w;
}

absl::StatusOr<FrankWolfeResult> ProjectedGradientL1(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double radius,
    const ProjectedGradientOptions& options) {
  if (absl::Status s = ValidateQuadratic(a, b, radius); !s.ok()) return s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      a, Eigen::EigenvaluesOnly);
  const double lipschitz = std::max(solver.eigenvalues().maxCoeff(), 1e-300);
  const double step = 1.0 / lipschitz;

  FrankWolfeResult res;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd y = w;
  double t = 1.0;
  double previous = 0.0;
  for (int64_t it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd next = ProjectOntoL1Ball(y - step * (a * y + b),
                                                   radius);
    const double value = Objective(a * next, b, next);
    if (it > 0 && value > previous) {
      // Function-value restart.
      t = 1.0;
      y = w;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - w);
    w = next;
    t = t_next;
    previous = value;
    res.iterations = it + 1;
    if (res.iterations % 50 == 0 &&
        L1QuadraticGap(a, b, radius, w) <= options.tolerance) {
      break;
    }
  }
  res.w = w;
  res.objective = Objective(a * w, b, w);
  res.gap = L1QuadraticGap(a, b, radius, w);
  res.converged = res.gap <= options.tolerance;
  return res;
}

}  // namespace nildp::numerics
