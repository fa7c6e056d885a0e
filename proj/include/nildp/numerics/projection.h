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

#ifndef NILDP_NUMERICS_PROJECTION_H_
#define NILDP_NUMERICS_PROJECTION_H_

#include <cstdint>

#include "Eigen/Core"
#include "absl/status/statusor.h"

namespace nildp::numerics {

// kMeanSketch is the p x d operator of the mean-estimation pipeline and
// kRegressionSketch the m x d operator of sparse regression. Both have i.i.d.
// N(0, 1/rows) entries; the kind only tags the stream the entries come from.
enum class ProjectionKind { kMeanSketch, kRegressionSketch };

// A seeded Gaussian random matrix M (rows x cols) mapping R^cols -> R^rows.
// Apply(x) = M x. For the regression operator this is the projected feature
// vector, and ApplyTranspose pulls gradients back into R^cols.
class ProjectionOperator {
 public:
  ProjectionKind kind() const { return kind_; }
  Eigen::Index rows() const { return matrix_.rows(); }
  Eigen::Index cols() const { return matrix_.cols(); }
  uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  Eigen::VectorXd Apply(const Eigen::VectorXd& x) const { return matrix_ * x; }
  Eigen::VectorXd ApplyTranspose(const Eigen::VectorXd& y) const {
    return matrix_.transpose() * y;
  }

  // Wraps an explicit matrix (e.g. the identity in oracle tests).
  static ProjectionOperator FromMatrix(ProjectionKind kind,
                                       Eigen::MatrixXd matrix);

 private:
  friend absl::StatusOr<ProjectionOperator> SampleProjection(
      ProjectionKind, Eigen::Index, Eigen::Index, uint64_t);

  ProjectionKind kind_ = ProjectionKind::kMeanSketch;
  uint64_t seed_ = 0;
  Eigen::MatrixXd matrix_;
};

// Deterministic in `seed`. Requires rows >= 1 and cols >= 1.
absl::StatusOr<ProjectionOperator> SampleProjection(ProjectionKind kind,
                                                    Eigen::Index rows,
                                                    Eigen::Index cols,
                                                    uint64_t seed);

}  // namespace nildp::numerics

#endif  // NILDP_NUMERICS_PROJECTION_H_
