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

#include "nildp/numerics/projection.h"

#include <cmath>

#include "absl/status/status.h"
#include "nildp/rng.h"

namespace nildp::numerics {

ProjectionOperator ProjectionOperator::FromMatrix(ProjectionKind kind,
                                                  Eigen::MatrixXd matrix) {
  ProjectionOperator op;
  op.kind_ = kind;
  op.matrix_ = std::move(matrix);
  return op;
}

absl::StatusOr<ProjectionOperator> SampleProjection(ProjectionKind kind,
                                                    Eigen::Index rows,
                                                    Eigen::Index cols,
                                                    uint64_t seed) {
  if (rows < 1 || cols < 1) {
    return absl::InvalidArgumentError("projection dimensions must be >= 1");
  }
  const uint64_t copy = kind == ProjectionKind::kMeanSketch ? 0 : 1;
  SeededRng rng(seed, MakeStreamId(StreamPurpose::kProjection, 0, copy));
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  ProjectionOperator op;
  op.kind_ = kind;
  op.seed_ = seed;
  op.matrix_.resize(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      op.matrix_(i, j) = scale * rng.Gaussian();
    }
  }
  return op;
}

}  // namespace nildp::numerics
