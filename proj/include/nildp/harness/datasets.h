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

// Synthetic datasets for the experiment harness. Every generator is a pure
// function of its arguments and seed.

#ifndef NILDP_HARNESS_DATASETS_H_
#define NILDP_HARNESS_DATASETS_H_

#include <cstdint>

#include "Eigen/Core"
#include "absl/status/statusor.h"

namespace nildp::harness {

struct MeanDataset {
  Eigen::MatrixXd x;   // n x d, rows in the unit ball
  Eigen::VectorXd mu;  // s-sparse, |mu|_1 = lambda
};

// x_i = mu + (1 - |mu|_2) u_i with u_i uniform on the sphere, so E x = mu and
// |x_i|_2 <= 1 without renormalization.
absl::StatusOr<MeanDataset> GenSparseMeanData(int64_t n, int64_t d, int64_t s,
                                              double lambda, uint64_t seed);

struct RegressionDataset {
  Eigen::MatrixXd x;      // n x d
  Eigen::VectorXd y;      // n, in [-1, 1]
  Eigen::VectorXd w_star;  // s-sparse, |w_star|_1 = 1
};

// x uniform in the unit ball, y = clip(x^T w_star + noise * N(0, 1)).
absl::StatusOr<RegressionDataset> GenSparseLinregData(int64_t n, int64_t d,
                                                      int64_t s, double noise,
                                                      uint64_t seed);

struct LabelledDataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;       // in {-1, +1}
  Eigen::VectorXd w_star;  // unit norm
};

// x uniform on the unit sphere and P(y = 1 | x) = 1 / (1 + exp(-(r x^T w* +
// margin))). `w_seed` fixes w*, `seed` the samples, so train and held-out
// sets can share a model.
absl::StatusOr<LabelledDataset> GenLogisticData(int64_t n, int64_t d, double r,
                                                double margin, uint64_t w_seed,
                                                uint64_t seed);

// Smooth regression target for the kernel task: x uniform in the unit ball,
// y = clip(sin(pi x_1) cos(x_2) / 2 + noise * N(0, 1)) (x_2 = 0 when d = 1).
absl::StatusOr<RegressionDataset> GenKernelData(int64_t n, int64_t d,
                                                double noise, uint64_t seed);

}  // namespace nildp::harness

#endif  // NILDP_HARNESS_DATASETS_H_
