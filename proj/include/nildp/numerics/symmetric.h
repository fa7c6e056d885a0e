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

#ifndef NILDP_NUMERICS_SYMMETRIC_H_
#define NILDP_NUMERICS_SYMMETRIC_H_

#include "Eigen/Core"
#include "absl/status/statusor.h"

namespace nildp::numerics {

// Dense symmetric matrix. Construction checks symmetry to 1e-12 relative to
// the largest entry and then stores the exactly symmetrized (M + M^T) / 2.
class SymmetricMatrix {
 public:
  static absl::StatusOr<SymmetricMatrix> Create(const Eigen::MatrixXd& m);
  static SymmetricMatrix Identity(Eigen::Index n);

  Eigen::Index order() const { return values_.rows(); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  explicit SymmetricMatrix(Eigen::MatrixXd values)
      : values_(std::move(values)) {}
  Eigen::MatrixXd values_;
};

// Frobenius-nearest positive semidefinite matrix: eigendecompose, zero the
// negative eigenvalues, reconstruct.
absl::StatusOr<SymmetricMatrix> PsdProject(const SymmetricMatrix& m);

// A PSD matrix held as V diag(lambda) V^T with orthonormal columns of V and
// strictly positive lambda. Used when the order is too large to store or
// eigendecompose directly.
struct PsdFactor {
  Eigen::Index order = 0;
  Eigen::MatrixXd basis;        // order x rank
  Eigen::VectorXd eigenvalues;  // rank

  Eigen::Index rank() const { return eigenvalues.size(); }
  Eigen::VectorXd Multiply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd Dense() const;
};

// Proj_{S+}(Z^T Z - shift * I) for an n x k matrix Z and shift >= 0, computed
// by eigendecomposing whichever of Z^T Z (k x k) or Z Z^T (n x n) is smaller.
// When k > n the k - n directions in the null space of Z have eigenvalue
// -shift and are dropped exactly.
absl::StatusOr<PsdFactor> PsdProjectShiftedGram(const Eigen::MatrixXd& z,
                                                double shift);

}  // namespace nildp::numerics

#endif  // NILDP_NUMERICS_SYMMETRIC_H_
