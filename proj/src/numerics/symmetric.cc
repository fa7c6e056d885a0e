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

#include "nildp/numerics/symmetric.h"

#include <cmath>

#include "Eigen/Eigenvalues"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace nildp::numerics {
namespace {

absl::Status EigenFailure(const Eigen::MatrixXd& m) {
  const double norm = m.norm();
  return absl::InternalError(
      absl::StrCat("symmetric eigensolver did not converge (order ", m.rows(),
                   ", Frobenius norm ", norm, ", finite ",
                   m.allFinite() ? "yes" : "no", ")"));
}

}  // namespace

absl::StatusOr<SymmetricMatrix> SymmetricMatrix::Create(
    const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    return absl::InvalidArgumentError("matrix is not square");
  }
  if (!m.allFinite()) {
    return absl::InvalidArgumentError("matrix has non-finite entries");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    return absl::InvalidArgumentError(
        absl::StrCat("matrix is not symmetric (max |M - M^T| = ", asym, ")"));
  }
  return SymmetricMatrix(0.5 * (m + m.transpose()));
}

SymmetricMatrix SymmetricMatrix::Identity(Eigen::Index n) {
  return SymmetricMatrix(Eigen::MatrixXd::Identity(n, n));
}

absl::StatusOr<SymmetricMatrix> PsdProject(const SymmetricMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.values());
  if (solver.info() != Eigen::Success) return EigenFailure(m.values());
  const Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd& v = solver.eigenvectors();
  Eigen::MatrixXd out = v * clipped.asDiagonal() * v.transpose();
  return SymmetricMatrix::Create(0.5 * (out + out.transpose()));
}

Eigen::VectorXd PsdFactor::Multiply(const Eigen::VectorXd& v) const {
  if (rank() == 0) return Eigen::VectorXd::Zero(order);
  return basis * (eigenvalues.asDiagonal() * (basis.transpose() * v));
}

Eigen::MatrixXd PsdFactor::Dense() const {
  if (rank() == 0) return Eigen::MatrixXd::Zero(order, order);
  return basis * eigenvalues.asDiagonal() * basis.transpose();
}

absl::StatusOr<PsdFactor> PsdProjectShiftedGram(const Eigen::MatrixXd& z,
                                                double shift) {
  if (!(shift >= 0.0)) {
    return absl::InvalidArgumentError("shift must be non-negative");
  }
  const Eigen::Index n = z.rows();
  const Eigen::Index k = z.cols();
  PsdFactor factor;
  factor.order = k;
  if (k <= n) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) return EigenFailure(gram);
    const Eigen::VectorXd shifted =
        solver.eigenvalues().array() - shift;
    Eigen::Index kept = 0;
    for (Eigen::Index i = 0; i < k; ++i) kept += shifted[i] > 0.0 ? 1 : 0;
    factor.basis.resize(k, kept);
    factor.eigenvalues.resize(kept);
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (shifted[i] <= 0.0) continue;
      factor.basis.col(c) = solver.eigenvectors().col(i);
      factor.eigenvalues[c] = shifted[i];
      ++c;
    }
    return factor;
  }
  // Z^T Z and Z Z^T share their non-zero spectrum; eigenvectors map through
  // v = Z^T u / sqrt(lambda).
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(z);
  gram = gram.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) return EigenFailure(gram);
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    kept += (lambda[i] - shift > 0.0 && lambda[i] > 0.0) ? 1 : 0;
  }
  factor.basis.resize(k, kept);
  factor.eigenvalues.resize(kept);
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lambda[i] - shift > 0.0 && lambda[i] > 0.0)) continue;
    Eigen::VectorXd v = z.transpose() * solver.eigenvectors().col(i);
    v /= v.norm();
    factor.basis.col(c) = v;
    factor.eigenvalues[c] = lambda[i] - shift;
    ++c;
  }
  return factor;
}

}  // namespace nildp::numerics
