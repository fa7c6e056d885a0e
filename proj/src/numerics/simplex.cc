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

#include "nildp/numerics/simplex.h"

#include <cmath>
#include <limits>
#include <vector>

#include "Eigen/LU"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace nildp::numerics {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Tableau with the objective in the last row and right-hand sides in the last
// column. The objective row holds reduced costs; its last entry holds -z.
class Tableau {
 public:
  Tableau(RowMatrix t, std::vector<Eigen::Index> basis,
          const SimplexOptions& options)
      : t_(std::move(t)), basis_(std::move(basis)), options_(options) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index rhs_col() const { return t_.cols() - 1; }
  RowMatrix& t() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }
  int64_t iterations() const { return iterations_; }

  void Pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    basis_[row] = col;
  }

  // Runs the simplex loop over columns [0, allowed_cols).
  absl::Status Optimize(Eigen::Index allowed_cols, int64_t max_iterations) {
    const double tol = options_.pivot_tolerance;
    const Eigen::Index obj = rows();
    bool bland = false;
    int64_t degenerate = 0;
    while (true) {
      if (iterations_ >= max_iterations) {
        return absl::ResourceExhaustedError(
            absl::StrCat("simplex iteration cap ", max_iterations, " hit"));
      }
      Eigen::Index enter = -1;
      double best = -tol;
      for (Eigen::Index j = 0; j < allowed_cols; ++j) {
        const double d = t_(obj, j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return absl::OkStatus();

      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < obj; ++i) {
        const double a = t_(i, enter);
        if (a <= tol) continue;
        const double ratio = std::max(t_(i, rhs_col()), 0.0) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && leave >= 0 &&
             basis_[i] < basis_[leave])) {
          best_ratio = std::min(best_ratio, ratio);
          leave = i;
        }
      }
      if (leave < 0) {
        return absl::OutOfRangeError("linear program is unbounded");
      }
      if (best_ratio <= 1e-12) {
        if (++degenerate > options_.degenerate_streak_limit) bland = true;
      } else {
        degenerate = 0;
      }
      Pivot(leave, enter);
      ++iterations_;
    }
  }

 private:
  RowMatrix t_;
  std::vector<Eigen::Index> basis_;
  SimplexOptions options_;
  int64_t iterations_ = 0;
};

}  // namespace

absl::StatusOr<LpSolution> SolveLinearProgram(const LinearProgram& lp,
                                              const SimplexOptions& options) {
  const Eigen::Index n = lp.cost.size();
  const Eigen::Index m_eq = lp.a_eq.rows();
  const Eigen::Index m_ub = lp.a_ub.rows();
  if ((m_eq > 0 && lp.a_eq.cols() != n) || lp.b_eq.size() != m_eq ||
      (m_ub > 0 && lp.a_ub.cols() != n) || lp.b_ub.size() != m_ub) {
    return absl::InvalidArgumentError("linear program shapes are inconsistent");
  }
  const Eigen::Index m = m_eq + m_ub;
  const Eigen::Index n_struct = n + m_ub;  // structural + slack columns
  const Eigen::Index n_total = n_struct + m;  // + artificials

  // Standard-form constraint matrix [A | S] and rhs, rows sign-flipped so the
  // rhs is non-negative.
  Eigen::MatrixXd a_std = Eigen::MatrixXd::Zero(m, n_struct);
  Eigen::VectorXd b_std(m);
  if (m_eq > 0) a_std.topLeftCorner(m_eq, n) = lp.a_eq;
  if (m_ub > 0) {
    a_std.block(m_eq, 0, m_ub, n) = lp.a_ub;
    a_std.block(m_eq, n, m_ub, m_ub).setIdentity();
  }
  b_std << lp.b_eq, lp.b_ub;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (b_std[i] < 0.0) {
      a_std.row(i) *= -1.0;
      b_std[i] = -b_std[i];
    }
  }

  RowMatrix t = RowMatrix::Zero(m + 1, n_total + 1);
  t.topLeftCorner(m, n_struct) = a_std;
  t.block(0, n_struct, m, m).setIdentity();
  t.topRightCorner(m, 1) = b_std;
  std::vector<Eigen::Index> basis(static_cast<size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = n_struct + i;
  // Phase-one reduced costs for the artificial basis.
  for (Eigen::Index i = 0; i < m; ++i) {
    t.row(m).head(n_struct) -= t.row(i).head(n_struct);
    t(m, n_total) -= b_std[i];
  }

  const int64_t max_iter = options.max_iterations > 0
                               ? options.max_iterations
                               : 50 * static_cast<int64_t>(m + n_total);
  Tableau tab(std::move(t), std::move(basis), options);
  if (absl::Status s = tab.Optimize(n_struct, max_iter); !s.ok()) return s;

  const double infeasibility = -tab.t()(m, n_total);
  const double scale = 1.0 + b_std.lpNorm<1>();
  if (infeasibility > options.feasibility_tolerance * scale) {
    return absl::FailedPreconditionError(absl::StrCat(
        "linear program is infeasible (phase-one residual ", infeasibility,
        ")"));
  }
  // Drive remaining artificials out of the basis where possible. Rows whose
  // structural part vanished are redundant and keep a zero artificial.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis()[i] < n_struct) continue;
    Eigen::Index col = -1;
    double best = options.pivot_tolerance;
    for (Eigen::Index j = 0; j < n_struct; ++j) {
      const double a = std::abs(tab.t()(i, j));
      if (a > best) {
        best = a;
        col = j;
      }
    }
    if (col >= 0) tab.Pivot(i, col);
  }

  // Phase two: original costs on structural columns.
  RowMatrix& tt = tab.t();
  tt.row(m).setZero();
  tt.row(m).head(n) = lp.cost.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index b = tab.basis()[i];
    const double cb = b < n ? lp.cost[b] : 0.0;
    if (cb != 0.0) tt.row(m) -= cb * tt.row(i);
  }
  if (absl::Status s = tab.Optimize(n_struct, max_iter); !s.ok()) return s;

  // Recover the basic solution and polish it with a direct solve against the
  // original standard-form columns.
  Eigen::VectorXd x_std = Eigen::VectorXd::Zero(n_struct);
  std::vector<Eigen::Index> structural_rows;
  std::vector<Eigen::Index> structural_cols;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index b = tab.basis()[i];
    if (b < n_struct) {
      x_std[b] = std::max(tt(i, n_total), 0.0);
      structural_rows.push_back(i);
      structural_cols.push_back(b);
    }
  }
  if (structural_cols.size() == static_cast<size_t>(m) && m > 0) {
    Eigen::MatrixXd basis_matrix(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      basis_matrix.col(k) = a_std.col(structural_cols[k]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    const Eigen::VectorXd xb = lu.solve(b_std);
    if (xb.allFinite() && (basis_matrix * xb - b_std).lpNorm<Eigen::Infinity>() <
                              1e-10 * scale &&
        xb.minCoeff() > -1e-9) {
      for (Eigen::Index k = 0; k < m; ++k) {
        x_std[structural_cols[k]] = std::max(xb[k], 0.0);
      }
    }
  }

  LpSolution out;
  out.x = x_std.head(n);
  out.objective = lp.cost.dot(out.x);
  out.iterations = tab.iterations();
  return out;
}

}  // namespace nildp::numerics
