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

#include <cmath>
#include <vector>

#include "Eigen/Dense"
#include "gtest/gtest.h"
#include "nildp/numerics/frank_wolfe.h"
#include "nildp/numerics/inexact_sgd.h"
#include "nildp/numerics/l1_recovery.h"
#include "nildp/numerics/projection.h"
#include "nildp/numerics/simplex.h"
#include "nildp/numerics/symmetric.h"
#include "nildp/rng.h"
#include "support/oracles.h"

namespace nildp::numerics {
namespace {

Eigen::MatrixXd GaussianMatrix(int rows, int cols, SeededRng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.Gaussian();
  return m;
}

Eigen::VectorXd RandomUnit(int d, SeededRng& rng) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.Gaussian();
  return v.normalized();
}

// ---- projections ----

TEST(ProjectionTest, EntryVariance) {
  const ProjectionOperator g =
      *SampleProjection(ProjectionKind::kMeanSketch, 1000, 100, 5);
  const double mean = g.matrix().mean();
  const double var =
      (g.matrix().array() - mean).square().sum() / (g.matrix().size() - 1);
  EXPECT_GE(var, 0.00095);
  EXPECT_LE(var, 0.00105);
}

TEST(ProjectionTest, DeterministicAndKindsDiffer) {
  const auto a = *SampleProjection(ProjectionKind::kMeanSketch, 7, 9, 42);
  const auto b = *SampleProjection(ProjectionKind::kMeanSketch, 7, 9, 42);
  const auto c = *SampleProjection(ProjectionKind::kRegressionSketch, 7, 9, 42);
  EXPECT_EQ(a.matrix(), b.matrix());
  EXPECT_NE(a.matrix(), c.matrix());
  EXPECT_FALSE(SampleProjection(ProjectionKind::kMeanSketch, 0, 3, 1).ok());
}

TEST(ProjectionTest, NormPreservedOnAverage) {
  SeededRng rng(1, MakeStreamId(StreamPurpose::kTest, 0));
  const Eigen::VectorXd x = RandomUnit(50, rng);
  double total = 0.0;
  for (int s = 0; s < 200; ++s) {
    total += SampleProjection(ProjectionKind::kMeanSketch, 20, 50, s)
                 ->Apply(x)
                 .norm();
  }
  EXPECT_GE(total / 200, 0.9);
  EXPECT_LE(total / 200, 1.1);
}

TEST(ProjectionTest, InnerProductPreservation) {
  const auto phi =
      *SampleProjection(ProjectionKind::kRegressionSketch, 200, 1000, 3);
  SeededRng rng(2, MakeStreamId(StreamPurpose::kTest, 0));
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::VectorXd w = RandomUnit(1000, rng);
    const Eigen::VectorXd x = RandomUnit(1000, rng);
    worst = std::max(worst,
                     std::abs(w.dot(x) - phi.Apply(w).dot(phi.Apply(x))));
  }
  EXPECT_LE(worst, 0.5);
}

// ---- PSD projection ----

SymmetricMatrix Sym(const Eigen::MatrixXd& m) {
  return *SymmetricMatrix::Create(m);
}

TEST(PsdProjectTest, HandCases) {
  EXPECT_TRUE(PsdProject(SymmetricMatrix::Identity(3))
                  ->values()
                  .isApprox(Eigen::MatrixXd::Identity(3, 3)));
  Eigen::MatrixXd d = Eigen::Vector2d(1, -2).asDiagonal();
  Eigen::MatrixXd want = Eigen::Vector2d(1, 0).asDiagonal();
  EXPECT_LT((PsdProject(Sym(d))->values() - want).norm(), 1e-12);
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  Eigen::MatrixXd half = Eigen::MatrixXd::Constant(2, 2, 0.5);
  EXPECT_LT((PsdProject(Sym(swap))->values() - half).norm(), 1e-12);
}

TEST(PsdProjectTest, RejectsAsymmetric) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 0, 1;
  EXPECT_FALSE(SymmetricMatrix::Create(m).ok());
}

TEST(PsdProjectTest, IdempotentAndFrobeniusOptimal) {
  SeededRng rng(3, MakeStreamId(StreamPurpose::kTest, 0));
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd m = GaussianMatrix(4, 4, rng);
    m = (m + m.transpose()).eval();
    const SymmetricMatrix proj = *PsdProject(Sym(m));
    const SymmetricMatrix twice = *PsdProject(proj);
    EXPECT_LT((twice.values() - proj.values()).norm(), 1e-10);
    const double best = (m - proj.values()).norm();
    for (int c = 0; c < 1000; ++c) {
      const Eigen::MatrixXd b = GaussianMatrix(4, 4, rng);
      const Eigen::MatrixXd cand = b * b.transpose() * rng.Uniform();
      ASSERT_LE(best, (m - cand).norm() + 1e-12);
    }
  }
}

TEST(PsdProjectTest, ShiftedGramMatchesDenseBothOrientations) {
  SeededRng rng(4, MakeStreamId(StreamPurpose::kTest, 0));
  for (const auto& [n, k] : std::vector<std::pair<int, int>>{{30, 6}, {5, 12}}) {
    const Eigen::MatrixXd z = GaussianMatrix(n, k, rng);
    const double shift = 3.0;
    Eigen::MatrixXd gram = z.transpose() * z;
    gram.diagonal().array() -= shift;
    const Eigen::MatrixXd want = PsdProject(Sym(gram))->values();
    const PsdFactor f = *PsdProjectShiftedGram(z, shift);
    EXPECT_LT((f.Dense() - want).norm(), 1e-9 * (1 + want.norm()))
        << n << "x" << k;
    const Eigen::VectorXd v = Eigen::VectorXd::Ones(k);
    EXPECT_LT((f.Multiply(v) - want * v).norm(), 1e-9 * (1 + want.norm()));
  }
}

// ---- simplex ----

TEST(SimplexTest, MatchesInteriorPoint) {
  SeededRng rng(5, MakeStreamId(StreamPurpose::kTest, 0));
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 4, n = 10;
    LinearProgram lp;
    lp.a_eq = GaussianMatrix(m, n, rng);
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i) x0(i) = rng.Uniform();
    lp.b_eq = lp.a_eq * x0;
    lp.cost.resize(n);
    for (int i = 0; i < n; ++i) lp.cost(i) = rng.Uniform() + 0.1;
    const LpSolution sol = *SolveLinearProgram(lp);
    const testing::IpmResult ref =
        testing::InteriorPointLp(lp.cost, lp.a_eq, lp.b_eq);
    ASSERT_TRUE(ref.converged);
    EXPECT_NEAR(sol.objective, ref.objective, 1e-7);
    EXPECT_LT((lp.a_eq * sol.x - lp.b_eq).norm(), 1e-8);
    EXPECT_GE(sol.x.minCoeff(), 0.0);
  }
}

TEST(SimplexTest, InequalitiesAndStatuses) {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6  ->  x = 1.6, y = 1.2.
  LinearProgram lp;
  lp.cost = Eigen::Vector2d(-1, -1);
  lp.a_ub.resize(2, 2);
  lp.a_ub << 1, 2, 3, 1;
  lp.b_ub = Eigen::Vector2d(4, 6);
  const LpSolution sol = *SolveLinearProgram(lp);
  EXPECT_NEAR(sol.x(0), 1.6, 1e-12);
  EXPECT_NEAR(sol.x(1), 1.2, 1e-12);

  LinearProgram unbounded;
  unbounded.cost = Eigen::Vector2d(-1, 0);
  unbounded.a_ub = Eigen::RowVector2d(0, 1);
  unbounded.b_ub = Eigen::VectorXd::Ones(1);
  EXPECT_EQ(SolveLinearProgram(unbounded).status().code(),
            absl::StatusCode::kOutOfRange);

  LinearProgram infeasible;
  infeasible.cost = Eigen::Vector2d(1, 1);
  infeasible.a_eq = Eigen::RowVector2d(1, 1);
  infeasible.b_eq = -Eigen::VectorXd::Ones(1);
  EXPECT_EQ(SolveLinearProgram(infeasible).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

// ---- l1 recovery ----

double RecoveryByInteriorPoint(const Eigen::MatrixXd& g,
                               const Eigen::VectorXd& u, double bound) {
  const testing::IpmResult r = testing::L1RecoveryByInteriorPoint(g, u, bound);
  EXPECT_TRUE(r.converged);
  return r.objective;
}

TEST(L1RecoveryTest, HandCases) {
  Eigen::VectorXd u(3);
  u << 0.3, 0, 0;
  auto prob = *RecoveryProblem::Create(Eigen::MatrixXd::Identity(3, 3), u,
                                       0.0, 1.0);
  EXPECT_LT((L1Recovery(prob)->z - u).norm(), 1e-12);

  SeededRng rng(6, 1);
  auto zero = *RecoveryProblem::Create(GaussianMatrix(4, 7, rng),
                                       Eigen::VectorXd::Zero(4), 0.5, 2.0);
  EXPECT_EQ(L1Recovery(zero)->z, Eigen::VectorXd::Zero(7));
  EXPECT_FALSE(RecoveryProblem::Create(Eigen::MatrixXd::Identity(2, 2),
                                       Eigen::VectorXd::Zero(2), -1.0, 1.0)
                   .ok());
}

TEST(L1RecoveryTest, ExactSparseRecovery) {
  SeededRng rng(7, MakeStreamId(StreamPurpose::kTest, 0));
  int certified = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd g = GaussianMatrix(6, 20, rng);
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(20);
    const int i = static_cast<int>(rng.Uniform() * 20);
    const int j = (i + 1 + static_cast<int>(rng.Uniform() * 19)) % 20;
    truth(i) = rng.Gaussian();
    truth(j) = rng.Gaussian();
    const Eigen::VectorXd u = g * truth;
    auto prob = *RecoveryProblem::Create(g, u, 0.0, 1.0);
    const RecoveryResult res = *L1Recovery(prob);
    const double optimum = RecoveryByInteriorPoint(g, u, 0.0);
    EXPECT_NEAR(res.l1_norm, optimum, 1e-6);
    EXPECT_LT((g * res.z - u).lpNorm<1>(), 1e-9);
    // Basis pursuit recovers the planted vector only when it is the l1
    // minimizer; at 6 x 20 that holds for roughly half of random 2-sparse
    // draws. Whenever the independent LP certifies it, recovery must be exact.
    if (truth.lpNorm<1>() <= optimum + 1e-9) {
      ++certified;
      EXPECT_LT((res.z - truth).cwiseAbs().maxCoeff(), 1e-6) << trial;
    }
  }
  EXPECT_GT(certified, 10);
}

TEST(L1RecoveryTest, NoisyInstancesMatchIndependentLp) {
  SeededRng rng(8, MakeStreamId(StreamPurpose::kTest, 0));
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd g = GaussianMatrix(6, 20, rng);
    Eigen::VectorXd u(6);
    for (int k = 0; k < 6; ++k) u(k) = rng.Gaussian();
    const double bound = 0.5 * u.lpNorm<1>() * rng.Uniform();
    auto prob = *RecoveryProblem::Create(g, u, bound, 1.0);
    const RecoveryResult res = *L1Recovery(prob);
    EXPECT_LE((g * res.z - u).lpNorm<1>(), bound + 1e-9);
    EXPECT_NEAR(res.l1_norm, RecoveryByInteriorPoint(g, u, bound), 1e-6);
  }
}

TEST(L1RecoveryTest, InfeasibleReportsMinimalResidual) {
  // Rank-one G cannot match u exactly.
  Eigen::MatrixXd g(2, 2);
  g << 1, 1, 1, 1;
  const Eigen::Vector2d u(1, -1);
  auto prob = *RecoveryProblem::Create(g, u, 0.5, 1.0);
  const auto res = L1Recovery(prob);
  ASSERT_EQ(res.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_NE(res.status().message().find("2"), std::string::npos);
  EXPECT_NEAR(*MinimalL1Residual(g, u), 2.0, 1e-9);
}

// ---- Frank-Wolfe ----

TEST(FrankWolfeTest, HandCases) {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_EQ(FrankWolfeL1(eye, Eigen::VectorXd::Zero(2), 1.0, {})->w,
            Eigen::VectorXd::Zero(2));
  const Eigen::Vector2d b(-2, 0);
  const FrankWolfeResult r = *FrankWolfeL1(eye, b, 1.0, {});
  EXPECT_LT((r.w - Eigen::Vector2d(1, 0)).norm(), 1e-9);
  // Grid search over the ball agrees.
  double best = 1e300;
  Eigen::Vector2d arg;
  for (int i = -200; i <= 200; ++i) {
    for (int j = -200; j <= 200; ++j) {
      const Eigen::Vector2d w(i / 200.0, j / 200.0);
      if (w.lpNorm<1>() > 1.0) continue;
      const double f = testing::Quadratic(eye, b, w);
      if (f < best) best = f, arg = w;
    }
  }
  EXPECT_LT((arg - r.w).norm(), 1e-9);
}

TEST(FrankWolfeTest, FeasibleNonNegativeGapsAndAgreesWithOracle) {
  SeededRng rng(9, MakeStreamId(StreamPurpose::kTest, 0));
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd x = GaussianMatrix(40, 15, rng);
    const Eigen::MatrixXd a = x.transpose() * x / 40.0;
    Eigen::VectorXd b(15);
    for (int i = 0; i < 15; ++i) b(i) = 2.0 * rng.Gaussian();
    FrankWolfeOptions opts;
    opts.max_iterations = 20000;
    opts.record_gaps = true;
    const FrankWolfeResult r = *FrankWolfeL1(a, b, 1.0, opts);
    EXPECT_LE(r.w.lpNorm<1>(), 1.0 + 1e-15);
    for (double g : r.gaps) ASSERT_GE(g, 0.0);
    EXPECT_LE(r.gap, 1e-6);
    const Eigen::VectorXd ref = testing::PlainProjectedGradient(a, b, 1.0, 20000);
    EXPECT_NEAR(r.objective, testing::Quadratic(a, b, ref), 1e-6);
    const FrankWolfeResult pg = *ProjectedGradientL1(a, b, 1.0);
    EXPECT_NEAR(pg.objective, testing::Quadratic(a, b, ref), 1e-9);
  }
}

TEST(FrankWolfeTest, L1BallProjectionMatchesBisection) {
  SeededRng rng(10, MakeStreamId(StreamPurpose::kTest, 0));
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd v(12);
    for (int i = 0; i < 12; ++i) v(i) = 2.0 * rng.Gaussian();
    const double radius = 0.1 + 3.0 * rng.Uniform();
    EXPECT_LT((ProjectOntoL1Ball(v, radius) -
               testing::BisectionL1Projection(v, radius))
                  .norm(),
              1e-10);
  }
}

// ---- inexact SGD ----

struct QuadraticTestbed {
  Eigen::VectorXd w_star;
  double sigma = 0.0;
  double bias = 0.0;
  uint64_t seed = 0;

  double Excess(const Eigen::VectorXd& w) const {
    return 0.5 * (w - w_star).squaredNorm();
  }
  GradientOracle Oracle() const {
    return [this](const Eigen::VectorXd& w, int64_t k)
               -> std::optional<OracleSample> {
      Eigen::VectorXd g = w - w_star;
      g(0) += bias;
      if (sigma > 0.0) {
        SeededRng rng(seed, MakeStreamId(StreamPurpose::kTest,
                                         static_cast<uint64_t>(k)));
        const double per = sigma / std::sqrt(static_cast<double>(g.size()));
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i) += per * rng.Gaussian();
      }
      return OracleSample{g, static_cast<uint64_t>(k), 0};
    };
  }
};

TEST(InexactSgdTest, ExactGradientsConverge) {
  QuadraticTestbed bed;
  bed.w_star = Eigen::Vector3d(0.3, -0.4, 0.2);
  InexactSgdOptions opts;
  opts.steps = 1000;
  opts.rule = {1.0, 0.0, 1.0};
  const InexactSgdResult r =
      *InexactSgd(bed.Oracle(), Eigen::VectorXd::Zero(3), opts);
  EXPECT_LT((r.last - bed.w_star).norm(), 1e-3);
  EXPECT_LT((r.average - bed.w_star).norm(), 1e-3);
}

TEST(InexactSgdTest, NoisyExcessRiskSlope) {
  const std::vector<int64_t> checkpoints = {100, 316, 1000, 3162, 10000,
                                            31623, 100000};
  std::vector<double> mean_excess(checkpoints.size(), 0.0);
  const int reps = 40;
  for (int rep = 0; rep < reps; ++rep) {
    QuadraticTestbed bed;
    bed.w_star = Eigen::Vector3d(0.3, -0.4, 0.2);
    bed.sigma = 1.0;
    bed.seed = 1000 + rep;
    InexactSgdOptions opts;
    opts.steps = checkpoints.back();
    opts.rule = {1.0, 1.0, 1.0};
    size_t next = 0;
    opts.observer = [&](int64_t k, const Eigen::VectorXd& w) {
      if (next < checkpoints.size() && k == checkpoints[next]) {
        mean_excess[next++] += bed.Excess(w) / reps;
      }
    };
    ASSERT_TRUE(InexactSgd(bed.Oracle(), Eigen::VectorXd::Zero(3), opts).ok());
  }
  std::vector<double> ks(checkpoints.begin(), checkpoints.end());
  const double slope = testing::LogLogSlope(ks, mean_excess);
  EXPECT_GE(slope, -0.7);
  EXPECT_LE(slope, -0.3);
}

TEST(InexactSgdTest, BiasedOraclePlateau) {
  QuadraticTestbed bed;
  bed.w_star = Eigen::Vector3d(0.3, -0.4, 0.2);
  bed.bias = 0.05;
  bed.sigma = 0.1;
  bed.seed = 77;
  InexactSgdOptions opts;
  opts.steps = 20000;
  opts.rule = {1.0, 0.1, 1.0};
  const InexactSgdResult r =
      *InexactSgd(bed.Oracle(), Eigen::VectorXd::Zero(3), opts);
  EXPECT_LE(bed.Excess(r.average), 5 * bed.bias);
}

TEST(InexactSgdTest, SkipsNonFiniteAndStaysInBall) {
  GradientOracle oracle = [](const Eigen::VectorXd& w, int64_t k)
      -> std::optional<OracleSample> {
    if (k > 10) return std::nullopt;
    Eigen::VectorXd g = -10.0 * Eigen::VectorXd::Ones(w.size());
    if (k == 3) g(0) = NAN;
    return OracleSample{g, 0, 0};
  };
  InexactSgdOptions opts;
  opts.steps = 100;
  const InexactSgdResult r = *InexactSgd(oracle, Eigen::VectorXd::Zero(2), opts);
  EXPECT_EQ(r.skipped, 1);
  EXPECT_EQ(r.steps_taken, 10);
  EXPECT_LE(r.last.norm(), 1.0 + 1e-15);
}

TEST(InexactSgdTest, ZeroStepsReturnsStart) {
  GradientOracle oracle = [](const Eigen::VectorXd& w, int64_t)
      -> std::optional<OracleSample> { return OracleSample{w, 0, 0}; };
  InexactSgdOptions opts;
  const Eigen::Vector2d w1(0.1, 0.2);
  const InexactSgdResult r = *InexactSgd(oracle, w1, opts);
  EXPECT_EQ(r.last, Eigen::VectorXd(w1));
  EXPECT_EQ(r.average, Eigen::VectorXd(w1));
}

}  // namespace
}  // namespace nildp::numerics
