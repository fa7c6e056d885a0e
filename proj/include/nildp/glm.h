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

// Smooth generalized linear losses l(w; x, y) = -y h1(r x^T w) + h2(r x^T w)
// learned from one-shot synopses. The gradient coefficients h_i'(r u) are
// replaced by Chebyshev truncations, rewritten as polynomials in u, and each
// power of w^T x is estimated without bias by a product of inner products with
// independent noisy copies of x.

#ifndef NILDP_GLM_H_
#define NILDP_GLM_H_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "nildp/numerics/inexact_sgd.h"
#include "nildp/privacy.h"

namespace nildp::glm {

// Monomial coefficients of a degree-p truncation grow like 2^p; beyond this
// degree the conversion is too ill-conditioned to be useful.
inline constexpr int64_t kMaxDegree = 30;

using UnivariateFn = std::function<double(double)>;
using SmoothnessProfile = std::function<double(int64_t k, double r)>;

struct SgllSpec {
  std::string name;
  UnivariateFn h1, h1_prime, h2, h2_prime;
  SmoothnessProfile mu1, mu2;
  double r = 1.0;
  double beta = 0.0;    // smoothness of l in w on the unit balls
  double sigma0 = 0.0;  // gradient-variance bound, used for step sizes only

  double Loss(const Eigen::VectorXd& w, const Eigen::VectorXd& x,
              double y) const;
  Eigen::VectorXd Gradient(const Eigen::VectorXd& w, const Eigen::VectorXd& x,
                           double y) const;
  // f_i(u) = h_i'(r u) on [-1, 1].
  double F1(double u) const { return h1_prime(r * u); }
  double F2(double u) const { return h2_prime(r * u); }
};

// h1(s) = s/2, h2(s) = s/2 + ln(1 + e^{-s}), so that for y in {-1, 1} the loss
// is ln(1 + exp(-y r x^T w)).
absl::StatusOr<SgllSpec> LogisticSpec(double r);

// Mean logistic-type loss of w over the rows of (x, y).
double MeanLoss(const SgllSpec& spec, const Eigen::VectorXd& w,
                const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Non-private minimizer of MeanLoss over the unit l2 ball by projected
// gradient descent with step 1 / beta.
absl::StatusOr<Eigen::VectorXd> ReferenceMinimizer(const SgllSpec& spec,
                                                   const Eigen::MatrixXd& x,
                                                   const Eigen::VectorXd& y,
                                                   int64_t max_iterations = 5000);

// Constant term of the truncated series: a_0 / 2 (the expansion itself) or a
// fixed 1/2.
enum class ConstantTerm { kHalfA0, kFixedHalf };

struct ChebyshevApprox {
  int64_t degree = 0;
  Eigen::VectorXd a;       // raw coefficients a_0..a_p
  Eigen::VectorXd series;  // series(0) is the constant term actually used
  Eigen::VectorXd monomial;
  ConstantTerm constant = ConstantTerm::kHalfA0;
  double sup_error = 0.0;  // measured on the evaluation grid

  double Evaluate(double x) const;          // Clenshaw on `series`
  double EvaluateMonomial(double x) const;  // Horner on `monomial`
};

// Coefficients from the values at N = 4(p+1) first-kind Chebyshev nodes,
// a_k = (2/N) sum_j f(x_j) cos(k theta_j).
absl::StatusOr<ChebyshevApprox> ChebyshevFit(
    const UnivariateFn& f, int64_t p,
    ConstantTerm constant = ConstantTerm::kHalfA0);

// sum_k series_k T_k(x) -> sum_k c_k x^k. The three-term recurrence runs in
// long double.
absl::StatusOr<Eigen::VectorXd> ChebToMonomial(const Eigen::VectorXd& series);

double Clenshaw(const Eigen::VectorXd& series, double x);

// max |f(x) - approx(x)| over `points` equispaced points of [-1, 1].
double GridSupError(const UnivariateFn& f, const ChebyshevApprox& approx,
                    int64_t points = 1000);

// p = ceil(k + e mu2(k; r)) or p = ceil(k + 2 mu2(k; r)).
enum class DegreeRule { kEulerMargin, kDoubleMargin };

int64_t DegreeFor(const SgllSpec& spec, int64_t k, DegreeRule rule);

struct TruncationOptions {
  double c = 2.0;
  double c_step = 0.5;  // increment when the measured error misses the target
  DegreeRule rule = DegreeRule::kDoubleMargin;
  ConstantTerm constant = ConstantTerm::kHalfA0;
};

struct Truncation {
  int64_t k = 0;
  int64_t p = 0;
  double c = 0.0;
  double sup_error_f1 = 0.0;
  double sup_error_f2 = 0.0;
  int64_t escalations = 0;
};

// k = ceil(c ln(1/alpha)) and p from `rule`; c is raised until both f1 and f2
// are approximated within alpha on the grid. Fails once p would exceed
// kMaxDegree.
absl::StatusOr<Truncation> TruncationDegree(const SgllSpec& spec, double alpha,
                                            const TruncationOptions& options = {});

// Degree selection of the learning path for target bias gamma:
// k = ceil(c ln(4r / gamma)), p = ceil(k + 2 mu2(k; r)). A positive
// `explicit_p` bypasses the formula.
struct OracleConfig {
  double gamma = 0.1;
  double c = 2.0;
  int64_t explicit_p = 0;
  ConstantTerm constant = ConstantTerm::kHalfA0;
};

absl::StatusOr<int64_t> OracleDegree(const SgllSpec& spec,
                                     const OracleConfig& config);

// Monomial coefficients of the truncations of f1 and f2 at a common degree.
struct GradientCoefficients {
  int64_t p = 0;
  double r = 1.0;
  Eigen::VectorXd c1, c2;
  double alpha1 = 0.0, alpha2 = 0.0;  // measured sup errors
};

absl::StatusOr<GradientCoefficients> BuildCoefficients(
    const SgllSpec& spec, int64_t p,
    ConstantTerm constant = ConstantTerm::kHalfA0);

// Per-invocation budgets of a synopsis of degree p.
struct SynopsisBudgets {
  privacy::PrivacyBudget direction;  // z0
  privacy::PrivacyBudget label;      // each of the p+1 label copies
  privacy::PrivacyBudget copy;       // each of the p(p+1)/2 data copies
};

absl::StatusOr<SynopsisBudgets> SynopsisBudgetsFor(
    const privacy::PrivacyBudget& budget, int64_t p);

// At p = 0 there are no data copies and half the budget is left unused.
absl::StatusOr<privacy::BudgetAudit> SynopsisAudit(
    const privacy::PrivacyBudget& budget, int64_t p, bool test_mode);

struct ClientSynopsis {
  Eigen::VectorXd z0;
  Eigen::VectorXd labels;  // z_{y,0..p}
  Eigen::MatrixXd copies;  // one fresh copy of x per row, p(p+1)/2 rows
  int64_t degree() const { return labels.size() - 1; }
};

inline int64_t CopyCount(int64_t p) { return p * (p + 1) / 2; }

// Half-open range of 0-based copy indices multiplied together in t_j
// (j >= 1): [j(j-1)/2, j(j+1)/2).
inline std::pair<int64_t, int64_t> CopyBlock(int64_t j) {
  return {j * (j - 1) / 2, j * (j + 1) / 2};
}

// Every copy owns a stream: z0 (kSynopsisDirection, user), label k
// (kSynopsisLabel, user, k), data copy i (kSynopsisCopy, user, i).
absl::StatusOr<ClientSynopsis> ClientCollect(
    const Eigen::VectorXd& x, double y, int64_t p,
    const privacy::PrivacyBudget& budget, const privacy::NoisePolicy& policy,
    uint64_t seed, uint64_t user);

// G~ = r (sum_k (c2_k - c1_k z_{y,k}) t_k) z0 with t_0 = 1 and
// t_j = prod over CopyBlock(j) of w^T z_i.
absl::StatusOr<Eigen::VectorXd> InexactGradient(
    const Eigen::VectorXd& w, const ClientSynopsis& synopsis,
    const GradientCoefficients& coeffs);

// Conditional mean of G~ given (x, y, w):
// r (sum_k (c2_k - c1_k y) (x^T w)^k) x.
Eigen::VectorXd ExpectedGradient(const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& x, double y,
                                 const GradientCoefficients& coeffs);

// E[t_j^2] = prod over the block of (sigma^2 |w|^2 + (w^T x)^2), an upper
// bound on var(t_j).
double ProductMomentBound(const Eigen::VectorXd& w, const Eigen::VectorXd& x,
                          double copy_sigma, int64_t j);

// Data-independent bound on sqrt(E |G~|^2) over |w| <= 1, |x| <= 1,
// |y| <= 1. Uses only public parameters, so it can size step lengths without
// touching user data.
absl::StatusOr<double> OracleSigmaBound(const GradientCoefficients& coeffs,
                                        const privacy::PrivacyBudget& budget,
                                        const privacy::NoisePolicy& policy,
                                        int64_t d);

struct LearnConfig {
  privacy::PrivacyBudget budget;
  privacy::NoisePolicy policy;
  OracleConfig oracle;
  double step_scale = 1.0;
  // Oracle standard deviation used by the step rule; <= 0 selects the sum of
  // OracleSigmaBound and spec.sigma0.
  double sigma = 0.0;
  double tail_fraction = 0.5;
  uint64_t seed = 0;
};

struct LearnResult {
  Eigen::VectorXd last;
  Eigen::VectorXd average;
  GradientCoefficients coeffs;
  nlohmann::json diagnostics;
};

// One pass over the users in order: user i releases its synopsis and the
// server takes one projected step on the unit l2 ball with it. w_priv is the
// tail average. With no users the result is w1.
absl::StatusOr<LearnResult> Learn(
    const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
    const SgllSpec& spec, const LearnConfig& config, const Eigen::VectorXd& w1,
    const std::function<void(int64_t, const Eigen::VectorXd&)>& observer = {});

}  // namespace nildp::glm

#endif  // NILDP_GLM_H_
