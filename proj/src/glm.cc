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

#include "nildp/glm.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nildp/status_macros.h"

namespace nildp::glm {

namespace {

// ln(1 + e^s) without overflow.
double Softplus(double s) {
  return std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s)));
}

absl::Status CheckDegree(int64_t p) {
  if (p < 0) return absl::InvalidArgumentError("degree must be >= 0");
  if (p > kMaxDegree) {
    return absl::InvalidArgumentError(absl::StrCat(
        "degree ", p, " exceeds the cap ", kMaxDegree,
        ": monomial coefficients grow like 2^p and the conversion is "
        "ill-conditioned; use a larger approximation target"));
  }
  return absl::OkStatus();
}

}  // namespace

double SgllSpec::Loss(const Eigen::VectorXd& w, const Eigen::VectorXd& x,
                      double y) const {
  const double s = r * x.dot(w);
  return -y * h1(s) + h2(s);
}

Eigen::VectorXd SgllSpec::Gradient(const Eigen::VectorXd& w,
                                   const Eigen::VectorXd& x, double y) const {
  const double s = r * x.dot(w);
  return r * (h2_prime(s) - y * h1_prime(s)) * x;
}

absl::StatusOr<SgllSpec> LogisticSpec(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    return absl::InvalidArgumentError("r must be positive");
  }
  SgllSpec spec;
  spec.name = "logistic";
  spec.r = r;
  spec.h1 = [](double s) { return 0.5 * s; };
  spec.h1_prime = [](double) { return 0.5; };
  spec.h2 = [](double s) { return 0.5 * s + Softplus(-s); };
  // 1/2 - 1/(1 + e^s)
  spec.h2_prime = [](double s) { return 0.5 * std::tanh(0.5 * s); };
  spec.mu1 = [](int64_t k, double rr) {
    return rr * std::sqrt(4.0 * static_cast<double>(k) *
                          std::pow(std::numbers::pi, 3));
  };
  spec.mu2 = [](int64_t k, double rr) {
    return rr * static_cast<double>(k) / std::numbers::e;
  };
  spec.beta = r * r / 4.0;
  return spec;
}

double MeanLoss(const SgllSpec& spec, const Eigen::VectorXd& w,
                const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd s = spec.r * (x * w);
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    total += -y(i) * spec.h1(s(i)) + spec.h2(s(i));
  }
  return total / static_cast<double>(s.size());
}

absl::StatusOr<Eigen::VectorXd> ReferenceMinimizer(const SgllSpec& spec,
                                                   const Eigen::MatrixXd& x,
                                                   const Eigen::VectorXd& y,
                                                   int64_t max_iterations) {
  if (x.rows() != y.size() || x.rows() == 0) {
    return absl::InvalidArgumentError("need matching, non-empty x and y");
  }
  if (!(spec.beta > 0.0)) {
    return absl::InvalidArgumentError("loss smoothness must be positive");
  }
  const double n = static_cast<double>(x.rows());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  Eigen::VectorXd coef(x.rows());
  for (int64_t it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd s = spec.r * (x * w);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      coef(i) = -y(i) * spec.h1_prime(s(i)) + spec.h2_prime(s(i));
    }
    Eigen::VectorXd next = w - (spec.r / (n * spec.beta)) * (x.transpose() * coef);
    const double norm = next.norm();
    if (norm > 1.0) next /= norm;
    const double moved = (next - w).norm();
    w = std::move(next);
    if (moved < 1e-12) break;
  }
  return w;
}

double Clenshaw(const Eigen::VectorXd& series, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (Eigen::Index k = series.size() - 1; k >= 1; --k) {
    const double b0 = series(k) + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  const double c0 = series.size() > 0 ? series(0) : 0.0;
  return c0 + x * b1 - b2;
}

double ChebyshevApprox::Evaluate(double x) const { return Clenshaw(series, x); }

double ChebyshevApprox::EvaluateMonomial(double x) const {
  long double acc = 0.0L;
  for (Eigen::Index k = monomial.size() - 1; k >= 0; --k) {
    acc = acc * x + monomial(k);
  }
  return static_cast<double>(acc);
}

absl::StatusOr<Eigen::VectorXd> ChebToMonomial(const Eigen::VectorXd& series) {
  const int64_t p = series.size() - 1;
  if (p < 0) return absl::InvalidArgumentError("empty series");
  RETURN_IF_ERROR(CheckDegree(p));
  // prev = T_{m-1}, cur = T_m as coefficient vectors.
  std::vector<long double> out(p + 1, 0.0L), prev(p + 1, 0.0L),
      cur(p + 1, 0.0L);
  prev[0] = 1.0L;
  out[0] += series(0);
  if (p >= 1) {
    cur[1] = 1.0L;
    out[1] += series(1);
  }
  for (int64_t m = 1; m < p; ++m) {
    std::vector<long double> next(p + 1, 0.0L);
    for (int64_t i = 0; i <= m; ++i) next[i + 1] += 2.0L * cur[i];
    for (int64_t i = 0; i <= p; ++i) next[i] -= prev[i];
    for (int64_t i = 0; i <= p; ++i) out[i] += series(m + 1) * next[i];
    prev.swap(cur);
    cur.swap(next);
  }
  Eigen::VectorXd c(p + 1);
  for (int64_t i = 0; i <= p; ++i) c(i) = static_cast<double>(out[i]);
  return c;
}

double GridSupError(const UnivariateFn& f, const ChebyshevApprox& approx,
                    int64_t points) {
  double sup = 0.0;
  for (int64_t i = 0; i < points; ++i) {
    const double x =
        points == 1 ? 0.0
                    : -1.0 + 2.0 * static_cast<double>(i) /
                                 static_cast<double>(points - 1);
    sup = std::max(sup, std::abs(f(x) - approx.Evaluate(x)));
  }
  return sup;
}

absl::StatusOr<ChebyshevApprox> ChebyshevFit(const UnivariateFn& f, int64_t p,
                                             ConstantTerm constant) {
  RETURN_IF_ERROR(CheckDegree(p));
  const int64_t n = 4 * (p + 1);
  std::vector<double> theta(n), values(n);
  for (int64_t j = 0; j < n; ++j) {
    theta[j] = std::numbers::pi * (static_cast<double>(j) + 0.5) /
               static_cast<double>(n);
    values[j] = f(std::cos(theta[j]));
    if (!std::isfinite(values[j])) {
      return absl::InvalidArgumentError(
          absl::StrCat("function is not finite at x = ", std::cos(theta[j])));
    }
  }
  ChebyshevApprox approx;
  approx.degree = p;
  approx.constant = constant;
  approx.a = Eigen::VectorXd::Zero(p + 1);
  for (int64_t k = 0; k <= p; ++k) {
    double s = 0.0;
    for (int64_t j = 0; j < n; ++j) {
      s += values[j] * std::cos(static_cast<double>(k) * theta[j]);
    }
    approx.a(k) = 2.0 * s / static_cast<double>(n);
  }
  approx.series = approx.a;
  approx.series(0) =
      constant == ConstantTerm::kHalfA0 ? 0.5 * approx.a(0) : 0.5;
  ASSIGN_OR_RETURN(approx.monomial, ChebToMonomial(approx.series));
  approx.sup_error = GridSupError(f, approx);
  return approx;
}

int64_t DegreeFor(const SgllSpec& spec, int64_t k, DegreeRule rule) {
  const double margin =
      rule == DegreeRule::kEulerMargin ? std::numbers::e : 2.0;
  return static_cast<int64_t>(
      std::ceil(static_cast<double>(k) + margin * spec.mu2(k, spec.r)));
}

absl::StatusOr<Truncation> TruncationDegree(const SgllSpec& spec, double alpha,
                                            const TruncationOptions& options) {
  if (!(alpha > 0.0)) return absl::InvalidArgumentError("alpha must be > 0");
  if (!(options.c > 0.0) || !(options.c_step > 0.0)) {
    return absl::InvalidArgumentError("c and c_step must be positive");
  }
  Truncation t;
  t.c = options.c;
  const UnivariateFn f1 = [&spec](double u) { return spec.F1(u); };
  const UnivariateFn f2 = [&spec](double u) { return spec.F2(u); };
  for (;;) {
    t.k = std::max<int64_t>(
        0, static_cast<int64_t>(std::ceil(t.c * std::log(1.0 / alpha))));
    t.p = std::max<int64_t>(1, DegreeFor(spec, t.k, options.rule));
    if (t.p > kMaxDegree) {
      return absl::OutOfRangeError(absl::StrCat(
          "degree ", t.p, " for alpha = ", alpha, " (c = ", t.c,
          ") exceeds the cap ", kMaxDegree, "; use a larger alpha"));
    }
    ASSIGN_OR_RETURN(const ChebyshevApprox a1,
                     ChebyshevFit(f1, t.p, options.constant));
    ASSIGN_OR_RETURN(const ChebyshevApprox a2,
                     ChebyshevFit(f2, t.p, options.constant));
    t.sup_error_f1 = a1.sup_error;
    t.sup_error_f2 = a2.sup_error;
    if (std::max(t.sup_error_f1, t.sup_error_f2) <= alpha) return t;
    std::clog << "glm: sup error " << std::max(t.sup_error_f1, t.sup_error_f2)
              << " at p = " << t.p << " misses alpha = " << alpha
              << "; raising c to " << t.c + options.c_step << "\n";
    t.c += options.c_step;
    ++t.escalations;
  }
}

absl::StatusOr<int64_t> OracleDegree(const SgllSpec& spec,
                                     const OracleConfig& config) {
  if (config.explicit_p > 0) {
    RETURN_IF_ERROR(CheckDegree(config.explicit_p));
    return config.explicit_p;
  }
  if (!(config.gamma > 0.0) || !(config.c > 0.0)) {
    return absl::InvalidArgumentError("gamma and c must be positive");
  }
  const int64_t k = std::max<int64_t>(
      0, static_cast<int64_t>(
             std::ceil(config.c * std::log(4.0 * spec.r / config.gamma))));
  const int64_t p =
      std::max<int64_t>(1, DegreeFor(spec, k, DegreeRule::kDoubleMargin));
  RETURN_IF_ERROR(CheckDegree(p));
  return p;
}

absl::StatusOr<GradientCoefficients> BuildCoefficients(const SgllSpec& spec,
                                                       int64_t p,
                                                       ConstantTerm constant) {
  ASSIGN_OR_RETURN(
      const ChebyshevApprox a1,
      ChebyshevFit([&spec](double u) { return spec.F1(u); }, p, constant));
  ASSIGN_OR_RETURN(
      const ChebyshevApprox a2,
      ChebyshevFit([&spec](double u) { return spec.F2(u); }, p, constant));
  GradientCoefficients g;
  g.p = p;
  g.r = spec.r;
  g.c1 = a1.monomial;
  g.c2 = a2.monomial;
  g.alpha1 = a1.sup_error;
  g.alpha2 = a2.sup_error;
  return g;
}

absl::StatusOr<SynopsisBudgets> SynopsisBudgetsFor(
    const privacy::PrivacyBudget& budget, int64_t p) {
  RETURN_IF_ERROR(privacy::ValidateBudget(budget));
  RETURN_IF_ERROR(CheckDegree(p));
  SynopsisBudgets b;
  b.direction = budget.Fraction(4.0);
  b.label = budget.Fraction(4.0 * static_cast<double>(p + 1));
  // Unused when p = 0.
  b.copy = p > 0 ? budget.Fraction(static_cast<double>(p * (p + 1)))
                 : budget;
  return b;
}

absl::StatusOr<privacy::BudgetAudit> SynopsisAudit(
    const privacy::PrivacyBudget& budget, int64_t p, bool test_mode) {
  ASSIGN_OR_RETURN(const SynopsisBudgets b, SynopsisBudgetsFor(budget, p));
  privacy::BudgetAudit audit("glm_synopsis", budget, test_mode);
  audit.Add("direction", b.direction);
  audit.Add("label_copy", b.label, p + 1);
  if (p > 0) audit.Add("data_copy", b.copy, CopyCount(p));
  return audit;
}

absl::StatusOr<ClientSynopsis> ClientCollect(
    const Eigen::VectorXd& x, double y, int64_t p,
    const privacy::PrivacyBudget& budget, const privacy::NoisePolicy& policy,
    uint64_t seed, uint64_t user) {
  ASSIGN_OR_RETURN(const SynopsisBudgets b, SynopsisBudgetsFor(budget, p));
  ClientSynopsis s;
  {
    SeededRng rng(seed, MakeStreamId(StreamPurpose::kSynopsisDirection, user));
    ASSIGN_OR_RETURN(s.z0,
                     privacy::PrivatizeVector(x, b.direction, policy, rng));
  }
  s.labels.resize(p + 1);
  for (int64_t k = 0; k <= p; ++k) {
    SeededRng rng(seed, MakeStreamId(StreamPurpose::kSynopsisLabel, user,
                                     static_cast<uint64_t>(k)));
    ASSIGN_OR_RETURN(s.labels(k),
                     privacy::PrivatizeScalar(y, b.label, policy, rng));
  }
  const int64_t count = CopyCount(p);
  s.copies.resize(count, x.size());
  for (int64_t i = 0; i < count; ++i) {
    SeededRng rng(seed, MakeStreamId(StreamPurpose::kSynopsisCopy, user,
                                     static_cast<uint64_t>(i)));
    ASSIGN_OR_RETURN(Eigen::VectorXd zi,
                     privacy::PrivatizeVector(x, b.copy, policy, rng));
    s.copies.row(i) = zi.transpose();
  }
  return s;
}

absl::StatusOr<Eigen::VectorXd> InexactGradient(
    const Eigen::VectorXd& w, const ClientSynopsis& synopsis,
    const GradientCoefficients& coeffs) {
  const int64_t p = synopsis.degree();
  if (p != coeffs.p || coeffs.c1.size() != p + 1 ||
      coeffs.c2.size() != p + 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("synopsis degree ", p, " does not match coefficient "
                     "degree ", coeffs.p));
  }
  if (w.size() != synopsis.z0.size() ||
      (synopsis.copies.rows() > 0 && synopsis.copies.cols() != w.size())) {
    return absl::InvalidArgumentError("dimension mismatch");
  }
  const Eigen::VectorXd inner = synopsis.copies * w;
  double scalar = 0.0;
  for (int64_t k = 0; k <= p; ++k) {
    double t = 1.0;
    if (k > 0) {
      const auto [lo, hi] = CopyBlock(k);
      for (int64_t i = lo; i < hi; ++i) t *= inner(i);
    }
    scalar += (coeffs.c2(k) - coeffs.c1(k) * synopsis.labels(k)) * t;
  }
  return Eigen::VectorXd(coeffs.r * scalar * synopsis.z0);
}

Eigen::VectorXd ExpectedGradient(const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& x, double y,
                                 const GradientCoefficients& coeffs) {
  const double u = x.dot(w);
  double scalar = 0.0, power = 1.0;
  for (int64_t k = 0; k <= coeffs.p; ++k) {
    scalar += (coeffs.c2(k) - coeffs.c1(k) * y) * power;
    power *= u;
  }
  return coeffs.r * scalar * x;
}

double ProductMomentBound(const Eigen::VectorXd& w, const Eigen::VectorXd& x,
                          double copy_sigma, int64_t j) {
  const double m2 = copy_sigma * copy_sigma * w.squaredNorm() +
                    x.dot(w) * x.dot(w);
  return std::pow(m2, static_cast<double>(j));
}

absl::StatusOr<double> OracleSigmaBound(const GradientCoefficients& coeffs,
                                        const privacy::PrivacyBudget& budget,
                                        const privacy::NoisePolicy& policy,
                                        int64_t d) {
  ASSIGN_OR_RETURN(const SynopsisBudgets b, SynopsisBudgetsFor(budget, coeffs.p));
  ASSIGN_OR_RETURN(const double s0, policy.Sigma(b.direction));
  ASSIGN_OR_RETURN(const double sy, policy.Sigma(b.label));
  ASSIGN_OR_RETURN(const double s1, policy.Sigma(b.copy));
  // Minkowski over the terms; each term is a product of independent factors.
  double root = 0.0;
  for (int64_t k = 0; k <= coeffs.p; ++k) {
    const double lead = std::abs(coeffs.c2(k)) + std::abs(coeffs.c1(k));
    const double coef2 = lead * lead + coeffs.c1(k) * coeffs.c1(k) * sy * sy;
    const double t2 = std::pow(1.0 + s1 * s1, static_cast<double>(k));
    root += std::sqrt(coef2 * t2);
  }
  const double z0_2 = 1.0 + static_cast<double>(d) * s0 * s0;
  return coeffs.r * root * std::sqrt(z0_2);
}

absl::StatusOr<LearnResult> Learn(
    const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SgllSpec& spec,
    const LearnConfig& config, const Eigen::VectorXd& w1,
    const std::function<void(int64_t, const Eigen::VectorXd&)>& observer) {
  if (x.rows() != y.size()) {
    return absl::InvalidArgumentError("feature and label counts differ");
  }
  if (w1.size() != x.cols()) {
    return absl::InvalidArgumentError("w1 has the wrong dimension");
  }
  if (!(config.step_scale > 0.0)) {
    return absl::InvalidArgumentError("step scale must be positive");
  }
  ASSIGN_OR_RETURN(const int64_t p, OracleDegree(spec, config.oracle));
  ASSIGN_OR_RETURN(GradientCoefficients coeffs,
                   BuildCoefficients(spec, p, config.oracle.constant));
  ASSIGN_OR_RETURN(const privacy::BudgetAudit audit,
                   SynopsisAudit(config.budget, p, config.policy.test_mode));
  double sigma = config.sigma;
  if (sigma <= 0.0) {
    ASSIGN_OR_RETURN(const double bound,
                     OracleSigmaBound(coeffs, config.budget, config.policy,
                                      x.cols()));
    sigma = bound + spec.sigma0;
  }

  absl::Status failure = absl::OkStatus();
  const int64_t n = x.rows();
  numerics::GradientOracle oracle =
      [&](const Eigen::VectorXd& w,
          int64_t step) -> std::optional<numerics::OracleSample> {
    const uint64_t user = static_cast<uint64_t>(step - 1);
    absl::StatusOr<ClientSynopsis> syn =
        ClientCollect(x.row(step - 1).transpose(), y(step - 1), p,
                      config.budget, config.policy, config.seed, user);
    if (!syn.ok()) {
      failure = syn.status();
      return std::nullopt;
    }
    absl::StatusOr<Eigen::VectorXd> g = InexactGradient(w, *syn, coeffs);
    if (!g.ok()) {
      failure = g.status();
      return std::nullopt;
    }
    return numerics::OracleSample{std::move(g).value(), user,
                                  MakeStreamId(StreamPurpose::kSynopsisDirection,
                                               user)};
  };
  numerics::InexactSgdOptions opts;
  opts.steps = n;
  opts.rule = {spec.beta, sigma, config.step_scale};
  opts.radius = 1.0;
  opts.tail_fraction = config.tail_fraction;
  opts.observer = observer;
  ASSIGN_OR_RETURN(const numerics::InexactSgdResult res,
                   numerics::InexactSgd(oracle, w1, opts));
  RETURN_IF_ERROR(failure);

  LearnResult out;
  out.last = res.last;
  out.average = res.average;
  out.diagnostics = {
      {"n", n},
      {"d", x.cols()},
      {"p", p},
      {"alpha1", coeffs.alpha1},
      {"alpha2", coeffs.alpha2},
      {"oracle_sigma", sigma},
      {"steps_taken", res.steps_taken},
      {"skipped", res.skipped},
      {"budget_audit", audit.ToJson()},
  };
  out.coeffs = std::move(coeffs);
  return out;
}

}  // namespace nildp::glm
