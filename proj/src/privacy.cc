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

#include "nildp/privacy.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "nildp/status_macros.h"

namespace nildp::privacy {

absl::Status ValidateBudget(const PrivacyBudget& budget) {
  if (!(budget.epsilon > 0.0) || !std::isfinite(budget.epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ",
                     budget.epsilon));
  }
  if (!(budget.delta > 0.0 && budget.delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", budget.delta));
  }
  return absl::OkStatus();
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  PrivacyBudget budget{epsilon, delta};
  RETURN_IF_ERROR(ValidateBudget(budget));
  return budget;
}

absl::StatusOr<PrivacyBudget> Compose(std::span<const PrivacyBudget> budgets) {
  if (budgets.empty()) {
    return absl::InvalidArgumentError("cannot compose an empty budget list");
  }
  PrivacyBudget total{0.0, 0.0};
  for (const PrivacyBudget& b : budgets) {
    total.epsilon += b.epsilon;
    total.delta += b.delta;
  }
  return total;
}

absl::StatusOr<double> NoiseSigma(const PrivacyBudget& budget,
                                  double sensitivity) {
  RETURN_IF_ERROR(ValidateBudget(budget));
  if (sensitivity != 1.0 && sensitivity != 2.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be 1 or 2, got ", sensitivity));
  }
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / budget.delta)) /
         budget.epsilon;
}

absl::StatusOr<double> NoisePolicy::Sigma(const PrivacyBudget& budget) const {
  ASSIGN_OR_RETURN(double sigma, NoiseSigma(budget, sensitivity_value()));
  return test_mode ? 0.0 : sigma;
}

bool ClipToUnitBall(Eigen::Ref<Eigen::VectorXd> x) {
  const double norm = x.norm();
  if (norm > 1.0) {
    x /= norm;
    return true;
  }
  return false;
}

absl::StatusOr<Eigen::VectorXd> PrivatizeVector(const Eigen::VectorXd& x,
                                                const PrivacyBudget& budget,
                                                const NoisePolicy& policy,
                                                SeededRng& rng,
                                                bool* clipped) {
  if (!x.allFinite()) {
    return absl::InvalidArgumentError("input vector has non-finite entries");
  }
  ASSIGN_OR_RETURN(const double sigma, policy.Sigma(budget));
  Eigen::VectorXd z = x;
  const bool was_clipped = ClipToUnitBall(z);
  if (clipped != nullptr) *clipped = was_clipped;
  if (sigma > 0.0) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] += sigma * rng.Gaussian();
  }
  return z;
}

absl::StatusOr<double> PrivatizeScalar(double y, const PrivacyBudget& budget,
                                       const NoisePolicy& policy,
                                       SeededRng& rng) {
  if (!std::isfinite(y)) {
    return absl::InvalidArgumentError("input scalar is not finite");
  }
  ASSIGN_OR_RETURN(const double sigma, policy.Sigma(budget));
  const double clipped = std::clamp(y, -1.0, 1.0);
  return sigma > 0.0 ? clipped + sigma * rng.Gaussian() : clipped;
}

void BudgetAudit::Add(std::string label, PrivacyBudget budget, int64_t copies) {
  entries_.push_back({std::move(label), budget, copies});
}

int64_t BudgetAudit::total_copies() const {
  int64_t total = 0;
  for (const Entry& e : entries_) total += e.copies;
  return total;
}

absl::StatusOr<PrivacyBudget> BudgetAudit::Total() const {
  std::vector<PrivacyBudget> expanded;
  expanded.reserve(static_cast<size_t>(total_copies()));
  for (const Entry& e : entries_) {
    for (int64_t c = 0; c < e.copies; ++c) expanded.push_back(e.budget);
  }
  return Compose(expanded);
}

absl::Status BudgetAudit::CheckWithinDeclared() const {
  ASSIGN_OR_RETURN(const PrivacyBudget total, Total());
  if (total.epsilon > declared_.epsilon + kBudgetTolerance ||
      total.delta > declared_.delta + kBudgetTolerance) {
    return absl::FailedPreconditionError(absl::StrCat(
        mechanism_, ": composed budget (", total.epsilon, ", ", total.delta,
        ") exceeds declared (", declared_.epsilon, ", ", declared_.delta,
        ")"));
  }
  return absl::OkStatus();
}

absl::Status BudgetAudit::CheckExact() const {
  ASSIGN_OR_RETURN(const PrivacyBudget total, Total());
  if (std::abs(total.epsilon - declared_.epsilon) > kBudgetTolerance ||
      std::abs(total.delta - declared_.delta) > kBudgetTolerance) {
    return absl::FailedPreconditionError(absl::StrCat(
        mechanism_, ": composed budget (", total.epsilon, ", ", total.delta,
        ") differs from declared (", declared_.epsilon, ", ",
        declared_.delta, ")"));
  }
  return absl::OkStatus();
}

nlohmann::json BudgetAudit::ToJson() const {
  nlohmann::json out;
  out["mechanism"] = mechanism_;
  out["declared"] = {{"epsilon", declared_.epsilon},
                     {"delta", declared_.delta}};
  nlohmann::json entries = nlohmann::json::array();
  for (const Entry& e : entries_) {
    entries.push_back({{"label", e.label},
                       {"epsilon", e.budget.epsilon},
                       {"delta", e.budget.delta},
                       {"copies", e.copies}});
  }
  out["entries"] = std::move(entries);
  out["copies"] = total_copies();
  absl::StatusOr<PrivacyBudget> total = Total();
  if (total.ok()) {
    out["total"] = {{"epsilon", total->epsilon}, {"delta", total->delta}};
  }
  out["within_declared"] = CheckWithinDeclared().ok();
  out["exact"] = CheckExact().ok();
  out["privacy_claimed"] = !test_mode_;
  return out;
}

}  // namespace nildp::privacy
