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

// Gaussian local-privacy mechanism for vectors and scalars, together with
// (epsilon, delta) budget arithmetic and a per-user budget ledger.

#ifndef NILDP_PRIVACY_H_
#define NILDP_PRIVACY_H_

#include <span>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nildp/rng.h"
#include "json.hpp"

namespace nildp::privacy {

// Tolerance used when comparing a composed budget against a declared one.
inline constexpr double kBudgetTolerance = 1e-12;

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;

  // Requires epsilon > 0 and 0 < delta < 1.
  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);

  // The budget divided evenly into `parts` shares.
  PrivacyBudget Fraction(double parts) const {
    return {epsilon / parts, delta / parts};
  }
};

absl::Status ValidateBudget(const PrivacyBudget& budget);

// Basic composition: coordinate-wise sum of all budgets.
absl::StatusOr<PrivacyBudget> Compose(std::span<const PrivacyBudget> budgets);

// L2 sensitivity assumed by the Gaussian mechanism on the unit ball.
//
// kDiameter (2) is the worst case between two points of the unit ball and is
// the default. kUnit (1) reproduces the published constant of the basic
// private vector mechanism ("paper-exact" mode).
enum class Sensitivity { kUnit = 1, kDiameter = 2 };

// sensitivity * sqrt(2 ln(1.25/delta)) / epsilon.
absl::StatusOr<double> NoiseSigma(const PrivacyBudget& budget,
                                  double sensitivity);

struct NoisePolicy {
  Sensitivity sensitivity = Sensitivity::kDiameter;
  // Forces sigma to 0. Pipelines run in this mode never claim privacy; their
  // audits are marked accordingly.
  bool test_mode = false;

  static NoisePolicy PaperExact() { return {Sensitivity::kUnit, false}; }
  static NoisePolicy TestMode() { return {Sensitivity::kDiameter, true}; }

  double sensitivity_value() const {
    return static_cast<double>(static_cast<int>(sensitivity));
  }
  // Noise scale actually applied for `budget` under this policy.
  absl::StatusOr<double> Sigma(const PrivacyBudget& budget) const;
};

// Rescales x onto the unit sphere when ||x||_2 > 1. Returns true if it did.
bool ClipToUnitBall(Eigen::Ref<Eigen::VectorXd> x);

// Basic private vector mechanism: clip to the unit ball, then add
// N(0, sigma^2 I) drawn from `rng`. `clipped` (optional) reports whether the
// input was rescaled.
absl::StatusOr<Eigen::VectorXd> PrivatizeVector(const Eigen::VectorXd& x,
                                                const PrivacyBudget& budget,
                                                const NoisePolicy& policy,
                                                SeededRng& rng,
                                                bool* clipped = nullptr);

// Scalar version: y is clipped to [-1, 1] before noising.
absl::StatusOr<double> PrivatizeScalar(double y, const PrivacyBudget& budget,
                                       const NoisePolicy& policy,
                                       SeededRng& rng);

// Per-user budget ledger of one end-to-end mechanism. Each entry records the
// budget of a single invocation and how many times it is invoked.
class BudgetAudit {
 public:
  struct Entry {
    std::string label;
    PrivacyBudget budget;
    int64_t copies = 1;
  };

  BudgetAudit(std::string mechanism, PrivacyBudget declared, bool test_mode)
      : mechanism_(std::move(mechanism)),
        declared_(declared),
        test_mode_(test_mode) {}

  void Add(std::string label, PrivacyBudget budget, int64_t copies = 1);

  const std::string& mechanism() const { return mechanism_; }
  const PrivacyBudget& declared() const { return declared_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool test_mode() const { return test_mode_; }
  int64_t total_copies() const;

  // Sum over every individual invocation (copies are expanded, not
  // multiplied) via Compose.
  absl::StatusOr<PrivacyBudget> Total() const;

  // OK iff the total does not exceed the declared budget by more than
  // kBudgetTolerance in either coordinate.
  absl::Status CheckWithinDeclared() const;
  // OK iff the total equals the declared budget within kBudgetTolerance.
  absl::Status CheckExact() const;

  nlohmann::json ToJson() const;

 private:
  std::string mechanism_;
  PrivacyBudget declared_;
  bool test_mode_;
  std::vector<Entry> entries_;
};

}  // namespace nildp::privacy

#endif  // NILDP_PRIVACY_H_
