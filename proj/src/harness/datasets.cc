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

#include "nildp/harness/datasets.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "absl/status/status.h"
#include "nildp/rng.h"

namespace nildp::harness {

namespace {

absl::Status CheckSizes(int64_t n, int64_t d) {
  if (n < 1 || d < 1) return absl::InvalidArgumentError("need n, d >= 1");
  return absl::OkStatus();
}

Eigen::VectorXd UnitVector(int64_t d, SeededRng& rng) {
  Eigen::VectorXd u(d);
  for (int64_t k = 0; k < d; ++k) u(k) = rng.Gaussian();
  const double norm = u.norm();
  return norm > 0.0 ? Eigen::VectorXd(u / norm) : Eigen::VectorXd::Unit(d, 0);
}

// s distinct indices out of d, by a partial Fisher-Yates shuffle.
std::vector<int64_t> Support(int64_t d, int64_t s, SeededRng& rng) {
  std::vector<int64_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  for (int64_t i = 0; i < s; ++i) {
    const int64_t j =
        i + std::min<int64_t>(d - i - 1, static_cast<int64_t>(
                                             rng.Uniform() * (d - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(s);
  return idx;
}

// s-sparse vector with random signs and |v|_1 = l1.
Eigen::VectorXd SparseVector(int64_t d, int64_t s, double l1, SeededRng& rng) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  std::vector<double> mags(s);
  for (double& m : mags) m = 0.5 + rng.Uniform();
  const double total = std::accumulate(mags.begin(), mags.end(), 0.0);
  const std::vector<int64_t> support = Support(d, s, rng);
  for (int64_t i = 0; i < s; ++i) {
    const double sign = rng.Uniform() < 0.5 ? -1.0 : 1.0;
    v(support[i]) = sign * l1 * mags[i] / total;
  }
  return v;
}

SeededRng Stream(uint64_t seed, uint64_t part) {
  return SeededRng(seed, MakeStreamId(StreamPurpose::kData, part));
}

}  // namespace

absl::StatusOr<MeanDataset> GenSparseMeanData(int64_t n, int64_t d, int64_t s,
                                              double lambda, uint64_t seed) {
  if (absl::Status st = CheckSizes(n, d); !st.ok()) return st;
  if (s < 1 || s > d) return absl::InvalidArgumentError("need 1 <= s <= d");
  if (!(lambda > 0.0)) return absl::InvalidArgumentError("lambda must be > 0");
  SeededRng model = Stream(seed, 0);
  MeanDataset out;
  out.mu = SparseVector(d, s, lambda, model);
  const double spread = 1.0 - out.mu.norm();
  if (!(spread >= 0.0)) {
    return absl::InvalidArgumentError(
        "sparse mean leaves the unit ball; lower lambda or raise s");
  }
  SeededRng rng = Stream(seed, 1);
  out.x.resize(n, d);
  for (int64_t i = 0; i < n; ++i) {
    out.x.row(i) = (out.mu + spread * UnitVector(d, rng)).transpose();
  }
  return out;
}

absl::StatusOr<RegressionDataset> GenSparseLinregData(int64_t n, int64_t d,
                                                      int64_t s, double noise,
                                                      uint64_t seed) {
  if (absl::Status st = CheckSizes(n, d); !st.ok()) return st;
  if (s < 1 || s > d) return absl::InvalidArgumentError("need 1 <= s <= d");
  if (!(noise >= 0.0)) return absl::InvalidArgumentError("noise must be >= 0");
  SeededRng model = Stream(seed, 0);
  RegressionDataset out;
  out.w_star = SparseVector(d, s, 1.0, model);
  SeededRng rng = Stream(seed, 1);
  out.x.resize(n, d);
  out.y.resize(n);
  for (int64_t i = 0; i < n; ++i) {
    const double radius =
        std::pow(rng.Uniform(), 1.0 / static_cast<double>(d));
    const Eigen::VectorXd x = radius * UnitVector(d, rng);
    out.x.row(i) = x.transpose();
    out.y(i) = std::clamp(x.dot(out.w_star) + noise * rng.Gaussian(), -1.0, 1.0);
  }
  return out;
}

absl::StatusOr<LabelledDataset> GenLogisticData(int64_t n, int64_t d, double r,
                                                double margin, uint64_t w_seed,
                                                uint64_t seed) {
  if (absl::Status st = CheckSizes(n, d); !st.ok()) return st;
  if (!(r > 0.0)) return absl::InvalidArgumentError("r must be > 0");
  SeededRng model = Stream(w_seed, 0);
  LabelledDataset out;
  out.w_star = UnitVector(d, model);
  SeededRng rng = Stream(seed, 1);
  out.x.resize(n, d);
  out.y.resize(n);
  for (int64_t i = 0; i < n; ++i) {
    const Eigen::VectorXd x = UnitVector(d, rng);
    out.x.row(i) = x.transpose();
    const double score = r * x.dot(out.w_star) + margin;
    out.y(i) = rng.Uniform() < 1.0 / (1.0 + std::exp(-score)) ? 1.0 : -1.0;
  }
  return out;
}

absl::StatusOr<RegressionDataset> GenKernelData(int64_t n, int64_t d,
                                                double noise, uint64_t seed) {
  if (absl::Status st = CheckSizes(n, d); !st.ok()) return st;
  SeededRng rng = Stream(seed, 1);
  RegressionDataset out;
  out.x.resize(n, d);
  out.y.resize(n);
  for (int64_t i = 0; i < n; ++i) {
    const double radius =
        std::pow(rng.Uniform(), 1.0 / static_cast<double>(d));
    const Eigen::VectorXd x = radius * UnitVector(d, rng);
    out.x.row(i) = x.transpose();
    const double x2 = d > 1 ? x(1) : 0.0;
    const double f = 0.5 * std::sin(std::numbers::pi * x(0)) * std::cos(x2);
    out.y(i) = std::clamp(f + noise * rng.Gaussian(), -1.0, 1.0);
  }
  return out;
}

}  // namespace nildp::harness
