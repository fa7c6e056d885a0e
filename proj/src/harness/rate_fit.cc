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

#include "nildp/harness/rate_fit.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace nildp::harness {

double Median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

absl::StatusOr<LogLogFit> FitLogLog(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    return absl::InvalidArgumentError("need at least two (x, y) points");
  }
  const size_t k = x.size();
  std::vector<double> lx(k), ly(k);
  for (size_t i = 0; i < k; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      return absl::InvalidArgumentError("log-log fit needs positive values");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < k; ++i) mx += lx[i] / k, my += ly[i] / k;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) return absl::InvalidArgumentError("x values are all equal");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (k > 2) {
    double rss = 0.0;
    for (size_t i = 0; i < k; ++i) {
      const double e = ly[i] - fit.intercept - fit.slope * lx[i];
      rss += e * e;
    }
    fit.slope_stderr = std::sqrt(rss / (k - 2) / sxx);
  }
  return fit;
}

absl::StatusOr<std::vector<RateSeries>> FitRates(
    const std::vector<ResultRecord>& records, RateAxis axis) {
  // group -> axis value -> values
  std::map<std::string, std::map<double, std::vector<double>>> groups;
  for (const ResultRecord& r : records) {
    if (r.status != "ok") continue;
    std::string group = absl::StrCat(r.task, "/d=", r.d, "/eps=",
                                     absl::StrFormat("%.17g", r.epsilon));
    double at = static_cast<double>(r.n);
    if (axis == RateAxis::kN) {
      if (!r.param.empty()) absl::StrAppend(&group, "/", r.param, "=", r.param_value);
    } else {
      if (r.param.empty()) {
        return absl::InvalidArgumentError("records have no task axis to fit over");
      }
      absl::StrAppend(&group, "/n=", r.n);
      at = static_cast<double>(r.param_value);
    }
    groups[group][at].push_back(r.value);
  }
  std::vector<RateSeries> out;
  for (auto& [group, points] : groups) {
    RateSeries s;
    s.group = group;
    for (auto& [at, values] : points) {
      s.x.push_back(at);
      s.counts.push_back(static_cast<int64_t>(values.size()));
      s.medians.push_back(Median(values));
    }
    s.strictly_decreasing = s.medians.size() >= 2;
    for (size_t i = 1; i < s.medians.size(); ++i) {
      if (!(s.medians[i] < s.medians[i - 1])) s.strictly_decreasing = false;
    }
    absl::StatusOr<LogLogFit> fit = FitLogLog(s.x, s.medians);
    if (fit.ok()) {
      s.fit = *fit;
      s.fitted = true;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace nildp::harness
