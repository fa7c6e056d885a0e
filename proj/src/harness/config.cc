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

#include "nildp/harness/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <type_traits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "nildp/status_macros.h"

namespace nildp::harness {

namespace {

using nlohmann::json;

// Reads the keys of one JSON object and remembers which were consumed, so
// that whatever is left over can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  absl::Status Check() const {
    if (!j_.is_object()) {
      return absl::InvalidArgumentError(absl::StrCat(path_, ": expected an object"));
    }
    return absl::OkStatus();
  }

  bool Has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  absl::Status Get(const std::string& key, T* out, bool required = false) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (required) {
        return absl::InvalidArgumentError(
            absl::StrCat(Name(key), ": required key is missing"));
      }
      return absl::OkStatus();
    }
    return Convert(j_.at(key), Name(key), out);
  }

  const json& Sub(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  absl::Status Finish() const {
    std::vector<std::string> unknown;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) unknown.push_back(Name(key));
    }
    if (!unknown.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key(s): ", absl::StrJoin(unknown, ", ")));
    }
    return absl::OkStatus();
  }

 private:
  std::string Name(const std::string& key) const {
    return path_.empty() ? key : absl::StrCat(path_, ".", key);
  }

  static absl::Status Convert(const json& v, const std::string& name,
                              int64_t* out) {
    if (!v.is_number_integer()) {
      return absl::InvalidArgumentError(absl::StrCat(name, ": expected an integer"));
    }
    *out = v.get<int64_t>();
    return absl::OkStatus();
  }
  static absl::Status Convert(const json& v, const std::string& name,
                              uint64_t* out) {
    if (!v.is_number_unsigned() &&
        !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
      return absl::InvalidArgumentError(
          absl::StrCat(name, ": expected a non-negative integer"));
    }
    *out = v.get<uint64_t>();
    return absl::OkStatus();
  }
  static absl::Status Convert(const json& v, const std::string& name,
                              double* out) {
    if (!v.is_number()) {
      return absl::InvalidArgumentError(absl::StrCat(name, ": expected a number"));
    }
    *out = v.get<double>();
    return absl::OkStatus();
  }
  static absl::Status Convert(const json& v, const std::string& name,
                              bool* out) {
    if (!v.is_boolean()) {
      return absl::InvalidArgumentError(absl::StrCat(name, ": expected true or false"));
    }
    *out = v.get<bool>();
    return absl::OkStatus();
  }
  static absl::Status Convert(const json& v, const std::string& name,
                              std::string* out) {
    if (!v.is_string()) {
      return absl::InvalidArgumentError(absl::StrCat(name, ": expected a string"));
    }
    *out = v.get<std::string>();
    return absl::OkStatus();
  }
  template <typename T>
  static absl::Status Convert(const json& v, const std::string& name,
                              std::vector<T>* out) {
    if (!v.is_array()) {
      return absl::InvalidArgumentError(absl::StrCat(name, ": expected a list"));
    }
    out->clear();
    for (size_t i = 0; i < v.size(); ++i) {
      T item{};
      RETURN_IF_ERROR(Convert(v[i], absl::StrCat(name, "[", i, "]"), &item));
      out->push_back(item);
    }
    return absl::OkStatus();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

absl::Status Invalid(const std::string& what) {
  return absl::InvalidArgumentError(what);
}

absl::Status ParseBlock(const json& j, const std::string& name,
                        ExperimentConfig& c) {
  ObjectReader r(j, name);
  RETURN_IF_ERROR(r.Check());
  switch (c.task) {
    case Task::kMean:
      RETURN_IF_ERROR(r.Get("s", &c.mean.s));
      RETURN_IF_ERROR(r.Get("lambda", &c.mean.lambda));
      RETURN_IF_ERROR(r.Get("residual_constant", &c.mean.residual_constant));
      break;
    case Task::kLinreg:
      RETURN_IF_ERROR(r.Get("s", &c.linreg.s));
      RETURN_IF_ERROR(r.Get("noise", &c.linreg.noise));
      RETURN_IF_ERROR(r.Get("m", &c.linreg.m));
      RETURN_IF_ERROR(r.Get("m_coefficient", &c.linreg.m_coefficient));
      RETURN_IF_ERROR(r.Get("max_iterations", &c.linreg.max_iterations));
      break;
    case Task::kKrr:
      RETURN_IF_ERROR(r.Get("kernel", &c.krr.kernel));
      RETURN_IF_ERROR(r.Get("lengthscale", &c.krr.lengthscale));
      RETURN_IF_ERROR(r.Get("scale", &c.krr.scale));
      RETURN_IF_ERROR(r.Get("c", &c.krr.c));
      RETURN_IF_ERROR(r.Get("d_p", &c.krr.d_p));
      RETURN_IF_ERROR(r.Get("noise", &c.krr.noise));
      RETURN_IF_ERROR(r.Get("test_points", &c.krr.test_points));
      RETURN_IF_ERROR(r.Get("paper_exact_radius", &c.krr.paper_exact_radius));
      break;
    case Task::kGlmLogistic:
      RETURN_IF_ERROR(r.Get("r", &c.glm.r));
      RETURN_IF_ERROR(r.Get("p", &c.glm.p));
      RETURN_IF_ERROR(r.Get("gamma", &c.glm.gamma));
      RETURN_IF_ERROR(r.Get("c", &c.glm.c));
      RETURN_IF_ERROR(r.Get("margin", &c.glm.margin));
      RETURN_IF_ERROR(r.Get("held_out", &c.glm.held_out));
      RETURN_IF_ERROR(r.Get("step_scale", &c.glm.step_scale));
      RETURN_IF_ERROR(r.Get("tail_fraction", &c.glm.tail_fraction));
      break;
  }
  return r.Finish();
}

std::string BlockName(Task task) {
  switch (task) {
    case Task::kMean: return "mean";
    case Task::kLinreg: return "linreg";
    case Task::kKrr: return "krr";
    case Task::kGlmLogistic: return "glm";
  }
  return "";
}

absl::Status Validate(const ExperimentConfig& c) {
  if (c.n.empty()) return Invalid("n: grid is empty");
  if (c.epsilon.empty()) return Invalid("epsilon: grid is empty");
  for (int64_t n : c.n) {
    if (n < 1) return Invalid("n: entries must be >= 1");
  }
  for (double e : c.epsilon) {
    if (!(e > 0.0) || !std::isfinite(e)) return Invalid("epsilon: entries must be > 0");
  }
  if (c.d < 1) return Invalid("d: must be >= 1");
  if (!(c.delta > 0.0 && c.delta < 1.0)) return Invalid("delta: must be in (0, 1)");
  if (c.replications < 1) return Invalid("replications: must be >= 1");
  if (c.threads < 0) return Invalid("threads: must be >= 0");
  switch (c.task) {
    case Task::kMean:
      if (c.mean.s < 1 || c.mean.s > c.d) return Invalid("mean.s: need 1 <= s <= d");
      if (!(c.mean.lambda > 0.0)) return Invalid("mean.lambda: must be > 0");
      break;
    case Task::kLinreg:
      if (c.linreg.s < 1 || c.linreg.s > c.d) return Invalid("linreg.s: need 1 <= s <= d");
      if (c.linreg.m < 0) return Invalid("linreg.m: must be >= 0");
      if (c.linreg.max_iterations < 1) return Invalid("linreg.max_iterations: must be >= 1");
      break;
    case Task::kKrr:
      if (c.krr.kernel != "gaussian" && c.krr.kernel != "laplacian") {
        return Invalid("krr.kernel: expected gaussian or laplacian");
      }
      if (c.krr.d_p.empty()) return Invalid("krr.d_p: grid is empty");
      for (int64_t v : c.krr.d_p) {
        if (v < 0) return Invalid("krr.d_p: entries must be >= 0");
      }
      if (c.krr.test_points < 1) return Invalid("krr.test_points: must be >= 1");
      break;
    case Task::kGlmLogistic:
      if (c.glm.p.empty()) return Invalid("glm.p: grid is empty");
      for (int64_t v : c.glm.p) {
        if (v < 0) return Invalid("glm.p: entries must be >= 0");
      }
      if (c.glm.held_out < 1) return Invalid("glm.held_out: must be >= 1");
      break;
  }
  return absl::OkStatus();
}

std::string Num(double v) { return absl::StrFormat("%.17g", v); }

}  // namespace

absl::StatusOr<Task> ParseTask(const std::string& name) {
  if (name == "mean") return Task::kMean;
  if (name == "linreg") return Task::kLinreg;
  if (name == "krr") return Task::kKrr;
  if (name == "glm-logistic") return Task::kGlmLogistic;
  return absl::InvalidArgumentError(absl::StrCat("task: unknown task '", name, "'"));
}

std::string TaskName(Task task) {
  switch (task) {
    case Task::kMean: return "mean";
    case Task::kLinreg: return "linreg";
    case Task::kKrr: return "krr";
    case Task::kGlmLogistic: return "glm-logistic";
  }
  return "";
}

absl::StatusOr<ExperimentConfig> ParseConfig(const json& j) {
  ObjectReader r(j, "");
  RETURN_IF_ERROR(r.Check());
  ExperimentConfig c;
  std::string task;
  RETURN_IF_ERROR(r.Get("task", &task, true));
  ASSIGN_OR_RETURN(c.task, ParseTask(task));
  RETURN_IF_ERROR(r.Get("n", &c.n, true));
  RETURN_IF_ERROR(r.Get("d", &c.d, true));
  RETURN_IF_ERROR(r.Get("epsilon", &c.epsilon, true));
  RETURN_IF_ERROR(r.Get("delta", &c.delta));
  RETURN_IF_ERROR(r.Get("replications", &c.replications));
  RETURN_IF_ERROR(r.Get("seed", &c.seed));
  RETURN_IF_ERROR(r.Get("output", &c.output));
  RETURN_IF_ERROR(r.Get("paper_exact", &c.paper_exact));
  RETURN_IF_ERROR(r.Get("test_mode", &c.test_mode));
  RETURN_IF_ERROR(r.Get("threads", &c.threads));
  const std::string block = BlockName(c.task);
  if (r.Has(block)) RETURN_IF_ERROR(ParseBlock(r.Sub(block), block, c));
  RETURN_IF_ERROR(r.Finish());
  RETURN_IF_ERROR(Validate(c));
  return c;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::InvalidArgumentError(absl::StrCat("cannot read ", path));
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false,
                       /*ignore_comments=*/true);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": malformed JSON"));
  }
  return ParseConfig(j);
}

json ToJson(const ExperimentConfig& c) {
  json j = {{"task", TaskName(c.task)},
            {"n", c.n},
            {"d", c.d},
            {"epsilon", c.epsilon},
            {"delta", c.delta},
            {"replications", c.replications},
            {"seed", c.seed},
            {"output", c.output},
            {"paper_exact", c.paper_exact},
            {"test_mode", c.test_mode},
            {"threads", c.threads}};
  switch (c.task) {
    case Task::kMean:
      j["mean"] = {{"s", c.mean.s},
                   {"lambda", c.mean.lambda},
                   {"residual_constant", c.mean.residual_constant}};
      break;
    case Task::kLinreg:
      j["linreg"] = {{"s", c.linreg.s},
                     {"noise", c.linreg.noise},
                     {"m", c.linreg.m},
                     {"m_coefficient", c.linreg.m_coefficient},
                     {"max_iterations", c.linreg.max_iterations}};
      break;
    case Task::kKrr:
      j["krr"] = {{"kernel", c.krr.kernel},
                  {"lengthscale", c.krr.lengthscale},
                  {"scale", c.krr.scale},
                  {"c", c.krr.c},
                  {"d_p", c.krr.d_p},
                  {"noise", c.krr.noise},
                  {"test_points", c.krr.test_points},
                  {"paper_exact_radius", c.krr.paper_exact_radius}};
      break;
    case Task::kGlmLogistic:
      j["glm"] = {{"r", c.glm.r},
                  {"p", c.glm.p},
                  {"gamma", c.glm.gamma},
                  {"c", c.glm.c},
                  {"margin", c.glm.margin},
                  {"held_out", c.glm.held_out},
                  {"step_scale", c.glm.step_scale},
                  {"tail_fraction", c.glm.tail_fraction}};
      break;
  }
  return j;
}

std::vector<Cell> ExpandGrid(const ExperimentConfig& c) {
  std::string param;
  std::vector<int64_t> axis = {0};
  if (c.task == Task::kKrr) {
    param = "d_p";
    axis = c.krr.d_p;
  } else if (c.task == Task::kGlmLogistic) {
    param = "p";
    axis = c.glm.p;
  }
  std::vector<Cell> cells;
  for (int64_t n : c.n) {
    for (double eps : c.epsilon) {
      for (int64_t v : axis) {
        Cell cell{n, eps, param, param.empty() ? 0 : v, ""};
        cell.key = absl::StrCat(TaskName(c.task), "/n=", n, "/d=", c.d,
                                "/eps=", Num(eps));
        if (!param.empty()) absl::StrAppend(&cell.key, "/", param, "=", v);
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

}  // namespace nildp::harness
