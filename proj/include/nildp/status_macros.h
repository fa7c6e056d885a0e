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

#ifndef NILDP_STATUS_MACROS_H_
#define NILDP_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define NILDP_CONCAT_INNER_(a, b) a##b
#define NILDP_CONCAT_(a, b) NILDP_CONCAT_INNER_(a, b)

#define RETURN_IF_ERROR(expr)                  \
  do {                                         \
    const absl::Status _nildp_status = (expr); \
    if (!_nildp_status.ok()) {                 \
      return _nildp_status;                    \
    }                                          \
  } while (0)

#define NILDP_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                \
  if (!statusor.ok()) {                                   \
    return statusor.status();                             \
  }                                                       \
  lhs = std::move(statusor).value()

// ASSIGN_OR_RETURN(lhs, expr) evaluates an absl::StatusOr expression and
// either assigns its value to `lhs` or returns the error status.
#define ASSIGN_OR_RETURN(lhs, rexpr) \
  NILDP_ASSIGN_OR_RETURN_IMPL_(      \
      NILDP_CONCAT_(_nildp_statusor_, __LINE__), lhs, rexpr)

#endif  // NILDP_STATUS_MACROS_H_
