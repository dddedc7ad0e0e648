// Copyright 2026 The LDP Interact Authors
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

#ifndef LDP_INTERACT_SRC_STATUS_MACROS_H_
#define LDP_INTERACT_SRC_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define LDPI_STATUS_CONCAT_INNER(a, b) a##b
#define LDPI_STATUS_CONCAT(a, b) LDPI_STATUS_CONCAT_INNER(a, b)

#define LDPI_RETURN_IF_ERROR(expr)          \
  do {                                      \
    ::absl::Status _ldpi_status = (expr);   \
    if (!_ldpi_status.ok()) return _ldpi_status; \
  } while (0)

#define LDPI_ASSIGN_OR_RETURN(lhs, expr) \
  LDPI_ASSIGN_OR_RETURN_IMPL(LDPI_STATUS_CONCAT(_ldpi_or_, __LINE__), lhs, expr)

#define LDPI_ASSIGN_OR_RETURN_IMPL(tmp, lhs, expr) \
  auto tmp = (expr);                               \
  if (!tmp.ok()) return tmp.status();              \
  lhs = *std::move(tmp)

#endif  // LDP_INTERACT_SRC_STATUS_MACROS_H_
