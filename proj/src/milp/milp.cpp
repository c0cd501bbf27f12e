// Copyright 2026 The nodecomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <string>
#include <unordered_set>

#include "nodecomp/errors.hpp"
#include "nodecomp/milp.hpp"

namespace nodecomp {

std::size_t MilpInstance::num_nonzeros() const {
  std::size_t nnz = 0;
  for (const Row& r : rows) nnz += r.entries.size();
  return nnz;
}

std::size_t MilpInstance::num_integer_vars() const {
  std::size_t k = 0;
  for (VarType t : vtypes) k += is_integral_type(t) ? 1 : 0;
  return k;
}

void MilpInstance::validate() const {
  const std::size_t n = num_vars();
  if (lower.size() != n || upper.size() != n || vtypes.size() != n) {
    throw FormatError("per-variable arrays disagree with objective length");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(objective[j]) || std::isinf(objective[j])) {
      throw FormatError("non-finite objective coefficient for variable " + std::to_string(j));
    }
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j]) {
      throw FormatError("invalid bounds for variable " + std::to_string(j));
    }
    if (vtypes[j] == VarType::kBinary && (lower[j] < 0.0 || upper[j] > 1.0)) {
      throw FormatError("binary variable " + std::to_string(j) + " has bounds outside [0,1]");
    }
  }
  std::vector<int> seen_in(n, -1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    if (!std::isfinite(row.rhs)) throw FormatError("non-finite rhs in row " + std::to_string(i));
    for (const RowEntry& e : row.entries) {
      if (e.index < 0 || static_cast<std::size_t>(e.index) >= n) {
        throw FormatError("row " + std::to_string(i) + " references variable out of range");
      }
      if (e.coef == 0.0 || !std::isfinite(e.coef)) {
        throw FormatError("row " + std::to_string(i) + " stores a zero or non-finite coefficient");
      }
      if (seen_in[e.index] == static_cast<int>(i)) {
        throw FormatError("row " + std::to_string(i) + " has duplicate index " + std::to_string(e.index));
      }
      seen_in[e.index] = static_cast<int>(i);
    }
  }
}

double eval_objective(const MilpInstance& inst, std::span<const double> x) {
  if (x.size() != inst.num_vars()) {
    throw DimensionError("solution has " + std::to_string(x.size()) + " entries, instance has " +
                         std::to_string(inst.num_vars()) + " variables");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += inst.objective[j] * x[j];
  return s;
}

double row_activity(const Row& row, std::span<const double> x) {
  double a = 0.0;
  for (const RowEntry& e : row.entries) a += e.coef * x[e.index];
  return a;
}

bool check_feasible(const MilpInstance& inst, std::span<const double> x, double tol) {
  if (x.size() != inst.num_vars()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double v = x[j];
    if (std::isnan(v)) return false;
    if (v < inst.lower[j] - tol || v > inst.upper[j] + tol) return false;
    if (is_integral_type(inst.vtypes[j]) && std::abs(v - std::round(v)) > tol) return false;
  }
  for (const Row& row : inst.rows) {
    const double a = row_activity(row, x);
    switch (row.sense) {
      case Sense::kGe:
        if (a < row.rhs - tol) return false;
        break;
      case Sense::kLe:
        if (a > row.rhs + tol) return false;
        break;
      case Sense::kEq:
        if (std::abs(a - row.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

}  // namespace nodecomp
