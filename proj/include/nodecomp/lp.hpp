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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "nodecomp/milp.hpp"

namespace nodecomp {

enum class LpStatus : std::uint8_t { kOptimal, kInfeasible, kUnbounded };

const char* to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;  // structural values, only when optimal
  double objective = 0.0;
  std::int64_t iterations = 0;
};

struct BoundOverride {
  int var = 0;
  double lb = -kInf;
  double ub = kInf;

  friend bool operator==(const BoundOverride&, const BoundOverride&) = default;
};

// Sparse per-variable bound overrides, kept sorted by variable index. Each
// override is intersected with any earlier one for the same variable, so
// overrides only ever tighten.
class LocalBounds {
 public:
  void tighten(int var, double lb, double ub);

  const BoundOverride* find(int var) const;
  std::span<const BoundOverride> overrides() const { return overrides_; }
  std::size_t size() const { return overrides_.size(); }

  // Effective bounds: the instance's global bounds intersected with the
  // overrides. May produce lb > ub for an empty box.
  void effective(const MilpInstance& inst, std::vector<double>& lower, std::vector<double>& upper) const;

  // True when every override admits x within tol.
  bool admits(std::span<const double> x, double tol) const;

  friend bool operator==(const LocalBounds&, const LocalBounds&) = default;

 private:
  std::vector<BoundOverride> overrides_;
};

struct LpOptions {
  int verbosity = 0;
  std::ostream* log = nullptr;  // defaults to std::clog when verbosity > 0
  std::int64_t max_iterations = 0;  // 0 picks a size-dependent cap
  int refactor_interval = 50;
  int degenerate_threshold = 25;  // consecutive degenerate pivots before Bland
};

inline constexpr double kLpFeasTol = 1e-7;
inline constexpr double kLpDualTol = 1e-9;

// Two-phase bounded-variable primal revised simplex on a dense basis
// inverse. Throws NumericalError when the basis becomes singular or the
// iteration cap is hit.
LpResult solve_lp(const MilpInstance& inst, const LocalBounds& bounds, const LpOptions& opts = {});

// Same solver with explicit per-variable bounds replacing the instance's.
LpResult solve_lp_box(const MilpInstance& inst, std::span<const double> lower, std::span<const double> upper,
                      const LpOptions& opts = {});

// The node dual bound. Throws Error unless the result is optimal.
double lp_lower_bound(const LpResult& result);

}  // namespace nodecomp
