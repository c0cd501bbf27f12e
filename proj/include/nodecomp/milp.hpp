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
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nodecomp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Finite stand-in for infinite bounds in the text format.
inline constexpr double kInfSentinel = 1e20;

inline constexpr double kFeasibilityTol = 1e-6;

enum class Sense : std::uint8_t { kGe, kLe, kEq };
enum class VarType : std::uint8_t { kBinary, kInteger, kContinuous };

inline bool is_integral_type(VarType t) { return t != VarType::kContinuous; }

struct RowEntry {
  int index = 0;
  double coef = 0.0;

  friend bool operator==(const RowEntry&, const RowEntry&) = default;
};

struct Row {
  std::vector<RowEntry> entries;
  Sense sense = Sense::kGe;
  double rhs = 0.0;

  friend bool operator==(const Row&, const Row&) = default;
};

// Minimization MILP in row form: min c^T x s.t. rows, lower <= x <= upper,
// integrality per vtypes. Maximization problems are negated by whoever
// builds them.
struct MilpInstance {
  std::string name;
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<VarType> vtypes;

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_cons() const { return rows.size(); }
  std::size_t num_nonzeros() const;
  std::size_t num_integer_vars() const;

  // Throws nodecomp::FormatError describing the first broken invariant.
  void validate() const;

  friend bool operator==(const MilpInstance&, const MilpInstance&) = default;
};

struct Solution {
  std::vector<double> values;
  double objective = 0.0;
};

double eval_objective(const MilpInstance& inst, std::span<const double> x);

// Row activities, bounds and integrality all within tol. NaN entries fail.
bool check_feasible(const MilpInstance& inst, std::span<const double> x, double tol = kFeasibilityTol);

double row_activity(const Row& row, std::span<const double> x);

void write_instance(const MilpInstance& inst, std::ostream& out);
void write_instance(const MilpInstance& inst, const std::filesystem::path& path);
MilpInstance read_instance(std::istream& in);
MilpInstance read_instance(const std::filesystem::path& path);

std::string instance_to_string(const MilpInstance& inst);
MilpInstance instance_from_string(const std::string& text);

enum class EnumerationMode : std::uint8_t {
  // Visit every point of the integer box; capped by the domain product.
  kExhaustive,
  // Depth-first over integer variables in index order with row-activity
  // bound propagation and a bound from the objective over the current box.
  kPropagate,
  // kPropagate plus an LP relaxation bound at every enumeration node.
  kLpBounded,
  // kPropagate for pure integer programs, kLpBounded otherwise.
  kAuto,
};

struct BruteForceLimits {
  EnumerationMode mode = EnumerationMode::kAuto;
  // Cap on enumeration nodes (partial assignments) visited.
  std::int64_t max_visits = 20'000'000;
  // kExhaustive cap on the product of integer domain sizes.
  double max_domain_product = 1e6;
};

// Globally optimal solution by exhaustive enumeration of the integer
// variables; continuous variables are settled by an LP at each full integer
// assignment. Returns nullopt when infeasible. Throws LimitError when the
// enumeration cap is exceeded and Error for unbounded residual LPs or
// unbounded integer domains.
std::optional<Solution> brute_force_solve(const MilpInstance& inst, const BruteForceLimits& limits = {});

}  // namespace nodecomp
