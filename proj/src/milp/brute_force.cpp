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

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "nodecomp/errors.hpp"
#include "nodecomp/lp.hpp"
#include "nodecomp/milp.hpp"

namespace nodecomp {

namespace {

constexpr double kPruneTol = 1e-9;

class Enumerator {
 public:
  Enumerator(const MilpInstance& inst, const BruteForceLimits& limits) : inst_(inst), limits_(limits) {
    for (std::size_t j = 0; j < inst.num_vars(); ++j) {
      if (is_integral_type(inst.vtypes[j])) {
        if (!std::isfinite(inst.lower[j]) || !std::isfinite(inst.upper[j])) {
          throw Error("enumeration needs finite bounds on integer variable " + std::to_string(j));
        }
        ints_.push_back(static_cast<int>(j));
      } else {
        has_continuous_ = true;
      }
    }
    mode_ = limits.mode;
    if (mode_ == EnumerationMode::kAuto) {
      mode_ = has_continuous_ ? EnumerationMode::kLpBounded : EnumerationMode::kPropagate;
    }
    rows_of_.resize(inst.num_vars());
    for (std::size_t i = 0; i < inst.num_cons(); ++i) {
      for (const RowEntry& e : inst.rows[i].entries) rows_of_[e.index].push_back(static_cast<int>(i));
    }
  }

  std::optional<Solution> run() {
    std::vector<double> lo = inst_.lower;
    std::vector<double> hi = inst_.upper;
    for (int j : ints_) {
      lo[j] = std::ceil(lo[j] - 1e-9);
      hi[j] = std::floor(hi[j] + 1e-9);
      if (lo[j] > hi[j]) return std::nullopt;
    }
    if (mode_ == EnumerationMode::kExhaustive) {
      double product = 1.0;
      for (int j : ints_) product *= hi[j] - lo[j] + 1.0;
      if (product > limits_.max_domain_product) {
        throw LimitError("integer domain product " + std::to_string(product) + " exceeds enumeration cap");
      }
      exhaustive(0, lo, hi);
    } else {
      std::vector<int> all_rows(inst_.num_cons());
      for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = static_cast<int>(i);
      if (propagate(lo, hi, all_rows)) dfs(0, lo, hi);
    }
    return best_;
  }

 private:
  void count_visit() {
    if (++visits_ > limits_.max_visits) throw LimitError("enumeration visit cap exceeded");
  }

  void exhaustive(std::size_t k, std::vector<double>& lo, std::vector<double>& hi) {
    count_visit();
    if (k == ints_.size()) {
      evaluate_leaf(lo, hi);
      return;
    }
    const int j = ints_[k];
    const double l = lo[j], u = hi[j];
    for (double v = l; v <= u; v += 1.0) {
      lo[j] = hi[j] = v;
      exhaustive(k + 1, lo, hi);
    }
    lo[j] = l;
    hi[j] = u;
  }

  void dfs(std::size_t k, const std::vector<double>& lo, const std::vector<double>& hi) {
    count_visit();
    while (k < ints_.size() && lo[ints_[k]] == hi[ints_[k]]) ++k;

    if (best_) {
      double bound = box_bound(lo, hi);
      if (bound >= best_->objective - kPruneTol) return;
      if (mode_ == EnumerationMode::kLpBounded && k < ints_.size()) {
        const LpResult lp = solve_lp_box(inst_, lo, hi);
        if (lp.status == LpStatus::kInfeasible) return;
        if (lp.status == LpStatus::kOptimal && lp.objective >= best_->objective - kPruneTol) return;
      }
    }
    if (k == ints_.size()) {
      evaluate_leaf(lo, hi);
      return;
    }
    const int j = ints_[k];
    const bool descending = inst_.objective[j] < 0.0;
    const auto count = static_cast<long>(hi[j] - lo[j]) + 1;
    for (long t = 0; t < count; ++t) {
      const double v = descending ? hi[j] - static_cast<double>(t) : lo[j] + static_cast<double>(t);
      std::vector<double> clo = lo, chi = hi;
      clo[j] = chi[j] = v;
      if (propagate(clo, chi, rows_of_[j])) dfs(k + 1, clo, chi);
    }
  }

  double box_bound(const std::vector<double>& lo, const std::vector<double>& hi) const {
    double s = 0.0;
    for (std::size_t j = 0; j < inst_.num_vars(); ++j) {
      const double c = inst_.objective[j];
      if (c > 0.0) {
        s += c * lo[j];
      } else if (c < 0.0) {
        s += c * hi[j];
      }
    }
    return std::isnan(s) ? -kInf : s;
  }

  // Row-activity bound tightening to a fixpoint. Returns false when some
  // row cannot be satisfied within the box.
  bool propagate(std::vector<double>& lo, std::vector<double>& hi, const std::vector<int>& seed_rows) const {
    std::deque<int> queue(seed_rows.begin(), seed_rows.end());
    std::vector<char> queued(inst_.num_cons(), 0);
    for (int r : seed_rows) queued[r] = 1;
    std::size_t budget = 50 * (inst_.num_cons() + 1);
    while (!queue.empty()) {
      if (budget-- == 0) break;
      const int r = queue.front();
      queue.pop_front();
      queued[r] = 0;
      const Row& row = inst_.rows[r];

      double min_act = 0.0, max_act = 0.0;
      int min_inf = 0, max_inf = 0;
      for (const RowEntry& e : row.entries) {
        const double a = e.coef;
        const double lo_term = a > 0.0 ? a * lo[e.index] : a * hi[e.index];
        const double hi_term = a > 0.0 ? a * hi[e.index] : a * lo[e.index];
        if (std::isinf(lo_term)) {
          ++min_inf;
        } else {
          min_act += lo_term;
        }
        if (std::isinf(hi_term)) {
          ++max_inf;
        } else {
          max_act += hi_term;
        }
      }
      const bool need_le = row.sense != Sense::kGe;  // a x <= rhs
      const bool need_ge = row.sense != Sense::kLe;  // a x >= rhs
      const double tol = 1e-9 * (1.0 + std::abs(row.rhs));
      if (need_le && min_inf == 0 && min_act > row.rhs + tol) return false;
      if (need_ge && max_inf == 0 && max_act < row.rhs - tol) return false;

      for (const RowEntry& e : row.entries) {
        const int j = e.index;
        const double a = e.coef;
        double new_lo = lo[j], new_hi = hi[j];
        if (need_le && min_inf == 0) {
          const double own = a > 0.0 ? a * lo[j] : a * hi[j];
          const double slack = row.rhs - (min_act - own);
          if (a > 0.0) {
            new_hi = std::min(new_hi, slack / a);
          } else {
            new_lo = std::max(new_lo, slack / a);
          }
        }
        if (need_ge && max_inf == 0) {
          const double own = a > 0.0 ? a * hi[j] : a * lo[j];
          const double room = row.rhs - (max_act - own);
          if (a > 0.0) {
            new_lo = std::max(new_lo, room / a);
          } else {
            new_hi = std::min(new_hi, room / a);
          }
        }
        if (is_integral_type(inst_.vtypes[j])) {
          new_lo = std::ceil(new_lo - 1e-9);
          new_hi = std::floor(new_hi + 1e-9);
        }
        bool changed = false;
        const double step = is_integral_type(inst_.vtypes[j]) ? 0.5 : 1e-6 * (1.0 + std::abs(new_lo));
        if (new_lo > lo[j] + step || (std::isinf(lo[j]) && std::isfinite(new_lo))) {
          lo[j] = new_lo;
          changed = true;
        }
        const double step_hi = is_integral_type(inst_.vtypes[j]) ? 0.5 : 1e-6 * (1.0 + std::abs(new_hi));
        if (new_hi < hi[j] - step_hi || (std::isinf(hi[j]) && std::isfinite(new_hi))) {
          hi[j] = new_hi;
          changed = true;
        }
        if (lo[j] > hi[j] + 1e-9) return false;
        if (changed) {
          for (int r2 : rows_of_[j]) {
            if (!queued[r2]) {
              queued[r2] = 1;
              queue.push_back(r2);
            }
          }
        }
      }
    }
    return true;
  }

  void evaluate_leaf(const std::vector<double>& lo, const std::vector<double>& hi) {
    std::vector<double> x;
    if (!has_continuous_) {
      x = lo;
      if (!check_feasible(inst_, x, 1e-9)) return;
    } else {
      // Integers fixed, continuous variables keep their original bounds.
      std::vector<double> flo = inst_.lower, fhi = inst_.upper;
      for (int j : ints_) flo[j] = fhi[j] = lo[j];
      (void)hi;
      const LpResult lp = solve_lp_box(inst_, flo, fhi);
      if (lp.status == LpStatus::kInfeasible) return;
      if (lp.status == LpStatus::kUnbounded) throw Error("residual LP is unbounded");
      x = lp.x;
    }
    const double obj = eval_objective(inst_, x);
    if (!best_ || obj < best_->objective - kPruneTol) best_ = Solution{std::move(x), obj};
  }

  const MilpInstance& inst_;
  const BruteForceLimits& limits_;
  EnumerationMode mode_;
  std::vector<int> ints_;
  bool has_continuous_ = false;
  std::vector<std::vector<int>> rows_of_;
  std::int64_t visits_ = 0;
  std::optional<Solution> best_;
};

}  // namespace

std::optional<Solution> brute_force_solve(const MilpInstance& inst, const BruteForceLimits& limits) {
  inst.validate();
  Enumerator e(inst, limits);
  return e.run();
}

}  // namespace nodecomp
