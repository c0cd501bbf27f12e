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
#include <iostream>
#include <string>

#include "nodecomp/errors.hpp"
#include "nodecomp/kernels/kernels.hpp"
#include "nodecomp/lp.hpp"

namespace nodecomp {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal:
      return "OPTIMAL";
    case LpStatus::kInfeasible:
      return "INFEASIBLE";
    case LpStatus::kUnbounded:
      return "UNBOUNDED";
  }
  return "?";
}

void LocalBounds::tighten(int var, double lb, double ub) {
  auto it = std::lower_bound(overrides_.begin(), overrides_.end(), var,
                             [](const BoundOverride& o, int v) { return o.var < v; });
  if (it != overrides_.end() && it->var == var) {
    it->lb = std::max(it->lb, lb);
    it->ub = std::min(it->ub, ub);
  } else {
    overrides_.insert(it, BoundOverride{var, lb, ub});
  }
}

const BoundOverride* LocalBounds::find(int var) const {
  auto it = std::lower_bound(overrides_.begin(), overrides_.end(), var,
                             [](const BoundOverride& o, int v) { return o.var < v; });
  if (it != overrides_.end() && it->var == var) return &*it;
  return nullptr;
}

void LocalBounds::effective(const MilpInstance& inst, std::vector<double>& lower, std::vector<double>& upper) const {
  lower = inst.lower;
  upper = inst.upper;
  for (const BoundOverride& o : overrides_) {
    lower[o.var] = std::max(lower[o.var], o.lb);
    upper[o.var] = std::min(upper[o.var], o.ub);
  }
}

bool LocalBounds::admits(std::span<const double> x, double tol) const {
  for (const BoundOverride& o : overrides_) {
    if (static_cast<std::size_t>(o.var) >= x.size()) return false;
    if (x[o.var] < o.lb - tol || x[o.var] > o.ub + tol) return false;
  }
  return true;
}

double lp_lower_bound(const LpResult& result) {
  if (result.status != LpStatus::kOptimal) {
    throw Error(std::string("lower bound requested from a ") + to_string(result.status) + " LP");
  }
  return result.objective;
}

namespace {

enum class VarState : std::uint8_t { kBasic, kAtLower, kAtUpper, kFreeZero };

constexpr double kPivotTol = 1e-9;
constexpr double kSingularTol = 1e-11;

// Columns are laid out as [structurals | slacks | artificials]. Row i reads
// a_i x + s_i = b_i with the slack's bounds encoding the row sense, and the
// artificial column is sign_i * e_i.
class BoundedSimplex {
 public:
  BoundedSimplex(const MilpInstance& inst, std::span<const double> lower, std::span<const double> upper,
                 const LpOptions& opts)
      : inst_(inst), opts_(opts), n_(inst.num_vars()), m_(inst.num_cons()), total_(n_ + 2 * m_) {
    log_ = opts.log != nullptr ? opts.log : &std::clog;
    max_iter_ = opts.max_iterations > 0 ? opts.max_iterations
                                        : std::max<std::int64_t>(20000, 50 * static_cast<std::int64_t>(total_));
    build_columns();
    lo_.assign(total_, 0.0);
    hi_.assign(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lower[j];
      hi_[j] = upper[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = n_ + i;
      switch (inst.rows[i].sense) {
        case Sense::kGe:
          lo_[s] = -kInf;
          hi_[s] = 0.0;
          break;
        case Sense::kLe:
          lo_[s] = 0.0;
          hi_[s] = kInf;
          break;
        case Sense::kEq:
          lo_[s] = 0.0;
          hi_[s] = 0.0;
          break;
      }
    }
  }

  LpResult run() {
    LpResult result;
    for (std::size_t j = 0; j < n_; ++j) {
      if (lo_[j] > hi_[j]) {
        result.status = LpStatus::kInfeasible;
        return result;
      }
    }
    initial_basis();

    bool need_phase1 = false;
    for (std::size_t i = 0; i < m_; ++i) need_phase1 |= hi_[n_ + m_ + i] > 0.0;

    if (need_phase1) {
      cost_.assign(total_, 0.0);
      for (std::size_t i = 0; i < m_; ++i) {
        if (hi_[n_ + m_ + i] > 0.0) cost_[n_ + m_ + i] = 1.0;
      }
      const Outcome p1 = iterate();
      if (p1 == Outcome::kUnbounded) throw NumericalError("phase 1 reported an unbounded ray");
      refactor();
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i) infeas += std::abs(x_[n_ + m_ + i]);
      if (infeas > kLpFeasTol) {
        result.status = LpStatus::kInfeasible;
        result.iterations = iterations_;
        return result;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t a = n_ + m_ + i;
        hi_[a] = 0.0;
        if (state_[a] != VarState::kBasic) {
          state_[a] = VarState::kAtLower;
          x_[a] = 0.0;
        }
      }
      refactor();
    }

    cost_.assign(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = inst_.objective[j];
    const Outcome p2 = iterate();
    result.iterations = iterations_;
    if (p2 == Outcome::kUnbounded) {
      result.status = LpStatus::kUnbounded;
      return result;
    }
    refactor();
    check_primal_feasible();

    result.status = LpStatus::kOptimal;
    result.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    for (std::size_t j = 0; j < n_; ++j) {
      // Snap to bounds to shed refactorization noise.
      if (std::abs(result.x[j] - lo_[j]) < 1e-11) result.x[j] = lo_[j];
      if (std::abs(result.x[j] - hi_[j]) < 1e-11) result.x[j] = hi_[j];
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) obj += inst_.objective[j] * result.x[j];
    result.objective = obj;
    return result;
  }

 private:
  enum class Outcome { kOptimal, kUnbounded };

  void build_columns() {
    col_start_.assign(n_ + 1, 0);
    for (const Row& row : inst_.rows) {
      for (const RowEntry& e : row.entries) ++col_start_[e.index + 1];
    }
    for (std::size_t j = 0; j < n_; ++j) col_start_[j + 1] += col_start_[j];
    col_row_.resize(col_start_[n_]);
    col_val_.resize(col_start_[n_]);
    std::vector<std::size_t> fill(col_start_.begin(), col_start_.end() - 1);
    for (std::size_t i = 0; i < m_; ++i) {
      for (const RowEntry& e : inst_.rows[i].entries) {
        col_row_[fill[e.index]] = static_cast<int>(i);
        col_val_[fill[e.index]] = e.coef;
        ++fill[e.index];
      }
    }
  }

  void initial_basis() {
    x_.assign(total_, 0.0);
    state_.assign(total_, VarState::kAtLower);
    art_sign_.assign(m_, 1.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
        state_[j] = VarState::kAtLower;
      } else if (std::isfinite(hi_[j])) {
        x_[j] = hi_[j];
        state_[j] = VarState::kAtUpper;
      } else {
        x_[j] = 0.0;
        state_[j] = VarState::kFreeZero;
      }
    }
    std::vector<double> resid(m_);
    for (std::size_t i = 0; i < m_; ++i) resid[i] = inst_.rows[i].rhs - row_activity(inst_.rows[i], x_);

    head_.assign(m_, 0);
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = n_ + i;
      const std::size_t a = n_ + m_ + i;
      if (resid[i] >= lo_[s] && resid[i] <= hi_[s]) {
        state_[s] = VarState::kBasic;
        x_[s] = resid[i];
        head_[i] = s;
        binv_[i * m_ + i] = 1.0;
        lo_[a] = 0.0;
        hi_[a] = 0.0;
        state_[a] = VarState::kAtLower;
      } else {
        const double sv = std::clamp(resid[i], lo_[s], hi_[s]);
        x_[s] = sv;
        state_[s] = sv == lo_[s] ? VarState::kAtLower : VarState::kAtUpper;
        const double r = resid[i] - sv;
        art_sign_[i] = r >= 0.0 ? 1.0 : -1.0;
        x_[a] = std::abs(r);
        lo_[a] = 0.0;
        hi_[a] = kInf;
        state_[a] = VarState::kBasic;
        head_[i] = a;
        binv_[i * m_ + i] = art_sign_[i];
      }
    }
    pivots_since_refactor_ = 0;
  }

  // Dense copy of column j into out (length m).
  void load_column(std::size_t j, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (j < n_) {
      for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) out[col_row_[k]] = col_val_[k];
    } else if (j < n_ + m_) {
      out[j - n_] = 1.0;
    } else {
      out[j - n_ - m_] = art_sign_[j - n_ - m_];
    }
  }

  // alpha = B^{-1} a_j. binv_ is column-major: column c occupies [c*m, c*m+m).
  void ftran(std::size_t j, std::vector<double>& alpha) const {
    std::fill(alpha.begin(), alpha.end(), 0.0);
    auto add_col = [&](std::size_t c, double v) {
      kernels::axpy(v, std::span<const double>(binv_.data() + c * m_, m_), alpha);
    };
    if (j < n_) {
      for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) add_col(col_row_[k], col_val_[k]);
    } else if (j < n_ + m_) {
      add_col(j - n_, 1.0);
    } else {
      add_col(j - n_ - m_, art_sign_[j - n_ - m_]);
    }
  }

  double column_dot(std::size_t j, const std::vector<double>& y) const {
    if (j < n_) {
      double s = 0.0;
      for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) s += col_val_[k] * y[col_row_[k]];
      return s;
    }
    if (j < n_ + m_) return y[j - n_];
    return art_sign_[j - n_ - m_] * y[j - n_ - m_];
  }

  void refactor() {
    if (m_ == 0) return;
    // Gauss-Jordan with partial pivoting on B (column-major), producing
    // B^{-1} in place of the identity.
    std::vector<double> b(m_ * m_, 0.0);
    std::vector<double> col(m_);
    for (std::size_t c = 0; c < m_; ++c) {
      load_column(head_[c], col);
      // store row-major for elimination: b[r*m + c]
      for (std::size_t r = 0; r < m_; ++r) b[r * m_ + c] = col[r];
    }
    std::vector<double> inv(m_ * m_, 0.0);  // row-major
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      double best = std::abs(b[c * m_ + c]);
      for (std::size_t r = c + 1; r < m_; ++r) {
        const double v = std::abs(b[r * m_ + c]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best < kSingularTol) throw NumericalError("singular basis during refactorization");
      if (piv != c) {
        std::swap_ranges(b.begin() + c * m_, b.begin() + (c + 1) * m_, b.begin() + piv * m_);
        std::swap_ranges(inv.begin() + c * m_, inv.begin() + (c + 1) * m_, inv.begin() + piv * m_);
      }
      const double d = 1.0 / b[c * m_ + c];
      for (std::size_t k = 0; k < m_; ++k) {
        b[c * m_ + k] *= d;
        inv[c * m_ + k] *= d;
      }
      std::span<const double> brow(b.data() + c * m_, m_);
      std::span<const double> irow(inv.data() + c * m_, m_);
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = b[r * m_ + c];
        if (f == 0.0) continue;
        kernels::axpy(-f, brow, std::span<double>(b.data() + r * m_, m_));
        kernels::axpy(-f, irow, std::span<double>(inv.data() + r * m_, m_));
      }
    }
    // Row-major inverse -> column-major storage.
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t c = 0; c < m_; ++c) binv_[c * m_ + r] = inv[r * m_ + c];
    }
    recompute_basics();
    pivots_since_refactor_ = 0;
  }

  void recompute_basics() {
    std::vector<double> rhs(m_);
    for (std::size_t i = 0; i < m_; ++i) rhs[i] = inst_.rows[i].rhs;
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
      if (j < n_) {
        for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) rhs[col_row_[k]] -= col_val_[k] * x_[j];
      } else if (j < n_ + m_) {
        rhs[j - n_] -= x_[j];
      } else {
        rhs[j - n_ - m_] -= art_sign_[j - n_ - m_] * x_[j];
      }
    }
    std::vector<double> xb(m_, 0.0);
    for (std::size_t c = 0; c < m_; ++c) {
      if (rhs[c] != 0.0) kernels::axpy(rhs[c], std::span<const double>(binv_.data() + c * m_, m_), xb);
    }
    for (std::size_t i = 0; i < m_; ++i) x_[head_[i]] = xb[i];
  }

  void check_primal_feasible() const {
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t j = head_[i];
      const double scale = 1.0 + std::abs(x_[j]);
      if (x_[j] < lo_[j] - kLpFeasTol * scale || x_[j] > hi_[j] + kLpFeasTol * scale) {
        throw NumericalError("basic variable drifted out of bounds after refactorization");
      }
    }
  }

  Outcome iterate() {
    std::vector<double> y(m_), cb(m_), alpha(m_);
    int degenerate_run = 0;
    bool bland = false;
    while (true) {
      if (iterations_ >= max_iter_) throw NumericalError("simplex iteration limit reached");
      if (pivots_since_refactor_ >= opts_.refactor_interval) refactor();

      for (std::size_t i = 0; i < m_; ++i) cb[i] = cost_[head_[i]];
      if (m_ > 0) kernels::gemv(binv_, m_, m_, cb, y);

      // Pricing.
      std::size_t enter = total_;
      double enter_dir = 0.0;
      double best = 0.0;
      for (std::size_t j = 0; j < total_; ++j) {
        const VarState st = state_[j];
        if (st == VarState::kBasic || lo_[j] == hi_[j]) continue;
        const double d = cost_[j] - column_dot(j, y);
        double dir = 0.0;
        if ((st == VarState::kAtLower || st == VarState::kFreeZero) && d < -kLpDualTol) {
          dir = 1.0;
        } else if ((st == VarState::kAtUpper || st == VarState::kFreeZero) && d > kLpDualTol) {
          dir = -1.0;
        }
        if (dir == 0.0) continue;
        if (bland) {
          enter = j;
          enter_dir = dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = j;
          enter_dir = dir;
        }
      }
      if (enter == total_) return Outcome::kOptimal;

      ftran(enter, alpha);

      // Ratio test, two passes: the first finds the tightest step allowing
      // a small bound violation, the second picks the largest pivot among
      // rows blocking within that step.
      double theta_max = kInf;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = enter_dir * alpha[i];
        if (std::abs(a) <= kPivotTol) continue;
        const std::size_t b = head_[i];
        double limit = kInf;
        if (a > 0.0 && std::isfinite(lo_[b])) {
          limit = (x_[b] - lo_[b] + 1e-9) / a;
        } else if (a < 0.0 && std::isfinite(hi_[b])) {
          limit = (hi_[b] - x_[b] + 1e-9) / -a;
        }
        theta_max = std::min(theta_max, limit);
      }
      const double range = hi_[enter] - lo_[enter];
      std::size_t leave_row = m_;
      double theta = kInf;
      double best_pivot = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = enter_dir * alpha[i];
        if (std::abs(a) <= kPivotTol) continue;
        const std::size_t b = head_[i];
        double ratio = kInf;
        if (a > 0.0 && std::isfinite(lo_[b])) {
          ratio = (x_[b] - lo_[b]) / a;
        } else if (a < 0.0 && std::isfinite(hi_[b])) {
          ratio = (hi_[b] - x_[b]) / -a;
        }
        if (!std::isfinite(ratio) || ratio > theta_max) continue;
        ratio = std::max(ratio, 0.0);
        bool take;
        if (bland) {
          take = leave_row == m_ || ratio < theta - 1e-12 ||
                 (ratio <= theta + 1e-12 && head_[i] < head_[leave_row]);
        } else {
          take = std::abs(a) > best_pivot;
        }
        if (take) {
          leave_row = i;
          theta = ratio;
          best_pivot = std::abs(a);
        }
      }

      const bool flip = std::isfinite(range) && range <= theta;
      if (!flip && leave_row == m_) return Outcome::kUnbounded;
      if (flip) theta = range;

      ++iterations_;
      if (theta < 1e-12) {
        if (++degenerate_run >= opts_.degenerate_threshold) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      // Move along the edge.
      if (theta > 0.0) {
        for (std::size_t i = 0; i < m_; ++i) x_[head_[i]] -= enter_dir * theta * alpha[i];
      }
      if (flip) {
        if (enter_dir > 0.0) {
          x_[enter] = hi_[enter];
          state_[enter] = VarState::kAtUpper;
        } else {
          x_[enter] = lo_[enter];
          state_[enter] = VarState::kAtLower;
        }
        log_iteration(enter, total_, theta);
        continue;
      }

      x_[enter] += enter_dir * theta;
      const std::size_t leave = head_[leave_row];
      const double a = enter_dir * alpha[leave_row];
      if (a > 0.0) {
        x_[leave] = lo_[leave];
        state_[leave] = VarState::kAtLower;
      } else {
        x_[leave] = hi_[leave];
        state_[leave] = VarState::kAtUpper;
      }
      state_[enter] = VarState::kBasic;
      head_[leave_row] = enter;
      update_inverse(leave_row, alpha);
      ++pivots_since_refactor_;
      log_iteration(enter, leave, theta);
    }
  }

  // Product-form update of B^{-1} for a pivot on row r with entering column
  // alpha = B^{-1} a_q.
  void update_inverse(std::size_t r, const std::vector<double>& alpha) {
    const double pivot = alpha[r];
    if (std::abs(pivot) < kSingularTol) throw NumericalError("pivot element vanished");
    for (std::size_t c = 0; c < m_; ++c) {
      double* col = binv_.data() + c * m_;
      const double v = col[r] / pivot;
      if (v != 0.0) kernels::axpy(-v, alpha, std::span<double>(col, m_));
      col[r] = v;
    }
  }

  void log_iteration(std::size_t enter, std::size_t leave, double theta) const {
    if (opts_.verbosity <= 0) return;
    *log_ << "simplex it=" << iterations_ << " enter=" << enter << " leave=";
    if (leave == total_) {
      *log_ << "flip";
    } else {
      *log_ << leave;
    }
    *log_ << " step=" << theta << '\n';
  }

  const MilpInstance& inst_;
  const LpOptions& opts_;
  std::ostream* log_;
  std::size_t n_, m_, total_;
  std::int64_t max_iter_;

  std::vector<std::size_t> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;

  std::vector<double> lo_, hi_, cost_, x_;
  std::vector<VarState> state_;
  std::vector<double> art_sign_;
  std::vector<std::size_t> head_;
  std::vector<double> binv_;
  int pivots_since_refactor_ = 0;
  std::int64_t iterations_ = 0;
};

}  // namespace

LpResult solve_lp_box(const MilpInstance& inst, std::span<const double> lower, std::span<const double> upper,
                      const LpOptions& opts) {
  if (lower.size() != inst.num_vars() || upper.size() != inst.num_vars()) {
    throw DimensionError("bound vectors do not match the instance");
  }
  BoundedSimplex simplex(inst, lower, upper, opts);
  return simplex.run();
}

LpResult solve_lp(const MilpInstance& inst, const LocalBounds& bounds, const LpOptions& opts) {
  std::vector<double> lo, hi;
  bounds.effective(inst, lo, hi);
  return solve_lp_box(inst, lo, hi, opts);
}

}  // namespace nodecomp
