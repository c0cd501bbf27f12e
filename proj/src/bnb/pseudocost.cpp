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

#include "nodecomp/bnb.hpp"
#include "nodecomp/errors.hpp"

namespace nodecomp {

PseudocostTable::PseudocostTable(std::size_t num_vars)
    : down_sum_(num_vars, 0.0), up_sum_(num_vars, 0.0), down_count_(num_vars, 0), up_count_(num_vars, 0) {}

void PseudocostTable::update(int var, BranchDir dir, double parent_bound, double child_bound, double fraction) {
  if (var < 0 || static_cast<std::size_t>(var) >= down_sum_.size()) throw DimensionError("pseudocost variable out of range");
  const double delta = dir == BranchDir::kDown ? fraction : 1.0 - fraction;
  if (!(delta > 0.0)) return;
  const double gain = std::max(0.0, (child_bound - parent_bound) / delta);
  if (dir == BranchDir::kDown) {
    down_sum_[var] += gain;
    ++down_count_[var];
    total_down_ += gain;
    ++obs_down_;
  } else {
    up_sum_[var] += gain;
    ++up_count_[var];
    total_up_ += gain;
    ++obs_up_;
  }
}

double PseudocostTable::average(int var, BranchDir dir) const {
  const bool down = dir == BranchDir::kDown;
  const std::int64_t c = down ? down_count_[var] : up_count_[var];
  if (c > 0) return (down ? down_sum_[var] : up_sum_[var]) / static_cast<double>(c);
  const std::int64_t obs = down ? obs_down_ : obs_up_;
  if (obs > 0) return (down ? total_down_ : total_up_) / static_cast<double>(obs);
  return 1.0;
}

std::int64_t PseudocostTable::count(int var, BranchDir dir) const {
  return dir == BranchDir::kDown ? down_count_[var] : up_count_[var];
}

double PseudocostTable::sum(int var, BranchDir dir) const {
  return dir == BranchDir::kDown ? down_sum_[var] : up_sum_[var];
}

bool is_fractional(double v) { return std::abs(v - std::round(v)) > kIntegralityTol; }

std::vector<int> fractional_vars(const MilpInstance& inst, std::span<const double> x) {
  std::vector<int> out;
  for (std::size_t j = 0; j < inst.num_vars(); ++j) {
    if (is_integral_type(inst.vtypes[j]) && is_fractional(x[j])) out.push_back(static_cast<int>(j));
  }
  return out;
}

double compute_estimate(const MilpInstance& inst, const BnbNode& node, std::span<const double> lp_x,
                        const PseudocostTable& pc) {
  double est = node.dual_bound;
  for (int j : fractional_vars(inst, lp_x)) {
    const double f = lp_x[j] - std::floor(lp_x[j]);
    const double down = std::max(0.0, pc.average(j, BranchDir::kDown)) * f;
    const double up = std::max(0.0, pc.average(j, BranchDir::kUp)) * (1.0 - f);
    est += std::min(down, up);
  }
  return est;
}

std::pair<BnbNode, BnbNode> branch(const MilpInstance& inst, const BnbNode& node, std::span<const double> lp_x) {
  if (lp_x.size() != inst.num_vars()) throw DimensionError("LP solution does not match the instance");
  const std::vector<int> frac = fractional_vars(inst, lp_x);
  if (frac.empty()) throw Error("branch called on an integral LP solution");
  int var = -1;
  double best = -1.0;
  for (int j : frac) {
    const double f = lp_x[j] - std::floor(lp_x[j]);
    const double score = std::min(f, 1.0 - f);
    if (score > best) {
      best = score;
      var = j;
    }
  }
  const double fl = std::floor(lp_x[var]);

  auto make_child = [&](BranchDir dir) {
    BnbNode c;
    c.parent_id = node.id;
    c.depth = node.depth + 1;
    c.bounds = node.bounds;
    if (dir == BranchDir::kDown) {
      c.bounds.tighten(var, -kInf, fl);
    } else {
      c.bounds.tighten(var, fl + 1.0, kInf);
    }
    c.branch_var = var;
    c.branch_dir = dir;
    c.parent_bound = node.dual_bound;
    c.branch_fraction = lp_x[var] - fl;
    c.parent_num_fractional = static_cast<int>(frac.size());
    c.dual_bound = node.dual_bound;
    c.estimate = node.estimate;
    return c;
  };
  return {make_child(BranchDir::kDown), make_child(BranchDir::kUp)};
}

}  // namespace nodecomp
