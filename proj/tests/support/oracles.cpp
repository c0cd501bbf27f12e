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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nodecomp/rng.hpp"

namespace testing_oracles {

using namespace nodecomp;

namespace {

// Solves the dense system in place with partial pivoting; false if singular.
bool gauss_solve(std::vector<std::vector<long double>>& a, std::vector<long double>& b) {
  const std::size_t k = b.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    if (std::fabs(a[piv][c]) < 1e-12L) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const long double f = a[r][c] / a[c][c];
      if (f == 0.0L) continue;
      for (std::size_t cc = c; cc < k; ++cc) a[r][cc] -= f * a[c][cc];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = 0; c < k; ++c) b[c] /= a[c][c];
  return true;
}

struct Search {
  const MilpInstance& inst;
  std::size_t n, m;
  std::vector<std::vector<double>> dense;
  std::vector<int> tight_rows;
  std::optional<double> best;

  explicit Search(const MilpInstance& in) : inst(in), n(in.num_vars()), m(in.num_cons()) {
    dense.assign(m, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
      for (const RowEntry& e : in.rows[i].entries) dense[i][e.index] += e.coef;
    }
  }

  bool feasible(const std::vector<double>& x) const {
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] < inst.lower[j] - 1e-9 || x[j] > inst.upper[j] + 1e-9) return false;
    }
    for (std::size_t i = 0; i < m; ++i) {
      double act = 0.0;
      for (std::size_t j = 0; j < n; ++j) act += dense[i][j] * x[j];
      const double tol = 1e-9 * (1.0 + std::abs(inst.rows[i].rhs));
      const Sense s = inst.rows[i].sense;
      if (s != Sense::kLe && act < inst.rows[i].rhs - tol) return false;
      if (s != Sense::kGe && act > inst.rows[i].rhs + tol) return false;
    }
    return true;
  }

  // Choose which variables are free (solved for) and which sit at bounds.
  void assign_vars(std::size_t j, std::vector<int>& free_vars, std::vector<double>& fixed_val,
                   std::vector<char>& is_free) {
    const std::size_t k = tight_rows.size();
    if (j == n) {
      if (free_vars.size() != k) return;
      std::vector<std::vector<long double>> a(k, std::vector<long double>(k));
      std::vector<long double> b(k);
      for (std::size_t r = 0; r < k; ++r) {
        const int row = tight_rows[r];
        long double rhs = inst.rows[row].rhs;
        for (std::size_t c = 0; c < n; ++c) {
          if (!is_free[c]) rhs -= static_cast<long double>(dense[row][c]) * fixed_val[c];
        }
        for (std::size_t c = 0; c < k; ++c) a[r][c] = dense[row][free_vars[c]];
        b[r] = rhs;
      }
      if (k > 0 && !gauss_solve(a, b)) return;
      std::vector<double> x(fixed_val);
      for (std::size_t c = 0; c < k; ++c) x[free_vars[c]] = static_cast<double>(b[c]);
      if (!feasible(x)) return;
      double obj = 0.0;
      for (std::size_t c = 0; c < n; ++c) obj += inst.objective[c] * x[c];
      if (!best || obj < *best) best = obj;
      return;
    }
    const std::size_t remaining = n - j;
    if (free_vars.size() < k) {
      if (free_vars.size() + remaining < k) return;
      is_free[j] = 1;
      free_vars.push_back(static_cast<int>(j));
      assign_vars(j + 1, free_vars, fixed_val, is_free);
      free_vars.pop_back();
      is_free[j] = 0;
    }
    if (free_vars.size() + remaining - 1 >= k) {
      fixed_val[j] = inst.lower[j];
      assign_vars(j + 1, free_vars, fixed_val, is_free);
      if (inst.upper[j] != inst.lower[j]) {
        fixed_val[j] = inst.upper[j];
        assign_vars(j + 1, free_vars, fixed_val, is_free);
      }
    }
  }

  void choose_rows(std::size_t i) {
    if (i == m) {
      if (tight_rows.size() > n) return;
      std::vector<int> free_vars;
      std::vector<double> fixed_val(n, 0.0);
      std::vector<char> is_free(n, 0);
      assign_vars(0, free_vars, fixed_val, is_free);
      return;
    }
    // Equality rows may stay out of the tight set: feasible() enforces them,
    // and with dependent rows only an independent subset can form a basis.
    choose_rows(i + 1);
    if (tight_rows.size() < n) {
      tight_rows.push_back(static_cast<int>(i));
      choose_rows(i + 1);
      tight_rows.pop_back();
    }
  }
};

}  // namespace

std::optional<double> vertex_enumeration_lp(const MilpInstance& inst) {
  Search s(inst);
  s.choose_rows(0);
  return s.best;
}

MilpInstance random_bounded_lp(int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  MilpInstance inst;
  inst.name = "lp";
  for (int j = 0; j < n; ++j) {
    inst.objective.push_back(static_cast<double>(uniform_int(rng, -10, 10)));
    const double lo = static_cast<double>(uniform_int(rng, -5, 2));
    inst.lower.push_back(lo);
    inst.upper.push_back(lo + static_cast<double>(uniform_int(rng, 0, 8)));
    inst.vtypes.push_back(VarType::kContinuous);
  }
  for (int i = 0; i < m; ++i) {
    Row row;
    for (int j = 0; j < n; ++j) {
      if (bernoulli(rng, 0.6)) row.entries.push_back({j, static_cast<double>(uniform_int(rng, -6, 6))});
    }
    row.entries.erase(std::remove_if(row.entries.begin(), row.entries.end(), [](const RowEntry& e) { return e.coef == 0.0; }),
                      row.entries.end());
    if (row.entries.empty()) row.entries.push_back({static_cast<int>(uniform_int(rng, 0, n - 1)), 1.0});
    const auto s = uniform_int(rng, 0, 9);
    row.sense = s < 4 ? Sense::kLe : (s < 8 ? Sense::kGe : Sense::kEq);
    row.rhs = static_cast<double>(uniform_int(rng, -10, 10));
    inst.rows.push_back(std::move(row));
  }
  return inst;
}

MilpInstance random_small_milp(int n, int m, std::uint64_t seed) {
  MilpInstance inst = random_bounded_lp(n, m, seed);
  Rng rng(seed ^ 0x5bd1e995ULL);
  for (int j = 0; j < n; ++j) {
    const auto t = uniform_int(rng, 0, 2);
    if (t == 0) {
      inst.vtypes[j] = VarType::kBinary;
      inst.lower[j] = 0.0;
      inst.upper[j] = 1.0;
    } else if (t == 1) {
      inst.vtypes[j] = VarType::kInteger;
    }
  }
  // Keep the instance feasible: loosen every row around a random integral point.
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = static_cast<double>(uniform_int(rng, static_cast<std::int64_t>(inst.lower[j]),
                                                                     static_cast<std::int64_t>(inst.upper[j])));
  for (Row& row : inst.rows) {
    const double act = row_activity(row, x);
    if (row.sense == Sense::kEq) {
      row.rhs = act;
    } else if (row.sense == Sense::kLe) {
      row.rhs = std::max(row.rhs, act);
    } else {
      row.rhs = std::min(row.rhs, act);
    }
  }
  return inst;
}

std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double orig = x[k];
    x[k] = orig + h;
    const double fp = f(x);
    x[k] = orig - h;
    const double fm = f(x);
    x[k] = orig;
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("gradient length mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size() && k < b.size(); ++k) {
    worst = std::max(worst, std::abs(a[k] - b[k]) / std::max(1e-6, std::abs(a[k]) + std::abs(b[k])));
  }
  return worst;
}

GradientCheck check_param_gradients(const nodecomp::nn::ParamStore& params,
                                    const std::function<nodecomp::nn::Tape::Id(nodecomp::nn::Tape&)>& build, double h) {
  using nodecomp::nn::ParamStore;
  using nodecomp::nn::Tape;
  std::vector<double> flat;
  for (const auto& [name, t] : params.entries()) flat.insert(flat.end(), t.data.begin(), t.data.end());

  auto forward = [&](const std::vector<double>& x) {
    ParamStore p = params;
    std::size_t off = 0;
    for (auto& [name, t] : p.entries()) {
      for (double& v : t.data) v = x[off++];
    }
    Tape tape(&p);
    return tape.scalar(build(tape));
  };

  ParamStore grads = params.zeros_like();
  Tape tape(&params, &grads);
  const Tape::Id loss = build(tape);
  tape.backward(loss);
  GradientCheck out;
  for (const auto& [name, t] : grads.entries()) out.analytic.insert(out.analytic.end(), t.data.begin(), t.data.end());
  out.numeric = numeric_gradient(forward, flat, h);
  out.max_rel_error = max_relative_error(out.analytic, out.numeric);
  const std::vector<double> fine = numeric_gradient(forward, flat, h / 10.0);
  std::vector<double> a, n;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    if (max_relative_error({out.numeric[k]}, {fine[k]}) > 1e-3) {
      ++out.nonsmooth;
      continue;
    }
    a.push_back(out.analytic[k]);
    n.push_back(out.numeric[k]);
  }
  out.max_rel_error_smooth = max_relative_error(a, n);
  return out;
}

}  // namespace testing_oracles
