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

#include "doctest.h"
#include "nodecomp/errors.hpp"
#include "nodecomp/lp.hpp"
#include "nodecomp/rng.hpp"
#include "oracles.hpp"

using namespace nodecomp;

namespace {

MilpInstance single(double c, double lb, double ub) {
  MilpInstance inst;
  inst.objective = {c};
  inst.lower = {lb};
  inst.upper = {ub};
  inst.vtypes = {VarType::kContinuous};
  return inst;
}

}  // namespace

TEST_CASE("free variable with a lower row") {
  MilpInstance inst = single(1.0, -kInf, kInf);
  inst.rows.push_back({{{0, 1.0}}, Sense::kGe, 3.0});
  const LpResult r = solve_lp(inst, {});
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.x[0] == doctest::Approx(3.0));
  CHECK(r.objective == doctest::Approx(3.0));
  CHECK(lp_lower_bound(r) == doctest::Approx(3.0));
}

TEST_CASE("unbounded and infeasible") {
  const MilpInstance unb = single(-1.0, 0.0, kInf);
  CHECK(solve_lp(unb, {}).status == LpStatus::kUnbounded);

  MilpInstance inf = single(1.0, 0.0, 10.0);
  inf.rows.push_back({{{0, 1.0}}, Sense::kGe, 4.0});
  inf.rows.push_back({{{0, 1.0}}, Sense::kLe, 3.0});
  const LpResult r = solve_lp(inf, {});
  CHECK(r.status == LpStatus::kInfeasible);
  CHECK_THROWS_AS(lp_lower_bound(r), Error);
}

TEST_CASE("lp_lower_bound returns the optimal objective") {
  LpResult r;
  r.status = LpStatus::kOptimal;
  r.objective = 7.5;
  CHECK(lp_lower_bound(r) == 7.5);
}

TEST_CASE("local bounds tighten by intersection") {
  LocalBounds b;
  b.tighten(3, 0.0, 5.0);
  b.tighten(1, -kInf, 2.0);
  b.tighten(3, 1.0, 9.0);
  REQUIRE(b.size() == 2);
  CHECK(b.overrides()[0].var == 1);
  CHECK(b.find(3)->lb == 1.0);
  CHECK(b.find(3)->ub == 5.0);
  CHECK(b.find(2) == nullptr);
  const std::vector<double> x{0, 2, 0, 1};
  CHECK(b.admits(x, 1e-9));
  const std::vector<double> y{0, 2.5, 0, 1};
  CHECK_FALSE(b.admits(y, 1e-9));
}

TEST_CASE("simplex matches vertex enumeration on random dense LPs") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const MilpInstance inst = testing_oracles::random_bounded_lp(4, 6, seed);
    const auto oracle = testing_oracles::vertex_enumeration_lp(inst);
    const LpResult r = solve_lp(inst, {});
    REQUIRE(r.status != LpStatus::kUnbounded);
    REQUIRE(oracle.has_value() == (r.status == LpStatus::kOptimal));
    if (oracle) {
      CHECK(std::abs(r.objective - *oracle) <= 1e-7 * (1.0 + std::abs(*oracle)));
      CHECK(check_feasible(inst, r.x, 1e-6));
    }
  }
}

TEST_CASE("tightening bounds never lowers the LP value") {
  Rng rng(9);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const MilpInstance inst = testing_oracles::random_bounded_lp(5, 4, 1000 + seed);
    const LpResult parent = solve_lp(inst, {});
    if (parent.status != LpStatus::kOptimal) continue;
    LocalBounds b;
    const int j = static_cast<int>(uniform_int(rng, 0, 4));
    const double mid = 0.5 * (inst.lower[j] + inst.upper[j]);
    b.tighten(j, -kInf, mid);
    const LpResult child = solve_lp(inst, b);
    if (child.status == LpStatus::kOptimal) CHECK(child.objective >= parent.objective - 1e-9);
  }
}

TEST_CASE("solves are deterministic") {
  const MilpInstance inst = testing_oracles::random_bounded_lp(8, 10, 5);
  const LpResult a = solve_lp(inst, {});
  const LpResult b = solve_lp(inst, {});
  CHECK(a.status == b.status);
  CHECK(a.iterations == b.iterations);
  CHECK(a.x == b.x);
  CHECK(a.objective == b.objective);
}

TEST_CASE("degenerate LP terminates") {
  // Many constraints through the same vertex.
  MilpInstance inst;
  inst.objective = {-1, -1, -1};
  inst.lower.assign(3, 0.0);
  inst.upper.assign(3, 10.0);
  inst.vtypes.assign(3, VarType::kContinuous);
  for (int k = 1; k <= 8; ++k) {
    inst.rows.push_back({{{0, 1.0 * k}, {1, 1.0}, {2, 1.0}}, Sense::kLe, 0.0});
  }
  inst.rows.push_back({{{0, 1.0}, {1, 1.0}, {2, 1.0}}, Sense::kLe, 1.0});
  const LpResult r = solve_lp(inst, {});
  REQUIRE(r.status == LpStatus::kOptimal);
  const auto oracle = testing_oracles::vertex_enumeration_lp(inst);
  REQUIRE(oracle);
  CHECK(r.objective == doctest::Approx(*oracle));
}
