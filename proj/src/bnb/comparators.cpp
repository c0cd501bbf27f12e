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

#include "nodecomp/bnb.hpp"
#include "nodecomp/errors.hpp"

namespace nodecomp {

const char* to_string(CompDecision d) {
  switch (d) {
    case CompDecision::kFirstBetter:
      return "FIRST_BETTER";
    case CompDecision::kSecondBetter:
      return "SECOND_BETTER";
    case CompDecision::kEqual:
      return "EQUAL";
  }
  return "?";
}

CompDecision opposite(CompDecision d) {
  switch (d) {
    case CompDecision::kFirstBetter:
      return CompDecision::kSecondBetter;
    case CompDecision::kSecondBetter:
      return CompDecision::kFirstBetter;
    case CompDecision::kEqual:
      return CompDecision::kEqual;
  }
  return d;
}

namespace {

// Lower value wins.
CompDecision prefer_lower(double a, double b) {
  if (a < b) return CompDecision::kFirstBetter;
  if (b < a) return CompDecision::kSecondBetter;
  return CompDecision::kEqual;
}

}  // namespace

CompDecision estimate_comp(const BnbNode& a, const BnbNode& b) { return prefer_lower(a.estimate, b.estimate); }

CompDecision best_first_comp(const BnbNode& a, const BnbNode& b) { return prefer_lower(a.dual_bound, b.dual_bound); }

CompDecision dfs_comp(const BnbNode& a, const BnbNode& b) { return prefer_lower(-a.depth, -b.depth); }

CompDecision oracle_comp(const BnbNode& a, const BnbNode& b, std::span<const double> x_star) {
  const bool in_a = a.bounds.admits(x_star, kIntegralityTol);
  const bool in_b = b.bounds.admits(x_star, kIntegralityTol);
  if (in_a && in_b) {
    throw Error("optimal solution lies in two open nodes (ids " + std::to_string(a.id) + ", " +
                std::to_string(b.id) + ")");
  }
  if (in_a) return CompDecision::kFirstBetter;
  if (in_b) return CompDecision::kSecondBetter;
  return estimate_comp(a, b);
}

}  // namespace nodecomp
