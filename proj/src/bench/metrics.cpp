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

#include "nodecomp/bench.hpp"
#include "nodecomp/errors.hpp"

namespace nodecomp {

namespace {

std::vector<double> shifted_logs(std::span<const double> values, double shift) {
  if (values.empty()) throw ConfigError("geometric mean of an empty set");
  std::vector<double> logs;
  logs.reserve(values.size());
  for (double v : values) {
    if (!(v >= 0.0)) throw ConfigError("geometric mean needs nonnegative values");
    logs.push_back(std::log(v + shift));
  }
  return logs;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

double shifted_geomean(std::span<const double> values, double shift) {
  const std::vector<double> logs = shifted_logs(values, shift);
  if (values.size() == 1) return values[0];
  // The direct n-th root of the product is more accurate than exp(mean log)
  // while the product stays in range.
  long double prod = 1.0L;
  for (double v : values) prod *= static_cast<long double>(v) + shift;
  if (std::isfinite(prod) && prod > 1e-4000L) {
    return static_cast<double>(std::pow(prod, 1.0L / static_cast<long double>(values.size())) - shift);
  }
  return std::exp(mean(logs)) - shift;
}

double geo_std(std::span<const double> values, double shift) {
  const std::vector<double> logs = shifted_logs(values, shift);
  // Variance of the logs shifted by the first one.
  const double k = logs.front();
  const auto n = static_cast<double>(logs.size());
  double s1 = 0.0, s2 = 0.0;
  for (double x : logs) {
    s1 += x - k;
    s2 += (x - k) * (x - k);
  }
  const double var = std::max(0.0, (s2 - s1 * s1 / n) / n);
  return std::exp(std::sqrt(var));
}

}  // namespace nodecomp
