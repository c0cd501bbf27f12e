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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "nodecomp/bnb.hpp"
#include "nodecomp/instance_gen.hpp"

namespace nodecomp {

// exp(mean(log(v + shift))) - shift. Throws ConfigError on empty input or
// a value below zero.
double shifted_geomean(std::span<const double> values, double shift = 1.0);
// exp(population stddev of log(v + shift)).
double geo_std(std::span<const double> values, double shift = 1.0);

enum class Method : std::uint8_t { kScipLikeEstimate, kPlainEstimate, kOracle, kSvm, kMlp, kGnn };

// Config identifiers: SCIP_LIKE_ESTIMATE, PLAIN_ESTIMATE, ORACLE, SVM, MLP, GNN.
const char* to_string(Method m);
Method method_from_string(const std::string& s);
// Report labels: "default scip", "estimate", "oracle", "svm", "mlp", "gnn".
const char* report_label(Method m);
bool is_learned(Method m);

struct InstanceSet {
  std::filesystem::path dir;
  std::string split;  // e.g. "test" or "transfer"
};

struct ExperimentConfig {
  int version = 1;
  std::vector<InstanceSet> sets;
  std::vector<Method> methods;
  // method -> family name (or "*") -> checkpoint path
  std::map<Method, std::map<std::string, std::filesystem::path>> checkpoints;
  SolveLimits limits{100000, 600.0};
  std::filesystem::path output_csv;
  std::filesystem::path output_markdown;  // optional
  std::uint64_t seed = 0;
  int jobs = 1;
};

// Relative paths are resolved against base_dir. Throws ConfigError on
// schema violations.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct InstanceResult {
  Method method = Method::kPlainEstimate;
  std::string family;
  std::string split;
  std::string instance;
  SolveStatus status = SolveStatus::kInfeasible;
  std::int64_t nodes = 0;
  double time = 0.0;
  double objective = 0.0;
  std::string error;  // nonempty when the solve threw
};

struct ResultRow {
  std::string method;  // report label
  std::string family;
  std::string split;
  std::size_t n_instances = 0;
  std::size_t n_solved = 0;
  double geo_nodes = 0.0;
  double geo_std_nodes = 1.0;
  double geo_time = 0.0;
  double geo_std_time = 1.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<InstanceResult> instances;
  std::size_t failures = 0;
};

// Aggregates per (method, family, split) over solved instances only, in
// order of first appearance.
std::vector<ResultRow> aggregate(const std::vector<InstanceResult>& results);

std::string results_csv(const std::vector<ResultRow>& rows);
std::string results_markdown(const std::vector<ResultRow>& rows, int jobs);

// Solves every instance of every set with every method and writes the CSV
// (and markdown, if configured). All checkpoints are loaded before the
// first solve. Failed solves are counted, not fatal.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace nodecomp
