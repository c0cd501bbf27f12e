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
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "nodecomp/milp.hpp"

namespace nodecomp {

enum class Family : std::uint8_t { kFcmcnf, kMaxsat, kGisp };

const char* to_string(Family f);
Family family_from_string(const std::string& s);

enum class SizeClass : std::uint8_t { kTrainTest, kTransfer };

const char* to_string(SizeClass s);
SizeClass size_class_from_string(const std::string& s);

struct ErGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // u < v, lexicographic order
  std::uint64_t seed = 0;
};

// Each unordered pair independently with probability p.
ErGraph gen_er_graph(int n, double p, std::uint64_t seed);

struct FcmcnfConfig {
  double p = 0.3;
  double commodity_factor = 1.5;  // m = ceil(factor * n)
  int cost_min = 10;
  int cost_max = 100;
  int max_attempts = 1000;
};

struct MaxsatConfig {
  double p = 0.6;
};

struct GispConfig {
  double p = 0.6;
  double removable_prob = 0.5;
  double revenue = 100.0;
  double removal_cost = 1.0;
};

// Explicit network-design data; gen_fcmcnf draws one and builds it.
struct FcmcnfData {
  int n = 0;
  std::vector<std::pair<int, int>> arcs;  // directed
  std::vector<double> routing_cost;       // per arc, per unit of flow
  std::vector<double> fixed_cost;         // per arc
  std::vector<double> capacity;           // per arc
  std::vector<std::pair<int, int>> commodities;  // (source, sink), unit demand
};

// Flows x[a][k] (continuous, [0,1]) at index a*m + k, then open arcs y[a]
// (binary). Rows: conservation per (commodity, node) with at least one
// incident arc, then one capacity row per arc.
MilpInstance build_fcmcnf(const FcmcnfData& data, const std::string& name);

// Throws Error when no feasible draw is found within max_attempts.
MilpInstance gen_fcmcnf(int n, std::uint64_t seed, const FcmcnfConfig& cfg = {});
MilpInstance gen_maxsat(int n, std::uint64_t seed, const MaxsatConfig& cfg = {});
MilpInstance gen_gisp(int n, std::uint64_t seed, const GispConfig& cfg = {});
MilpInstance build_maxsat(const ErGraph& g, const std::string& name);
MilpInstance build_gisp(const ErGraph& g, const std::vector<bool>& removable, const GispConfig& cfg,
                        const std::string& name);

MilpInstance gen_instance(Family family, int n, std::uint64_t seed);

struct SizeRange {
  int lo = 0;
  int hi = 0;
};

// Desk-scale node-count ranges; transfer ranges sit strictly above.
SizeRange desk_range(Family family, SizeClass size_class);

struct GenConfig {
  Family family = Family::kGisp;
  SizeClass size_class = SizeClass::kTrainTest;
  int n_min = 0;  // 0 = desk range default
  int n_max = 0;
  int count = 0;
  std::uint64_t seed = 0;
};

struct SuiteInstance {
  std::string file;
  std::string name;
  int n = 0;
  std::uint64_t seed = 0;  // doubles as the instance id
  MilpInstance instance;
};

// Instance i uses derive_seed(seed, i); its size is drawn from a stream
// seeded by the master seed. Returns the instances without touching disk.
std::vector<SuiteInstance> gen_suite_instances(const GenConfig& cfg);

// Writes <name>.milp files plus manifest.json into out_dir and returns the
// manifest.
nlohmann::json gen_suite(const GenConfig& cfg, const std::filesystem::path& out_dir);

// Reads a suite directory back in manifest order, checking file hashes.
std::vector<SuiteInstance> load_suite(const std::filesystem::path& dir, nlohmann::json* manifest = nullptr);

}  // namespace nodecomp
