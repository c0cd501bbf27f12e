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
#include <cstdio>
#include <fstream>
#include <queue>

#include "nodecomp/container.hpp"
#include "nodecomp/errors.hpp"
#include "nodecomp/instance_gen.hpp"
#include "nodecomp/lp.hpp"
#include "nodecomp/rng.hpp"

namespace nodecomp {

namespace {

std::string instance_name(Family f, int n, std::uint64_t seed) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_n%d_%016llx", to_string(f), n, static_cast<unsigned long long>(seed));
  return buf;
}

int add_var(MilpInstance& inst, double cost, double lb, double ub, VarType t) {
  inst.objective.push_back(cost);
  inst.lower.push_back(lb);
  inst.upper.push_back(ub);
  inst.vtypes.push_back(t);
  return static_cast<int>(inst.objective.size()) - 1;
}

bool reachable(int n, const std::vector<std::pair<int, int>>& arcs, int s, int t) {
  std::vector<std::vector<int>> out(n);
  for (const auto& [u, v] : arcs) out[u].push_back(v);
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(s);
  seen[s] = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    if (u == t) return true;
    for (int v : out[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        q.push(v);
      }
    }
  }
  return false;
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::kFcmcnf:
      return "fcmcnf";
    case Family::kMaxsat:
      return "maxsat";
    case Family::kGisp:
      return "gisp";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "fcmcnf") return Family::kFcmcnf;
  if (s == "maxsat") return Family::kMaxsat;
  if (s == "gisp") return Family::kGisp;
  throw ConfigError("unknown family '" + s + "'");
}

const char* to_string(SizeClass s) { return s == SizeClass::kTrainTest ? "train_test" : "transfer"; }

SizeClass size_class_from_string(const std::string& s) {
  if (s == "train_test" || s == "train-test") return SizeClass::kTrainTest;
  if (s == "transfer") return SizeClass::kTransfer;
  throw ConfigError("unknown size class '" + s + "'");
}

ErGraph gen_er_graph(int n, double p, std::uint64_t seed) {
  if (n < 2) throw ConfigError("graph needs at least 2 nodes");
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("edge probability must be in (0, 1)");
  ErGraph g;
  g.n = n;
  g.seed = seed;
  Rng rng(seed);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (bernoulli(rng, p)) g.edges.emplace_back(u, v);
    }
  }
  return g;
}

MilpInstance build_fcmcnf(const FcmcnfData& d, const std::string& name) {
  const std::size_t na = d.arcs.size();
  const std::size_t m = d.commodities.size();
  if (d.routing_cost.size() != na || d.fixed_cost.size() != na || d.capacity.size() != na) {
    throw DimensionError("per-arc data does not match the arc count");
  }
  MilpInstance inst;
  inst.name = name;
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t k = 0; k < m; ++k) add_var(inst, d.routing_cost[a], 0.0, 1.0, VarType::kContinuous);
  }
  for (std::size_t a = 0; a < na; ++a) add_var(inst, d.fixed_cost[a], 0.0, 1.0, VarType::kBinary);

  for (std::size_t k = 0; k < m; ++k) {
    const auto [s, t] = d.commodities[k];
    for (int v = 0; v < d.n; ++v) {
      Row row;
      row.sense = Sense::kEq;
      row.rhs = v == s ? 1.0 : (v == t ? -1.0 : 0.0);
      for (std::size_t a = 0; a < na; ++a) {
        const int idx = static_cast<int>(a * m + k);
        if (d.arcs[a].first == v) row.entries.push_back({idx, 1.0});
        if (d.arcs[a].second == v) row.entries.push_back({idx, -1.0});
      }
      if (row.entries.empty() && row.rhs == 0.0) continue;
      inst.rows.push_back(std::move(row));
    }
  }
  for (std::size_t a = 0; a < na; ++a) {
    Row row;
    row.sense = Sense::kLe;
    row.rhs = 0.0;
    for (std::size_t k = 0; k < m; ++k) row.entries.push_back({static_cast<int>(a * m + k), 1.0});
    row.entries.push_back({static_cast<int>(na * m + a), -d.capacity[a]});
    inst.rows.push_back(std::move(row));
  }
  inst.validate();
  return inst;
}

MilpInstance gen_fcmcnf(int n, std::uint64_t seed, const FcmcnfConfig& cfg) {
  if (n < 2) throw ConfigError("fcmcnf needs at least 2 nodes");
  const int m = static_cast<int>(std::ceil(cfg.commodity_factor * n));
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(attempt));
    const ErGraph g = gen_er_graph(n, cfg.p, s);
    Rng rng(derive_seed(s, 1));
    FcmcnfData d;
    d.n = n;
    for (const auto& [u, v] : g.edges) {
      d.arcs.emplace_back(u, v);
      d.arcs.emplace_back(v, u);
    }
    for (std::size_t a = 0; a < d.arcs.size(); ++a) {
      d.routing_cost.push_back(static_cast<double>(uniform_int(rng, cfg.cost_min, cfg.cost_max)));
      d.fixed_cost.push_back(static_cast<double>(uniform_int(rng, cfg.cost_min, cfg.cost_max)));
      d.capacity.push_back(static_cast<double>(uniform_int(rng, 1, (m + 1) / 2)));
    }
    bool connected = !d.arcs.empty();
    for (int k = 0; k < m && connected; ++k) {
      const int src = static_cast<int>(uniform_int(rng, 0, n - 1));
      int dst = static_cast<int>(uniform_int(rng, 0, n - 2));
      if (dst >= src) ++dst;
      d.commodities.emplace_back(src, dst);
      connected = reachable(n, d.arcs, src, dst);
    }
    if (!connected) continue;
    MilpInstance inst = build_fcmcnf(d, instance_name(Family::kFcmcnf, n, seed));
    // Flows are continuous, so the design is feasible iff the LP with every
    // arc open is.
    std::vector<double> lo = inst.lower;
    for (std::size_t j = inst.num_vars() - d.arcs.size(); j < inst.num_vars(); ++j) lo[j] = 1.0;
    if (solve_lp_box(inst, lo, inst.upper).status != LpStatus::kOptimal) continue;
    return inst;
  }
  throw Error("no feasible fcmcnf draw within the attempt budget");
}

MilpInstance build_maxsat(const ErGraph& g, const std::string& name) {
  MilpInstance inst;
  inst.name = name;
  for (int v = 0; v < g.n; ++v) add_var(inst, 0.0, 0.0, 1.0, VarType::kBinary);
  for (const auto& [u, v] : g.edges) {
    // (u or v): z <= x_u + x_v
    const int z1 = add_var(inst, -1.0, 0.0, 1.0, VarType::kBinary);
    inst.rows.push_back({{{u, -1.0}, {v, -1.0}, {z1, 1.0}}, Sense::kLe, 0.0});
    // (not u or not v): z <= 2 - x_u - x_v
    const int z2 = add_var(inst, -1.0, 0.0, 1.0, VarType::kBinary);
    inst.rows.push_back({{{u, 1.0}, {v, 1.0}, {z2, 1.0}}, Sense::kLe, 2.0});
  }
  inst.validate();
  return inst;
}

MilpInstance gen_maxsat(int n, std::uint64_t seed, const MaxsatConfig& cfg) {
  if (n < 3) throw ConfigError("maxsat needs at least 3 nodes");
  return build_maxsat(gen_er_graph(n, cfg.p, seed), instance_name(Family::kMaxsat, n, seed));
}

MilpInstance build_gisp(const ErGraph& g, const std::vector<bool>& removable, const GispConfig& cfg,
                        const std::string& name) {
  if (removable.size() != g.edges.size()) throw DimensionError("removable flags do not match edges");
  MilpInstance inst;
  inst.name = name;
  for (int v = 0; v < g.n; ++v) add_var(inst, -cfg.revenue, 0.0, 1.0, VarType::kBinary);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [u, v] = g.edges[e];
    Row row{{{u, 1.0}, {v, 1.0}}, Sense::kLe, 1.0};
    if (removable[e]) {
      const int y = add_var(inst, cfg.removal_cost, 0.0, 1.0, VarType::kBinary);
      row.entries.push_back({y, -1.0});
    }
    inst.rows.push_back(std::move(row));
  }
  inst.validate();
  return inst;
}

MilpInstance gen_gisp(int n, std::uint64_t seed, const GispConfig& cfg) {
  const ErGraph g = gen_er_graph(n, cfg.p, seed);
  Rng rng(derive_seed(seed, 1));
  std::vector<bool> removable;
  for (std::size_t e = 0; e < g.edges.size(); ++e) removable.push_back(bernoulli(rng, cfg.removable_prob));
  return build_gisp(g, removable, cfg, instance_name(Family::kGisp, n, seed));
}

MilpInstance gen_instance(Family family, int n, std::uint64_t seed) {
  switch (family) {
    case Family::kFcmcnf:
      return gen_fcmcnf(n, seed);
    case Family::kMaxsat:
      return gen_maxsat(n, seed);
    case Family::kGisp:
      return gen_gisp(n, seed);
  }
  throw ConfigError("unknown family");
}

SizeRange desk_range(Family family, SizeClass size_class) {
  const bool transfer = size_class == SizeClass::kTransfer;
  switch (family) {
    case Family::kFcmcnf:
      return transfer ? SizeRange{7, 8} : SizeRange{4, 6};
    case Family::kMaxsat:
      return transfer ? SizeRange{13, 15} : SizeRange{8, 12};
    case Family::kGisp:
      return transfer ? SizeRange{13, 15} : SizeRange{8, 12};
  }
  throw ConfigError("unknown family");
}

std::vector<SuiteInstance> gen_suite_instances(const GenConfig& cfg) {
  SizeRange r = desk_range(cfg.family, cfg.size_class);
  if (cfg.n_min > 0) r.lo = cfg.n_min;
  if (cfg.n_max > 0) r.hi = cfg.n_max;
  if (r.lo > r.hi) throw ConfigError("n_min exceeds n_max");
  if (cfg.count < 0) throw ConfigError("count must be nonnegative");
  Rng size_rng(derive_seed(cfg.seed, 0x73697a65ULL));
  std::vector<SuiteInstance> out;
  for (int i = 0; i < cfg.count; ++i) {
    SuiteInstance s;
    s.n = static_cast<int>(uniform_int(size_rng, r.lo, r.hi));
    s.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
    s.instance = gen_instance(cfg.family, s.n, s.seed);
    s.name = s.instance.name;
    s.file = s.name + ".milp";
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::json gen_suite(const GenConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::vector<SuiteInstance> suite = gen_suite_instances(cfg);
  SizeRange r = desk_range(cfg.family, cfg.size_class);
  if (cfg.n_min > 0) r.lo = cfg.n_min;
  if (cfg.n_max > 0) r.hi = cfg.n_max;
  nlohmann::json entries = nlohmann::json::array();
  for (const SuiteInstance& s : suite) {
    const std::string text = instance_to_string(s.instance);
    write_file_bytes((out_dir / s.file).string(), text);
    entries.push_back({{"file", s.file}, {"name", s.name}, {"n", s.n}, {"seed", s.seed}, {"sha256", sha256_hex(text)}});
  }
  nlohmann::json manifest = {{"version", 1},
                             {"family", to_string(cfg.family)},
                             {"size_class", to_string(cfg.size_class)},
                             {"n_min", r.lo},
                             {"n_max", r.hi},
                             {"count", cfg.count},
                             {"master_seed", cfg.seed},
                             {"instances", std::move(entries)}};
  write_file_bytes((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
  return manifest;
}

std::vector<SuiteInstance> load_suite(const std::filesystem::path& dir, nlohmann::json* manifest_out) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file_bytes((dir / "manifest.json").string()));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad suite manifest in '" + dir.string() + "': " + e.what());
  }
  std::vector<SuiteInstance> out;
  for (const auto& e : manifest.at("instances")) {
    SuiteInstance s;
    s.file = e.at("file").get<std::string>();
    s.name = e.at("name").get<std::string>();
    s.n = e.at("n").get<int>();
    s.seed = e.at("seed").get<std::uint64_t>();
    const std::string text = read_file_bytes((dir / s.file).string());
    if (sha256_hex(text) != e.at("sha256").get<std::string>()) {
      throw FormatError("hash mismatch for instance file '" + s.file + "'");
    }
    s.instance = instance_from_string(text);
    out.push_back(std::move(s));
  }
  if (manifest_out != nullptr) *manifest_out = std::move(manifest);
  return out;
}

}  // namespace nodecomp
