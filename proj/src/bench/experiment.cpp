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

#include <atomic>
#include <cstdio>
#include <memory>
#include <sstream>
#include <thread>

#include "nodecomp/bench.hpp"
#include "nodecomp/container.hpp"
#include "nodecomp/errors.hpp"
#include "nodecomp/models.hpp"

namespace nodecomp {

namespace {

constexpr Method kAllMethods[] = {Method::kScipLikeEstimate, Method::kPlainEstimate, Method::kOracle,
                                  Method::kSvm,              Method::kMlp,           Method::kGnn};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct Task {
  std::size_t set = 0;
  std::size_t instance = 0;
  Method method = Method::kPlainEstimate;
};

struct LoadedSet {
  std::string family;
  std::string split;
  std::vector<SuiteInstance> instances;
};

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::kScipLikeEstimate:
      return "SCIP_LIKE_ESTIMATE";
    case Method::kPlainEstimate:
      return "PLAIN_ESTIMATE";
    case Method::kOracle:
      return "ORACLE";
    case Method::kSvm:
      return "SVM";
    case Method::kMlp:
      return "MLP";
    case Method::kGnn:
      return "GNN";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  for (Method m : kAllMethods) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + s + "'");
}

const char* report_label(Method m) {
  switch (m) {
    case Method::kScipLikeEstimate:
      return "default scip";
    case Method::kPlainEstimate:
      return "estimate";
    case Method::kOracle:
      return "oracle";
    case Method::kSvm:
      return "svm";
    case Method::kMlp:
      return "mlp";
    case Method::kGnn:
      return "gnn";
  }
  return "?";
}

bool is_learned(Method m) { return m == Method::kSvm || m == Method::kMlp || m == Method::kGnn; }

ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  try {
    cfg.version = j.value("version", 1);
    if (cfg.version != 1) throw ConfigError("unsupported experiment config version " + std::to_string(cfg.version));
    for (const auto& s : j.at("sets")) {
      cfg.sets.push_back({resolve(base_dir, s.at("dir").get<std::string>()), s.value("split", std::string("test"))});
    }
    for (const auto& m : j.at("methods")) cfg.methods.push_back(method_from_string(m.get<std::string>()));
    if (j.contains("checkpoints")) {
      for (const auto& [key, val] : j.at("checkpoints").items()) {
        const Method m = method_from_string(key);
        if (val.is_string()) {
          cfg.checkpoints[m]["*"] = resolve(base_dir, val.get<std::string>());
        } else {
          for (const auto& [fam, path] : val.items()) cfg.checkpoints[m][fam] = resolve(base_dir, path.get<std::string>());
        }
      }
    }
    if (j.contains("limits")) {
      cfg.limits.max_nodes = j.at("limits").value("nodes", cfg.limits.max_nodes);
      cfg.limits.max_seconds = j.at("limits").value("seconds", cfg.limits.max_seconds);
    }
    cfg.output_csv = resolve(base_dir, j.at("output_csv").get<std::string>());
    if (j.contains("output_markdown")) cfg.output_markdown = resolve(base_dir, j.at("output_markdown").get<std::string>());
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.jobs = j.value("jobs", 1);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
  if (cfg.limits.max_nodes <= 0 || cfg.limits.max_seconds <= 0.0) throw ConfigError("limits must be positive");
  if (cfg.jobs <= 0) throw ConfigError("jobs must be positive");
  for (Method m : cfg.methods) {
    if (is_learned(m) && cfg.checkpoints.count(m) == 0) {
      throw ConfigError(std::string("method ") + to_string(m) + " needs a checkpoint");
    }
  }
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["version"] = cfg.version;
  j["sets"] = nlohmann::json::array();
  for (const auto& s : cfg.sets) j["sets"].push_back({{"dir", s.dir.string()}, {"split", s.split}});
  j["methods"] = nlohmann::json::array();
  for (Method m : cfg.methods) j["methods"].push_back(to_string(m));
  j["checkpoints"] = nlohmann::json::object();
  for (const auto& [m, per] : cfg.checkpoints) {
    for (const auto& [fam, path] : per) j["checkpoints"][to_string(m)][fam] = path.string();
  }
  j["limits"] = {{"nodes", cfg.limits.max_nodes}, {"seconds", cfg.limits.max_seconds}};
  j["output_csv"] = cfg.output_csv.string();
  if (!cfg.output_markdown.empty()) j["output_markdown"] = cfg.output_markdown.string();
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  return j;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file_bytes(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse '" + path.string() + "': " + e.what());
  }
  return experiment_config_from_json(j, path.parent_path());
}

std::vector<ResultRow> aggregate(const std::vector<InstanceResult>& results) {
  std::vector<ResultRow> rows;
  std::vector<std::vector<double>> nodes, times;
  for (const InstanceResult& r : results) {
    const std::string label = report_label(r.method);
    std::size_t k = 0;
    while (k < rows.size() && !(rows[k].method == label && rows[k].family == r.family && rows[k].split == r.split)) ++k;
    if (k == rows.size()) {
      rows.push_back({label, r.family, r.split});
      nodes.emplace_back();
      times.emplace_back();
    }
    ++rows[k].n_instances;
    if (r.error.empty() && r.status == SolveStatus::kOptimal) {
      ++rows[k].n_solved;
      nodes[k].push_back(static_cast<double>(r.nodes));
      times[k].push_back(r.time);
    }
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (nodes[k].empty()) continue;
    rows[k].geo_nodes = shifted_geomean(nodes[k]);
    rows[k].geo_std_nodes = geo_std(nodes[k]);
    rows[k].geo_time = shifted_geomean(times[k]);
    rows[k].geo_std_time = geo_std(times[k]);
  }
  return rows;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "method,family,split,n_instances,n_solved,geo_nodes,geo_std_nodes,geo_time,geo_std_time\n";
  for (const ResultRow& r : rows) {
    out << r.method << ',' << r.family << ',' << r.split << ',' << r.n_instances << ',' << r.n_solved << ','
        << fmt(r.geo_nodes) << ',' << fmt(r.geo_std_nodes) << ',' << fmt(r.geo_time) << ',' << fmt(r.geo_std_time)
        << '\n';
  }
  return out.str();
}

std::string results_markdown(const std::vector<ResultRow>& rows, int jobs) {
  std::ostringstream out;
  out << "Solves ran with " << jobs << " parallel job(s); times are wall-clock seconds.\n\n";
  out << "| method | family | split | solved | nodes | time |\n";
  out << "|---|---|---|---|---|---|\n";
  char buf[128];
  for (const ResultRow& r : rows) {
    out << "| " << r.method << " | " << r.family << " | " << r.split << " | " << r.n_solved << "/" << r.n_instances
        << " | ";
    std::snprintf(buf, sizeof buf, "%.1f ± %.2f | %.3f ± %.2f |", r.geo_nodes, r.geo_std_nodes, r.geo_time,
                  r.geo_std_time);
    out << buf << "\n";
  }
  return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  std::vector<LoadedSet> sets;
  for (const InstanceSet& s : cfg.sets) {
    nlohmann::json manifest;
    LoadedSet ls;
    ls.instances = load_suite(s.dir, &manifest);
    ls.family = manifest.at("family").get<std::string>();
    ls.split = s.split;
    sets.push_back(std::move(ls));
  }

  // Every checkpoint is loaded before the first solve.
  std::map<std::pair<Method, std::string>, std::shared_ptr<const Model>> models;
  for (Method m : cfg.methods) {
    if (!is_learned(m)) continue;
    for (const LoadedSet& s : sets) {
      const auto& per = cfg.checkpoints.at(m);
      auto it = per.find(s.family);
      if (it == per.end()) it = per.find("*");
      if (it == per.end()) {
        throw ConfigError(std::string("no ") + to_string(m) + " checkpoint for family " + s.family);
      }
      if (models.count({m, s.family}) == 0) {
        models[{m, s.family}] = std::make_shared<const Model>(load_checkpoint(it->second.string()));
      }
    }
  }

  std::vector<Task> tasks;
  for (std::size_t si = 0; si < sets.size(); ++si) {
    for (std::size_t ii = 0; ii < sets[si].instances.size(); ++ii) {
      for (Method m : cfg.methods) tasks.push_back({si, ii, m});
    }
  }
  std::vector<InstanceResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto run_task = [&](const Task& t, InstanceResult& r) {
    const LoadedSet& set = sets[t.set];
    const MilpInstance& inst = set.instances[t.instance].instance;
    r.method = t.method;
    r.family = set.family;
    r.split = set.split;
    r.instance = set.instances[t.instance].name;
    SolveOptions opts;
    opts.limits = cfg.limits;
    opts.select = t.method == Method::kScipLikeEstimate ? SelectRule::kScipLike
                  : t.method == Method::kOracle         ? SelectRule::kPlain
                                                        : SelectRule::kHybrid;
    std::unique_ptr<NodeComparator> comp;
    switch (t.method) {
      case Method::kScipLikeEstimate:
      case Method::kPlainEstimate:
        comp = std::make_unique<EstimateComparator>();
        break;
      case Method::kOracle: {
        // x* comes from a pre-solve that is not part of the reported time.
        EstimateComparator est;
        SolveOptions pre;
        pre.limits = cfg.limits;
        const SolveStats first = solve(inst, est, pre);
        if (first.status != SolveStatus::kOptimal) {
          r.status = first.status;
          r.error = "x* pre-solve did not finish";
          return;
        }
        comp = std::make_unique<OracleComparator>(first.incumbent->values);
        break;
      }
      case Method::kSvm:
      case Method::kMlp:
      case Method::kGnn:
        comp = std::make_unique<ModelComparator>(models.at({t.method, set.family}));
        break;
    }
    const SolveStats st = solve(inst, *comp, opts);
    r.status = st.status;
    r.nodes = st.nodes_processed;
    r.time = st.wall_time;
    r.objective = st.incumbent ? st.incumbent->objective : kInf;
  };
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        run_task(tasks[i], results[i]);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ExperimentResult out;
  for (const InstanceResult& r : results) {
    if (!r.error.empty()) ++out.failures;
  }
  out.rows = aggregate(results);
  out.instances = std::move(results);
  if (!cfg.output_csv.empty()) write_file_bytes(cfg.output_csv.string(), results_csv(out.rows));
  if (!cfg.output_markdown.empty()) {
    write_file_bytes(cfg.output_markdown.string(), results_markdown(out.rows, cfg.jobs));
  }
  return out;
}

}  // namespace nodecomp
