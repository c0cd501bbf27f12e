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
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "nodecomp/bench.hpp"
#include "nodecomp/errors.hpp"

using namespace nodecomp;

namespace {

// Independent long-double recomputation of the shifted geometric mean.
long double reference_geomean(const std::vector<double>& v, double shift) {
  long double s = 0.0L;
  for (double x : v) s += std::log(static_cast<long double>(x) + shift);
  return std::exp(s / static_cast<long double>(v.size())) - shift;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("nodecomp_bench_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("shifted geometric mean") {
  const std::vector<double> v{3.0, 8.0};
  CHECK(shifted_geomean(v) == 5.0);
  for (double x : {0.0, 1.0, 17.0, 12345.0, 0.25}) {
    const std::vector<double> one{x};
    CHECK(shifted_geomean(one) == x);
    CHECK(geo_std(one) == 1.0);
  }
  const std::vector<double> same(9, 42.0);
  CHECK(geo_std(same) == 1.0);
  CHECK(shifted_geomean(same) == doctest::Approx(42.0).epsilon(1e-14));
  CHECK_THROWS_AS(shifted_geomean(std::vector<double>{}), ConfigError);
  CHECK_THROWS_AS(geo_std(std::vector<double>{}), ConfigError);
  CHECK_THROWS_AS(shifted_geomean(std::vector<double>{1.0, -2.0}), ConfigError);
  CHECK(shifted_geomean(std::vector<double>{0.0, 3.0}, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("geomean agrees with a high-precision recomputation") {
  std::vector<double> v;
  for (int k = 1; k <= 200; ++k) v.push_back(std::fmod(k * 37.0, 101.0) * 13.0);
  for (double shift : {1.0, 10.0}) {
    const long double ref = reference_geomean(v, shift);
    CHECK(std::abs(shifted_geomean(v, shift) - static_cast<double>(ref)) <= 1e-12 * static_cast<double>(ref));
  }
  // geo_std from its definition.
  long double mean = 0.0L;
  for (double x : v) mean += std::log(static_cast<long double>(x) + 1.0L);
  mean /= v.size();
  long double var = 0.0L;
  for (double x : v) {
    const long double d = std::log(static_cast<long double>(x) + 1.0L) - mean;
    var += d * d;
  }
  const double ref_std = static_cast<double>(std::exp(std::sqrt(var / v.size())));
  CHECK(geo_std(v) == doctest::Approx(ref_std).epsilon(1e-12));
}

TEST_CASE("method names") {
  for (Method m : {Method::kScipLikeEstimate, Method::kPlainEstimate, Method::kOracle, Method::kSvm, Method::kMlp,
                   Method::kGnn}) {
    CHECK(method_from_string(to_string(m)) == m);
  }
  CHECK(std::string(report_label(Method::kScipLikeEstimate)) == "default scip");
  CHECK(is_learned(Method::kGnn));
  CHECK_FALSE(is_learned(Method::kOracle));
  CHECK_THROWS_AS(method_from_string("RANDOM"), ConfigError);
}

TEST_CASE("aggregation counts only solved instances") {
  std::vector<InstanceResult> rs;
  auto add = [&](Method m, const char* fam, const char* split, SolveStatus st, std::int64_t nodes, std::string err = {}) {
    InstanceResult r;
    r.method = m;
    r.family = fam;
    r.split = split;
    r.status = st;
    r.nodes = nodes;
    r.time = 0.5;
    r.error = std::move(err);
    rs.push_back(r);
  };
  add(Method::kOracle, "gisp", "test", SolveStatus::kOptimal, 3);
  add(Method::kOracle, "gisp", "test", SolveStatus::kOptimal, 8);
  add(Method::kOracle, "gisp", "test", SolveStatus::kNodeLimit, 1000);
  add(Method::kOracle, "gisp", "test", SolveStatus::kOptimal, 1, "boom");
  add(Method::kOracle, "gisp", "transfer", SolveStatus::kOptimal, 7);
  add(Method::kPlainEstimate, "gisp", "test", SolveStatus::kOptimal, 11);
  const std::vector<ResultRow> rows = aggregate(rs);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].method == "oracle");
  CHECK(rows[0].n_instances == 4);
  CHECK(rows[0].n_solved == 2);
  CHECK(rows[0].geo_nodes == 5.0);
  CHECK(rows[1].split == "transfer");
  CHECK(rows[1].geo_nodes == 7.0);
  CHECK(rows[1].geo_std_nodes == 1.0);
  CHECK(rows[2].method == "estimate");

  const std::string csv = results_csv(rows);
  std::istringstream in(csv);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "method,family,split,n_instances,n_solved,geo_nodes,geo_std_nodes,geo_time,geo_std_time");
  CHECK(first.rfind("oracle,gisp,test,4,2,5.000000,", 0) == 0);
  CHECK(results_csv(rows) == csv);
  CHECK(results_markdown(rows, 1).find("oracle") != std::string::npos);
}

TEST_CASE("experiment config validation") {
  const nlohmann::json base = {{"version", 1},
                               {"sets", {{{"dir", "suite"}, {"split", "test"}}}},
                               {"methods", {"PLAIN_ESTIMATE", "ORACLE"}},
                               {"output_csv", "out.csv"}};
  const ExperimentConfig cfg = experiment_config_from_json(base, "/base");
  CHECK(cfg.sets[0].dir == std::filesystem::path("/base/suite"));
  CHECK(cfg.output_csv == std::filesystem::path("/base/out.csv"));
  CHECK(cfg.limits.max_nodes == 100000);
  CHECK(experiment_config_from_json(to_json(cfg)).methods == cfg.methods);

  nlohmann::json bad = base;
  bad["version"] = 2;
  CHECK_THROWS_AS(experiment_config_from_json(bad), ConfigError);
  bad = base;
  bad["methods"] = {"GNN"};
  CHECK_THROWS_AS(experiment_config_from_json(bad), ConfigError);
  bad = base;
  bad.erase("sets");
  CHECK_THROWS_AS(experiment_config_from_json(bad), ConfigError);
  bad = base;
  bad["jobs"] = 0;
  CHECK_THROWS_AS(experiment_config_from_json(bad), ConfigError);
}

TEST_CASE("experiment runs end to end and is reproducible") {
  const auto dir = fresh_dir("run");
  GenConfig gen;
  gen.family = Family::kMaxsat;
  gen.count = 4;
  gen.seed = 5;
  gen_suite(gen, dir / "suite");

  nlohmann::json j = {{"sets", {{{"dir", "suite"}, {"split", "test"}}}},
                      {"methods", {"SCIP_LIKE_ESTIMATE", "PLAIN_ESTIMATE", "ORACLE"}},
                      {"output_csv", "a.csv"},
                      {"output_markdown", "a.md"}};
  ExperimentConfig cfg = experiment_config_from_json(j, dir);
  const ExperimentResult r1 = run_experiment(cfg);
  CHECK(r1.failures == 0);
  REQUIRE(r1.rows.size() == 3);
  for (const ResultRow& row : r1.rows) {
    CHECK(row.family == "maxsat");
    CHECK(row.n_solved == 4);
  }
  // Every method reaches the same optimum.
  REQUIRE(r1.instances.size() == 12);
  std::map<std::string, double> optimum;
  for (const InstanceResult& r : r1.instances) {
    CHECK(r.status == SolveStatus::kOptimal);
    const auto [it, fresh] = optimum.emplace(r.instance, r.objective);
    if (!fresh) CHECK(r.objective == doctest::Approx(it->second));
  }
  CHECK(optimum.size() == 4);
  CHECK(std::filesystem::exists(dir / "a.md"));

  cfg.output_csv = dir / "b.csv";
  cfg.jobs = 2;
  const ExperimentResult r2 = run_experiment(cfg);
  REQUIRE(r2.rows.size() == r1.rows.size());
  for (std::size_t k = 0; k < r1.rows.size(); ++k) {
    CHECK(r1.rows[k].geo_nodes == r2.rows[k].geo_nodes);
    CHECK(r1.rows[k].geo_std_nodes == r2.rows[k].geo_std_nodes);
  }
  CHECK_FALSE(read_all(dir / "a.csv").empty());

  // Missing checkpoint files fail before any solve writes output.
  j["methods"] = {"GNN"};
  j["checkpoints"] = {{"GNN", "missing.ckpt"}};
  j["output_csv"] = "c.csv";
  const ExperimentConfig missing = experiment_config_from_json(j, dir);
  CHECK_THROWS_AS(run_experiment(missing), Error);
  CHECK_FALSE(std::filesystem::exists(dir / "c.csv"));
  std::filesystem::remove_all(dir);
}
