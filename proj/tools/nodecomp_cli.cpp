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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "nodecomp/bench.hpp"
#include "nodecomp/bnb.hpp"
#include "nodecomp/container.hpp"
#include "nodecomp/errors.hpp"
#include "nodecomp/imitation.hpp"
#include "nodecomp/instance_gen.hpp"
#include "nodecomp/models.hpp"

using namespace nodecomp;

namespace {

int cmd_generate(const std::string& family, const std::string& size_class, int n_min, int n_max, int count,
                 std::uint64_t seed, const std::string& out) {
  GenConfig cfg;
  cfg.family = family_from_string(family);
  cfg.size_class = size_class_from_string(size_class);
  cfg.n_min = n_min;
  cfg.n_max = n_max;
  cfg.count = count;
  cfg.seed = seed;
  const nlohmann::json manifest = gen_suite(cfg, out);
  std::printf("wrote %d instance(s) to %s\n", count, out.c_str());
  return 0;
}

struct SolveArgs {
  std::string instance;
  std::string comparator = "estimate";
  std::string checkpoint;
  std::string select = "plain";
  std::string trace;
  std::int64_t limit_nodes = 100000;
  double limit_seconds = 0.0;
};

int cmd_solve(const SolveArgs& a) {
  const MilpInstance inst = read_instance(std::filesystem::path(a.instance));
  SolveOptions opts;
  opts.select = select_rule_from_string(a.select);
  opts.limits.max_nodes = a.limit_nodes;
  opts.limits.max_seconds = a.limit_seconds;

  std::unique_ptr<NodeComparator> comp;
  if (a.comparator == "estimate") {
    comp = std::make_unique<EstimateComparator>();
  } else if (a.comparator == "best-first") {
    comp = std::make_unique<BestFirstComparator>();
  } else if (a.comparator == "dfs") {
    comp = std::make_unique<DfsComparator>();
  } else if (a.comparator == "oracle") {
    EstimateComparator est;
    SolveOptions pre;
    pre.limits = opts.limits;
    const SolveStats first = solve(inst, est, pre);
    if (first.status != SolveStatus::kOptimal) throw Error("oracle pre-solve did not reach optimality");
    comp = std::make_unique<OracleComparator>(first.incumbent->values);
  } else if (a.comparator == "model") {
    if (a.checkpoint.empty()) throw ConfigError("--comparator model needs --checkpoint");
    comp = std::make_unique<ModelComparator>(std::make_shared<const Model>(load_checkpoint(a.checkpoint)));
  } else {
    throw ConfigError("unknown comparator '" + a.comparator + "'");
  }

  std::ofstream trace_file;
  std::unique_ptr<JsonlTraceWriter> trace;
  if (!a.trace.empty()) {
    trace_file.open(a.trace);
    if (!trace_file) throw Error("cannot open trace file '" + a.trace + "'");
    trace = std::make_unique<JsonlTraceWriter>(trace_file);
    opts.observer = trace.get();
  }
  const SolveStats st = solve(inst, *comp, opts);
  std::printf("status: %s\n", to_string(st.status));
  if (st.incumbent) {
    std::printf("objective: %.17g\n", st.incumbent->objective);
  } else {
    std::printf("objective: none\n");
  }
  std::printf("nodes: %lld\n", static_cast<long long>(st.nodes_processed));
  std::printf("comparisons: %lld\n", static_cast<long long>(st.comp_calls));
  std::printf("time: %.6f\n", st.wall_time);
  return 0;
}

struct CollectArgs {
  std::vector<std::string> dirs;
  std::string out;
  std::string split = "train";
  std::string weight_formula = "depth-ratio";
  std::int64_t limit_nodes = 100000;
  int jobs = 1;
};

int cmd_collect(const CollectArgs& a) {
  std::vector<CollectItem> items;
  nlohmann::json sources = nlohmann::json::array();
  for (const std::string& dir : a.dirs) {
    nlohmann::json manifest;
    for (SuiteInstance& s : load_suite(dir, &manifest)) items.push_back({s.seed, s.name, std::move(s.instance)});
    sources.push_back({{"family", manifest.at("family")},
                       {"size_class", manifest.at("size_class")},
                       {"master_seed", manifest.at("master_seed")},
                       {"count", manifest.at("count")}});
  }
  CollectConfig cfg;
  cfg.first_limits.max_nodes = a.limit_nodes;
  cfg.weight_formula = weight_formula_from_string(a.weight_formula);
  cfg.split = split_tag_from_string(a.split);
  cfg.jobs = a.jobs;
  std::vector<CollectLog> log;
  SampleDataset ds = collect(items, cfg, &log);
  ds.provenance["sources"] = sources;
  for (const CollectLog& l : log) {
    if (l.skipped) std::fprintf(stderr, "warning: skipped %s: %s\n", l.name.c_str(), l.reason.c_str());
  }
  save_dataset(ds, a.out);
  std::printf("samples: %zu\nsha256: %s\n", ds.samples.size(), dataset_hash(ds).c_str());
  return 0;
}

struct TrainArgs {
  std::string dataset;
  std::string model = "gnn";
  std::string out;
  TrainConfig cfg;
};

int cmd_train(const TrainArgs& a) {
  const SampleDataset ds = load_dataset(a.dataset);
  TrainReport rep;
  const Model m = train_model(model_kind_from_string(a.model), ds, a.cfg, &rep);
  save_checkpoint(m, a.out);
  std::printf("best epoch: %d\nvalidation accuracy: %.4f\nvalidation loss: %.6f\n", rep.best_epoch,
              rep.best_val_accuracy, rep.best_val_loss);
  return 0;
}

struct EvaluateArgs {
  std::string config;
  std::string checkpoint;
  std::string dataset;
  std::int64_t limit_nodes = 0;
  double limit_seconds = 0.0;
  int jobs = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_evaluate(const EvaluateArgs& a) {
  if (!a.dataset.empty()) {
    if (a.checkpoint.empty()) throw ConfigError("--dataset needs --checkpoint");
    const Model m = load_checkpoint(a.checkpoint);
    std::printf("accuracy: %.6f\n", evaluate_accuracy(m, load_dataset(a.dataset)));
    return 0;
  }
  if (a.config.empty()) throw ConfigError("evaluate needs --config (or --dataset with --checkpoint)");
  ExperimentConfig cfg = load_experiment_config(a.config);
  if (a.limit_nodes > 0) cfg.limits.max_nodes = a.limit_nodes;
  if (a.limit_seconds > 0.0) cfg.limits.max_seconds = a.limit_seconds;
  if (a.jobs > 0) cfg.jobs = a.jobs;
  if (a.seed_set) cfg.seed = a.seed;
  const ExperimentResult res = run_experiment(cfg);
  std::fputs(results_csv(res.rows).c_str(), stdout);
  for (const InstanceResult& r : res.instances) {
    if (!r.error.empty()) {
      std::fprintf(stderr, "error: %s on %s: %s\n", to_string(r.method), r.instance.c_str(), r.error.c_str());
    }
  }
  return res.failures == 0 ? 0 : 1;
}

int cmd_describe(const std::string& checkpoint) {
  std::printf("%s\n", describe_model(load_checkpoint(checkpoint)).dump(2).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned node comparison for branch and bound"};
  app.require_subcommand(1);

  std::string family = "gisp", size_class = "train_test", gen_out;
  int n_min = 0, n_max = 0, count = 0;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("generate", "Write a seeded instance suite");
  gen->add_option("--family", family, "fcmcnf | maxsat | gisp")->required();
  gen->add_option("--size-class", size_class, "train_test | transfer");
  gen->add_option("--n-min", n_min, "Smallest node count (default: desk range)");
  gen->add_option("--n-max", n_max, "Largest node count (default: desk range)");
  gen->add_option("--count", count)->required();
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out)->required();

  SolveArgs sa;
  auto* sol = app.add_subcommand("solve", "Solve one instance");
  sol->add_option("--instance", sa.instance)->required();
  sol->add_option("--comparator", sa.comparator, "estimate | best-first | dfs | oracle | model");
  sol->add_option("--checkpoint", sa.checkpoint);
  sol->add_option("--select", sa.select, "plain | scip-like | hybrid");
  sol->add_option("--trace", sa.trace, "JSON-lines solve trace output");
  sol->add_option("--limit-nodes", sa.limit_nodes);
  sol->add_option("--limit-seconds", sa.limit_seconds);

  CollectArgs ca;
  auto* col = app.add_subcommand("collect", "Collect oracle samples from instance suites");
  col->add_option("--instances", ca.dirs, "Suite directory (repeatable)")->required();
  col->add_option("--out", ca.out)->required();
  col->add_option("--split", ca.split, "train | test");
  col->add_option("--weight-formula", ca.weight_formula, "depth-ratio | alt-parse");
  col->add_option("--limit-nodes", ca.limit_nodes);
  col->add_option("--jobs", ca.jobs);

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train a node scoring model");
  tr->add_option("--dataset", ta.dataset)->required();
  tr->add_option("--model", ta.model, "gnn | mlp | svm");
  tr->add_option("--out", ta.out)->required();
  tr->add_option("--epochs", ta.cfg.epochs);
  tr->add_option("--batch-size", ta.cfg.batch_size);
  tr->add_option("--lr", ta.cfg.adam.lr);
  tr->add_option("--seed", ta.cfg.seed);
  tr->add_option("--svm-epochs", ta.cfg.svm_epochs);

  EvaluateArgs ea;
  auto* ev = app.add_subcommand("evaluate", "Run an experiment config, or score a model on a dataset");
  ev->add_option("--config", ea.config);
  ev->add_option("--checkpoint", ea.checkpoint);
  ev->add_option("--dataset", ea.dataset);
  ev->add_option("--limit-nodes", ea.limit_nodes);
  ev->add_option("--limit-seconds", ea.limit_seconds);
  ev->add_option("--jobs", ea.jobs);
  auto* seed_opt = ev->add_option("--seed", ea.seed);

  std::string describe_ckpt;
  auto* desc = app.add_subcommand("model-describe", "Print a checkpoint's architecture");
  desc->add_option("--checkpoint", describe_ckpt)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  ea.seed_set = seed_opt->count() > 0;

  try {
    if (*gen) return cmd_generate(family, size_class, n_min, n_max, count, gen_seed, gen_out);
    if (*sol) return cmd_solve(sa);
    if (*col) return cmd_collect(ca);
    if (*tr) return cmd_train(ta);
    if (*ev) return cmd_evaluate(ea);
    if (*desc) return cmd_describe(describe_ckpt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
