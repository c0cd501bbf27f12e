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
#include <cmath>
#include <cstdlib>
#include <thread>

#include "nodecomp/errors.hpp"
#include "nodecomp/imitation.hpp"

namespace nodecomp {

const char* to_string(WeightFormula f) { return f == WeightFormula::kDepthRatio ? "depth-ratio" : "alt-parse"; }

WeightFormula weight_formula_from_string(const std::string& s) {
  if (s == "depth-ratio") return WeightFormula::kDepthRatio;
  if (s == "alt-parse") return WeightFormula::kAltParse;
  throw ConfigError("unknown weight formula '" + s + "'");
}

double sample_weight(int d1, int d2, WeightFormula formula) {
  if (d1 < 0 || d2 < 0) throw ConfigError("depths must be nonnegative");
  const double spread = 1.0 + std::abs(d1 - d2);
  const double shallow = std::max(1, std::min(d1, d2));
  if (formula == WeightFormula::kAltParse) return std::exp(spread) / shallow;
  return std::exp(spread / shallow);
}

CollectorComparator::CollectorComparator(std::vector<double> x_star, std::uint64_t instance_id,
                                         WeightFormula formula, EncodingConstants constants)
    : x_star_(std::move(x_star)), instance_id_(instance_id), formula_(formula), constants_(constants) {}

void CollectorComparator::begin_solve(const MilpInstance& inst) {
  inst_ = &inst;
  encoder_ = std::make_unique<BipartiteEncoder>(inst, constants_);
  graphs_.clear();
}

const NodeBipartiteGraph& CollectorComparator::graph_of(const BnbNode& node, double root_bound) {
  auto it = graphs_.find(node.id);
  if (it == graphs_.end()) it = graphs_.emplace(node.id, encoder_->encode(node, root_bound)).first;
  return it->second;
}

CompDecision CollectorComparator::compare(const BnbNode& a, const BnbNode& b, const TreeState& tree) {
  const std::int64_t ordinal = ordinal_++;
  const bool in_a = a.bounds.admits(x_star_, 1e-6);
  const bool in_b = b.bounds.admits(x_star_, 1e-6);
  if (!in_a && !in_b) return estimate_comp(a, b);
  const CompDecision oracle = oracle_comp(a, b, x_star_);
  Sample s;
  s.a.graph = graph_of(a, tree.root_bound);
  s.b.graph = graph_of(b, tree.root_bound);
  s.a.fixed = encode_fixed(*inst_, a, tree);
  s.b.fixed = encode_fixed(*inst_, b, tree);
  s.label = oracle == CompDecision::kFirstBetter ? 0 : 1;
  s.weight = sample_weight(a.depth, b.depth, formula_);
  s.instance_id = instance_id_;
  s.depth_a = a.depth;
  s.depth_b = b.depth;
  s.ordinal = ordinal;
  samples_.push_back(std::move(s));
  return opposite(oracle);
}

namespace {

std::vector<Sample> collect_one(const CollectItem& item, const CollectConfig& cfg, CollectLog& log) {
  log.id = item.id;
  log.name = item.name;
  SolveOptions first_opts;
  first_opts.select = SelectRule::kPlain;
  first_opts.limits = cfg.first_limits;
  first_opts.lp = cfg.lp;
  EstimateComparator estimate;
  const SolveStats first = solve(item.instance, estimate, first_opts);
  log.first_nodes = first.nodes_processed;
  if (first.status != SolveStatus::kOptimal) {
    log.skipped = true;
    log.reason = std::string("x* solve ended with ") + to_string(first.status);
    return {};
  }
  log.x_star_objective = first.incumbent->objective;

  CollectorComparator collector(first.incumbent->values, item.id, cfg.weight_formula, cfg.constants);
  SolveOptions opts;
  opts.select = SelectRule::kPlain;
  opts.limits.max_nodes = std::max<std::int64_t>(1, cfg.node_limit_factor * first.nodes_processed);
  opts.limits.max_seconds = cfg.first_limits.max_seconds > 0.0
                                ? cfg.first_limits.max_seconds * static_cast<double>(cfg.node_limit_factor)
                                : 0.0;
  opts.lp = cfg.lp;
  const SolveStats second = solve(item.instance, collector, opts);
  log.collect_nodes = second.nodes_processed;
  log.comparisons = collector.comparisons();
  log.samples = collector.samples().size();
  return std::move(collector.samples());
}

}  // namespace

SampleDataset collect(const std::vector<CollectItem>& items, const CollectConfig& cfg, std::vector<CollectLog>* log) {
  if (cfg.node_limit_factor <= 0) throw ConfigError("node limit factor must be positive");
  std::vector<std::vector<Sample>> per(items.size());
  std::vector<CollectLog> logs(items.size());
  std::vector<std::exception_ptr> errors(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        per[i] = collect_one(items[i], cfg, logs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(items.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SampleDataset ds;
  ds.split = cfg.split;
  nlohmann::json inst = nlohmann::json::array();
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (Sample& s : per[i]) ds.samples.push_back(std::move(s));
    nlohmann::json j = {{"id", logs[i].id}, {"name", logs[i].name}, {"skipped", logs[i].skipped},
                        {"first_nodes", logs[i].first_nodes}, {"collect_nodes", logs[i].collect_nodes},
                        {"samples", logs[i].samples}};
    if (logs[i].skipped) {
      j["reason"] = logs[i].reason;
    } else {
      j["x_star_objective"] = logs[i].x_star_objective;
    }
    inst.push_back(std::move(j));
  }
  ds.provenance = {{"weight_formula", to_string(cfg.weight_formula)},
                   {"node_limit_factor", cfg.node_limit_factor},
                   {"first_node_limit", cfg.first_limits.max_nodes},
                   {"x_star", "first incumbent proving optimality under estimate/plain"},
                   {"instances", std::move(inst)}};
  if (log != nullptr) *log = std::move(logs);
  return ds;
}

double evaluate_accuracy(const Model& model, const SampleDataset& ds) {
  if (ds.samples.empty()) throw ConfigError("accuracy of an empty dataset");
  std::vector<std::size_t> idx(ds.samples.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return evaluate_samples(model, ds, idx).accuracy;
}

}  // namespace nodecomp
