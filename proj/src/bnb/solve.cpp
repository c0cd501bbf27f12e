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

#include <chrono>
#include <cmath>
#include <ostream>

#include "json.hpp"

#include "nodecomp/bnb.hpp"
#include "nodecomp/errors.hpp"

namespace nodecomp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "OPTIMAL";
    case SolveStatus::kNodeLimit:
      return "NODE_LIMIT";
    case SolveStatus::kTimeLimit:
      return "TIME_LIMIT";
    case SolveStatus::kInfeasible:
      return "INFEASIBLE";
  }
  return "?";
}

double SolveStats::gap() const {
  if (!incumbent) return kInf;
  return (incumbent->objective - dual_bound) / std::max(1.0, std::abs(incumbent->objective));
}

void JsonlTraceWriter::on_node(const BnbNode& node, std::string_view action) {
  nlohmann::json j;
  j["event"] = "node";
  j["id"] = node.id;
  j["parent"] = node.parent_id ? nlohmann::json(*node.parent_id) : nlohmann::json(nullptr);
  j["depth"] = node.depth;
  j["bound"] = node.dual_bound;
  j["estimate"] = node.estimate;
  j["action"] = action;
  out_ << j.dump() << '\n';
}

void JsonlTraceWriter::on_compare(const BnbNode& a, const BnbNode& b, CompDecision decision) {
  nlohmann::json j;
  j["event"] = "compare";
  j["first"] = a.id;
  j["second"] = b.id;
  j["decision"] = to_string(decision);
  out_ << j.dump() << '\n';
}

namespace {

class ObservedComparator final : public NodeComparator {
 public:
  ObservedComparator(NodeComparator& inner, SolveObserver* observer) : inner_(inner), observer_(observer) {}
  std::string_view name() const override { return inner_.name(); }
  CompDecision compare(const BnbNode& a, const BnbNode& b, const TreeState& tree) override {
    ++calls;
    const CompDecision d = inner_.compare(a, b, tree);
    if (observer_ != nullptr) observer_->on_compare(a, b, d);
    return d;
  }
  std::int64_t calls = 0;

 private:
  NodeComparator& inner_;
  SolveObserver* observer_;
};

class Engine {
 public:
  Engine(const MilpInstance& inst, NodeComparator& comparator, const SolveOptions& opts)
      : inst_(inst),
        opts_(opts),
        comparator_(comparator),
        plugged_(comparator, opts.observer),
        estimate_(estimate_inner_, opts.observer),
        pc_(inst.num_vars()) {
    tree_.instance = &inst_;
  }

  SolveStats run() {
    start_ = std::chrono::steady_clock::now();
    inst_.validate();
    comparator_.begin_solve(inst_);

    auto root = std::make_shared<BnbNode>();
    root->id = next_id_++;
    evaluate(*root);
    if (root->lp.status == LpStatus::kInfeasible) {
      notify(*root, "infeasible");
      return finish(SolveStatus::kInfeasible);
    }
    if (root->lp.status == LpStatus::kUnbounded) throw Error("root LP relaxation is unbounded");
    root->dual_bound = root->lp.objective;
    root->estimate = compute_estimate(inst_, *root, root->lp.x, pc_);
    tree_.root_bound = root->dual_bound;
    notify(*root, "root");
    if (fractional_vars(inst_, root->lp.x).empty()) {
      accept_incumbent(*root);
      return finish(SolveStatus::kOptimal);
    }
    insert(root);

    const BnbNode* last_focused = nullptr;
    NodePtr focused_hold;
    while (!open_.empty()) {
      if (opts_.limits.max_nodes > 0 && stats_.nodes_processed >= opts_.limits.max_nodes) {
        return finish(SolveStatus::kNodeLimit);
      }
      if (opts_.limits.max_seconds > 0.0 && elapsed() >= opts_.limits.max_seconds) {
        return finish(SolveStatus::kTimeLimit);
      }
      std::size_t idx = 0;
      switch (opts_.select) {
        case SelectRule::kPlain:
          idx = select_plain(open_);
          break;
        case SelectRule::kScipLike:
          idx = select_scip_like(open_, last_focused);
          break;
        case SelectRule::kHybrid:
          idx = select_hybrid(open_, stats_.incumbent_count);
          break;
      }
      NodePtr node = open_.take(idx);
      if (stats_.incumbent && node->dual_bound >= stats_.incumbent->objective - kPruneTol) {
        notify(*node, "prune");
        continue;
      }
      tree_.plunge_depth = (last_focused != nullptr && node->parent_id == last_focused->id) ? tree_.plunge_depth + 1 : 0;
      focused_hold = node;
      last_focused = focused_hold.get();
      notify(*node, "branch");
      expand(*node);
    }
    return finish(stats_.incumbent ? SolveStatus::kOptimal : SolveStatus::kInfeasible);
  }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  void notify(const BnbNode& node, std::string_view action) {
    if (opts_.observer != nullptr) opts_.observer->on_node(node, action);
  }

  void evaluate(BnbNode& node) {
    try {
      node.lp = solve_lp(inst_, node.bounds, opts_.lp);
    } catch (const NumericalError& e) {
      throw NumericalError("node " + std::to_string(node.id) + " LP failed: " + e.what());
    }
    ++stats_.nodes_processed;
    stats_.lp_iterations += node.lp.iterations;
  }

  void accept_incumbent(const BnbNode& node) {
    const double obj = node.lp.objective;
    if (stats_.incumbent && obj >= stats_.incumbent->objective - kPruneTol) return;
    stats_.incumbent = Solution{node.lp.x, obj};
    ++stats_.incumbent_count;
    tree_.incumbent_objective = obj;
    tree_.incumbent_count = stats_.incumbent_count;
    notify(node, "incumbent");
    if (opts_.select == SelectRule::kHybrid && stats_.incumbent_count >= 2 && !switched_) {
      switched_ = true;
      sync_tree();
      open_.resort(estimate_, tree_);
    }
  }

  void sync_tree() {
    tree_.open_count = open_.size();
    tree_.nodes_processed = stats_.nodes_processed;
  }

  void insert(NodePtr node) {
    sync_tree();
    NodeComparator& ranking = switched_ ? static_cast<NodeComparator&>(estimate_) : plugged_;
    open_.insert(node, ranking, tree_);
    notify(*node, "insert");
  }

  void expand(const BnbNode& node) {
    auto [down, up] = branch(inst_, node, node.lp.x);
    for (BnbNode* child : {&down, &up}) {
      child->id = next_id_++;
      evaluate(*child);
      if (child->lp.status == LpStatus::kInfeasible) {
        notify(*child, "infeasible");
        continue;
      }
      if (child->lp.status == LpStatus::kUnbounded) throw Error("child LP unbounded under a bounded parent");
      child->dual_bound = child->lp.objective;
      pc_.update(*child->branch_var, *child->branch_dir, child->parent_bound, child->dual_bound,
                 child->branch_fraction);
      child->estimate = compute_estimate(inst_, *child, child->lp.x, pc_);
      if (fractional_vars(inst_, child->lp.x).empty()) {
        accept_incumbent(*child);
        continue;
      }
      if (stats_.incumbent && child->dual_bound >= stats_.incumbent->objective - kPruneTol) {
        notify(*child, "prune");
        continue;
      }
      insert(std::make_shared<BnbNode>(std::move(*child)));
    }
  }

  SolveStats finish(SolveStatus status) {
    stats_.status = status;
    stats_.comp_calls = plugged_.calls + estimate_.calls;
    if (status == SolveStatus::kOptimal) {
      stats_.dual_bound = stats_.incumbent->objective;
    } else if (status == SolveStatus::kInfeasible) {
      stats_.dual_bound = kInf;
    } else {
      double db = stats_.incumbent ? stats_.incumbent->objective : kInf;
      for (const NodePtr& n : open_.nodes()) db = std::min(db, n->dual_bound);
      stats_.dual_bound = db;
    }
    stats_.wall_time = elapsed();
    return stats_;
  }

  const MilpInstance& inst_;
  const SolveOptions& opts_;
  NodeComparator& comparator_;
  ObservedComparator plugged_;
  EstimateComparator estimate_inner_;
  ObservedComparator estimate_;
  PseudocostTable pc_;
  OpenList open_;
  TreeState tree_;
  SolveStats stats_;
  std::int64_t next_id_ = 0;
  bool switched_ = false;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

SolveStats solve(const MilpInstance& inst, NodeComparator& comparator, const SolveOptions& opts) {
  Engine engine(inst, comparator, opts);
  return engine.run();
}

}  // namespace nodecomp
