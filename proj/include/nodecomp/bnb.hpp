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
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nodecomp/lp.hpp"
#include "nodecomp/milp.hpp"

namespace nodecomp {

inline constexpr double kIntegralityTol = 1e-6;
inline constexpr double kPruneTol = 1e-9;

enum class BranchDir : std::int8_t { kDown = -1, kUp = 1 };

struct BnbNode {
  std::int64_t id = 0;
  std::optional<std::int64_t> parent_id;
  int depth = 0;
  LocalBounds bounds;  // cumulative from the root
  LpResult lp;
  double dual_bound = 0.0;
  double estimate = 0.0;
  std::optional<int> branch_var;
  std::optional<BranchDir> branch_dir;

  // Parent-side facts about the branching that created this node.
  double parent_bound = 0.0;
  double branch_fraction = 0.0;    // f_j of the branched variable at the parent
  int parent_num_fractional = 0;   // fractional integer variables at the parent LP
};

using NodePtr = std::shared_ptr<const BnbNode>;

class PseudocostTable {
 public:
  explicit PseudocostTable(std::size_t num_vars = 0);

  // Records the per-unit bound change of one branching. Negative gains are
  // clamped to zero.
  void update(int var, BranchDir dir, double parent_bound, double child_bound, double fraction);

  // Average per-unit gain; falls back to the mean over all variables with
  // history in that direction, then to 1.0.
  double average(int var, BranchDir dir) const;

  std::int64_t count(int var, BranchDir dir) const;
  double sum(int var, BranchDir dir) const;
  std::size_t num_vars() const { return down_sum_.size(); }

 private:
  std::vector<double> down_sum_, up_sum_;
  std::vector<std::int64_t> down_count_, up_count_;
  double total_down_ = 0.0, total_up_ = 0.0;
  std::int64_t obs_down_ = 0, obs_up_ = 0;
};

// Fractional part test shared by branching and integrality checks.
bool is_fractional(double v);

// Integer variables whose LP value is fractional, in index order.
std::vector<int> fractional_vars(const MilpInstance& inst, std::span<const double> x);

// dual_bound + sum over fractional integer variables of
// min(psi_down * f, psi_up * (1 - f)).
double compute_estimate(const MilpInstance& inst, const BnbNode& node, std::span<const double> lp_x,
                        const PseudocostTable& pc);

// Splits on the most fractional integer variable (lowest index on ties).
// Returns (down child, up child) with LP fields unset and ids 0; throws
// Error if lp_x is integral.
std::pair<BnbNode, BnbNode> branch(const MilpInstance& inst, const BnbNode& node, std::span<const double> lp_x);

enum class CompDecision : std::uint8_t { kFirstBetter, kSecondBetter, kEqual };

const char* to_string(CompDecision d);
CompDecision opposite(CompDecision d);

CompDecision estimate_comp(const BnbNode& a, const BnbNode& b);
CompDecision best_first_comp(const BnbNode& a, const BnbNode& b);
CompDecision dfs_comp(const BnbNode& a, const BnbNode& b);

// Prefers the node whose cumulative bounds admit x_star; falls back to
// estimate_comp when neither does. Throws Error if both do.
CompDecision oracle_comp(const BnbNode& a, const BnbNode& b, std::span<const double> x_star);

// What comparators may look at besides the two nodes.
struct TreeState {
  const MilpInstance* instance = nullptr;
  double root_bound = 0.0;
  std::optional<double> incumbent_objective;
  int incumbent_count = 0;
  std::size_t open_count = 0;
  std::int64_t nodes_processed = 0;
  int plunge_depth = 0;
};

class NodeComparator {
 public:
  virtual ~NodeComparator() = default;
  virtual std::string_view name() const = 0;
  virtual CompDecision compare(const BnbNode& a, const BnbNode& b, const TreeState& tree) = 0;
  // Called once per solve before the root is processed.
  virtual void begin_solve(const MilpInstance& /*inst*/) {}
};

class EstimateComparator final : public NodeComparator {
 public:
  std::string_view name() const override { return "estimate"; }
  CompDecision compare(const BnbNode& a, const BnbNode& b, const TreeState&) override { return estimate_comp(a, b); }
};

class BestFirstComparator final : public NodeComparator {
 public:
  std::string_view name() const override { return "best-first"; }
  CompDecision compare(const BnbNode& a, const BnbNode& b, const TreeState&) override {
    return best_first_comp(a, b);
  }
};

class DfsComparator final : public NodeComparator {
 public:
  std::string_view name() const override { return "dfs"; }
  CompDecision compare(const BnbNode& a, const BnbNode& b, const TreeState&) override { return dfs_comp(a, b); }
};

class OracleComparator final : public NodeComparator {
 public:
  explicit OracleComparator(std::vector<double> x_star) : x_star_(std::move(x_star)) {}
  std::string_view name() const override { return "oracle"; }
  CompDecision compare(const BnbNode& a, const BnbNode& b, const TreeState&) override {
    return oracle_comp(a, b, x_star_);
  }
  std::span<const double> x_star() const { return x_star_; }

 private:
  std::vector<double> x_star_;
};

// Open nodes kept in rank order (best first). Insertion places a node after
// every element it does not beat, so equal nodes leave in FIFO order.
class OpenList {
 public:
  // Returns the number of comparator calls made.
  std::int64_t insert(NodePtr node, NodeComparator& comp, const TreeState& tree);

  // Re-ranks under a new comparator; equal nodes keep id order.
  void resort(NodeComparator& comp, const TreeState& tree);

  NodePtr take(std::size_t index);
  const NodePtr& at(std::size_t index) const { return nodes_[index]; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  std::span<const NodePtr> nodes() const { return nodes_; }

 private:
  std::vector<NodePtr> nodes_;
};

enum class SelectRule : std::uint8_t { kPlain, kScipLike, kHybrid };

const char* to_string(SelectRule r);
SelectRule select_rule_from_string(std::string_view s);

// Index into the open list of the node to process next. All throw Error on
// an empty list.
std::size_t select_plain(const OpenList& open);
std::size_t select_scip_like(const OpenList& open, const BnbNode* last_focused);
// Plain ranking while fewer than two incumbents were found, otherwise the
// best node under estimate_comp (FIFO by id among equals).
std::size_t select_hybrid(const OpenList& open, int incumbent_count);

enum class SolveStatus : std::uint8_t { kOptimal, kNodeLimit, kTimeLimit, kInfeasible };

const char* to_string(SolveStatus s);

struct SolveLimits {
  std::int64_t max_nodes = 100000;
  double max_seconds = 0.0;  // 0 = unlimited
};

struct SolveStats {
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<Solution> incumbent;
  std::int64_t nodes_processed = 0;  // LP relaxations solved at tree nodes
  std::int64_t comp_calls = 0;
  double wall_time = 0.0;
  double dual_bound = -kInf;  // global lower bound when the solve stopped
  int incumbent_count = 0;
  std::int64_t lp_iterations = 0;

  double gap() const;
};

// Receives engine events; the JSON-lines trace writer is one implementation.
class SolveObserver {
 public:
  virtual ~SolveObserver() = default;
  // action: "root", "branch", "insert", "prune", "infeasible", "incumbent"
  virtual void on_node(const BnbNode& node, std::string_view action) = 0;
  virtual void on_compare(const BnbNode& a, const BnbNode& b, CompDecision decision) = 0;
};

class JsonlTraceWriter final : public SolveObserver {
 public:
  explicit JsonlTraceWriter(std::ostream& out) : out_(out) {}
  void on_node(const BnbNode& node, std::string_view action) override;
  void on_compare(const BnbNode& a, const BnbNode& b, CompDecision decision) override;

 private:
  std::ostream& out_;
};

struct SolveOptions {
  SelectRule select = SelectRule::kPlain;
  SolveLimits limits;
  LpOptions lp;
  SolveObserver* observer = nullptr;
};

// Branch and bound over LP relaxations. Both children of a branching are
// solved when created, so every open node carries its own LP bound and
// estimate. Throws NumericalError (never prunes silently) if a node LP
// fails.
SolveStats solve(const MilpInstance& inst, NodeComparator& comparator, const SolveOptions& opts = {});

}  // namespace nodecomp
