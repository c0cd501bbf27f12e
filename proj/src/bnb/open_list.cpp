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
#include <string>

#include "nodecomp/bnb.hpp"
#include "nodecomp/errors.hpp"

namespace nodecomp {

std::int64_t OpenList::insert(NodePtr node, NodeComparator& comp, const TreeState& tree) {
  std::size_t lo = 0, hi = nodes_.size();
  std::int64_t calls = 0;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    ++calls;
    if (comp.compare(*node, *nodes_[mid], tree) == CompDecision::kFirstBetter) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  nodes_.insert(nodes_.begin() + static_cast<std::ptrdiff_t>(lo), std::move(node));
  return calls;
}

void OpenList::resort(NodeComparator& comp, const TreeState& tree) {
  std::sort(nodes_.begin(), nodes_.end(), [](const NodePtr& a, const NodePtr& b) { return a->id < b->id; });
  std::stable_sort(nodes_.begin(), nodes_.end(), [&](const NodePtr& a, const NodePtr& b) {
    return comp.compare(*a, *b, tree) == CompDecision::kFirstBetter;
  });
}

NodePtr OpenList::take(std::size_t index) {
  if (index >= nodes_.size()) throw Error("open list index out of range");
  NodePtr n = std::move(nodes_[index]);
  nodes_.erase(nodes_.begin() + static_cast<std::ptrdiff_t>(index));
  return n;
}

const char* to_string(SelectRule r) {
  switch (r) {
    case SelectRule::kPlain:
      return "plain";
    case SelectRule::kScipLike:
      return "scip-like";
    case SelectRule::kHybrid:
      return "hybrid";
  }
  return "?";
}

SelectRule select_rule_from_string(std::string_view s) {
  if (s == "plain") return SelectRule::kPlain;
  if (s == "scip-like" || s == "scip_like") return SelectRule::kScipLike;
  if (s == "hybrid") return SelectRule::kHybrid;
  throw ConfigError("unknown selector '" + std::string(s) + "'");
}

std::size_t select_plain(const OpenList& open) {
  if (open.empty()) throw Error("node selection on an empty open list");
  return 0;
}

std::size_t select_scip_like(const OpenList& open, const BnbNode* last_focused) {
  if (open.empty()) throw Error("node selection on an empty open list");
  if (last_focused == nullptr) return 0;
  for (std::size_t i = 0; i < open.size(); ++i) {
    if (open.at(i)->parent_id == last_focused->id) return i;
  }
  if (last_focused->parent_id) {
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (open.at(i)->parent_id == last_focused->parent_id) return i;
    }
  }
  return 0;
}

std::size_t select_hybrid(const OpenList& open, int incumbent_count) {
  if (open.empty()) throw Error("node selection on an empty open list");
  if (incumbent_count < 2) return 0;
  std::size_t best = 0;
  for (std::size_t i = 1; i < open.size(); ++i) {
    const CompDecision d = estimate_comp(*open.at(i), *open.at(best));
    if (d == CompDecision::kFirstBetter || (d == CompDecision::kEqual && open.at(i)->id < open.at(best)->id)) {
      best = i;
    }
  }
  return best;
}

}  // namespace nodecomp
