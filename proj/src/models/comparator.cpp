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

#include "nodecomp/errors.hpp"
#include "nodecomp/models.hpp"

namespace nodecomp {

ModelComparator::ModelComparator(std::shared_ptr<const Model> model) : model_(std::move(model)) {
  if (!model_) throw ConfigError("model comparator needs a model");
}

std::string_view ModelComparator::name() const { return to_string(model_->kind); }

void ModelComparator::begin_solve(const MilpInstance& inst) {
  inst_ = &inst;
  encoder_ = std::make_unique<BipartiteEncoder>(inst, model_->constants);
  cache_.clear();
}

NodeRepr ModelComparator::represent(const BnbNode& node, const TreeState& tree) const {
  if (!encoder_) throw Error("model comparator used outside a solve");
  NodeRepr r;
  r.graph = encoder_->encode(node, tree.root_bound);
  r.fixed = encode_fixed(*inst_, node, tree);
  return r;
}

double ModelComparator::score(const BnbNode& node, const TreeState& tree) {
  if (!encoder_) throw Error("model comparator used outside a solve");
  if (model_->kind == ModelKind::kGnn) {
    // The bipartite encoding depends only on the node, so its score does too.
    auto it = cache_.find(node.id);
    if (it != cache_.end()) return it->second;
    const double s = gnn_score(model_->params, encoder_->encode(node, tree.root_bound));
    cache_.emplace(node.id, s);
    return s;
  }
  const FixedFeatures x = model_->scaler.apply(encode_fixed(*inst_, node, tree));
  return model_->kind == ModelKind::kMlp ? mlp_score(model_->params, x) : svm_score(model_->params, x);
}

CompDecision ModelComparator::compare(const BnbNode& a, const BnbNode& b, const TreeState& tree) {
  return decision_from_prob(siamese_prob(score(a, tree), score(b, tree)));
}

}  // namespace nodecomp
