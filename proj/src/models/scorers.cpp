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
#include <string>

#include "nodecomp/errors.hpp"
#include "nodecomp/models.hpp"

namespace nodecomp {

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kGnn:
      return "gnn";
    case ModelKind::kMlp:
      return "mlp";
    case ModelKind::kSvm:
      return "svm";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "gnn") return ModelKind::kGnn;
  if (s == "mlp") return ModelKind::kMlp;
  if (s == "svm") return ModelKind::kSvm;
  throw ConfigError("unknown model kind '" + s + "'");
}

nn::ParamStore make_gnn_params() {
  nn::ParamStore p;
  p.add("gnn.cons_embed.w", {kGnnEmbedWidth, kConsFeatDim});
  p.add("gnn.cons_embed.b", {kGnnEmbedWidth});
  p.add("gnn.var_embed.w", {kGnnEmbedWidth, kVarFeatDim});
  p.add("gnn.var_embed.b", {kGnnEmbedWidth});
  std::size_t in = kGnnEmbedWidth;
  for (std::size_t k = 0; k < kGnnConvWidths.size(); ++k) {
    const std::size_t out = kGnnConvWidths[k];
    const std::string pre = "gnn.conv" + std::to_string(k);
    // var -> cons half: neighbours are variables (width in).
    p.add(pre + ".cons_self.w", {out, in});
    p.add(pre + ".cons_neigh.w", {out, in});
    p.add(pre + ".cons.b", {out});
    // cons -> var half: neighbours are the updated constraints (width out).
    p.add(pre + ".var_self.w", {out, in});
    p.add(pre + ".var_neigh.w", {out, out});
    p.add(pre + ".var.b", {out});
    in = out;
  }
  return p;
}

nn::ParamStore make_mlp_params() {
  nn::ParamStore p;
  p.add("mlp.hidden.w", {kMlpHidden, kFixedFeatDim});
  p.add("mlp.hidden.b", {kMlpHidden});
  p.add("mlp.out.w", {1, kMlpHidden});
  p.add("mlp.out.b", {1});
  return p;
}

nn::ParamStore make_svm_params() {
  nn::ParamStore p;
  p.add("svm.w", {kFixedFeatDim});
  p.add("svm.b", {1});
  return p;
}

FixedScaler FixedScaler::identity() {
  FixedScaler s;
  s.scale.fill(1.0);
  return s;
}

FixedFeatures FixedScaler::apply(const FixedFeatures& f) const {
  FixedFeatures out{};
  for (std::size_t k = 0; k < kFixedFeatDim; ++k) out[k] = (f[k] - mean[k]) * scale[k];
  return out;
}

nn::Tape::Id gnn_score_tape(nn::Tape& t, const NodeBipartiteGraph& graph) {
  const std::size_t m = graph.num_cons, n = graph.num_vars;
  if (graph.cons_feats.size() != m * kConsFeatDim || graph.var_feats.size() != n * kVarFeatDim) {
    throw DimensionError("graph feature blocks do not match their dimensions");
  }
  std::vector<nn::EdgeTriplet> to_cons, to_var;
  to_cons.reserve(graph.edges.size());
  to_var.reserve(graph.edges.size());
  for (const GraphEdge& e : graph.edges) {
    if (e.cons >= m || e.var >= n) throw DimensionError("graph edge index out of range");
    to_cons.push_back({e.cons, e.var, e.coef});
    to_var.push_back({e.var, e.cons, e.coef});
  }

  auto c = t.relu(t.dense(t.constant(nn::Tensor::of_matrix(m, kConsFeatDim, graph.cons_feats)),
                          t.param("gnn.cons_embed.w"), t.param("gnn.cons_embed.b")));
  auto v = t.relu(t.dense(t.constant(nn::Tensor::of_matrix(n, kVarFeatDim, graph.var_feats)),
                          t.param("gnn.var_embed.w"), t.param("gnn.var_embed.b")));
  for (std::size_t k = 0; k < kGnnConvWidths.size(); ++k) {
    const std::string pre = "gnn.conv" + std::to_string(k);
    auto msg_c = t.matmul_t(t.edge_aggregate(v, to_cons, m), t.param(pre + ".cons_neigh.w"));
    auto c_new = t.relu(t.add(t.dense(c, t.param(pre + ".cons_self.w"), t.param(pre + ".cons.b")), msg_c));
    auto msg_v = t.matmul_t(t.edge_aggregate(c_new, to_var, n), t.param(pre + ".var_neigh.w"));
    auto v_new = t.relu(t.add(t.dense(v, t.param(pre + ".var_self.w"), t.param(pre + ".var.b")), msg_v));
    c = c_new;
    v = v_new;
  }
  auto globals = t.constant(nn::Tensor::of_vector({graph.global_feats[0], graph.global_feats[1]}));
  return t.l2_norm(t.concat({t.mean_rows(c), t.mean_rows(v), globals}));
}

nn::Tape::Id mlp_score_tape(nn::Tape& t, const FixedFeatures& x) {
  auto in = t.constant(nn::Tensor::of_vector(std::vector<double>(x.begin(), x.end())));
  auto h = t.relu(t.dense(in, t.param("mlp.hidden.w"), t.param("mlp.hidden.b")));
  return t.dense(h, t.param("mlp.out.w"), t.param("mlp.out.b"));
}

double gnn_score(const nn::ParamStore& params, const NodeBipartiteGraph& graph) {
  nn::Tape t(&params);
  return t.scalar(gnn_score_tape(t, graph));
}

double mlp_score(const nn::ParamStore& params, const FixedFeatures& x) {
  nn::Tape t(&params);
  return t.scalar(mlp_score_tape(t, x));
}

double svm_score(const nn::ParamStore& params, const FixedFeatures& x) {
  const nn::Tensor& w = params.get("svm.w");
  if (w.data.size() != kFixedFeatDim) throw DimensionError("svm weight has wrong width");
  double s = params.get("svm.b").data.at(0);
  for (std::size_t k = 0; k < kFixedFeatDim; ++k) s += w.data[k] * x[k];
  return s;
}

double model_score(const Model& model, const NodeRepr& node) {
  switch (model.kind) {
    case ModelKind::kGnn:
      return gnn_score(model.params, node.graph);
    case ModelKind::kMlp:
      return mlp_score(model.params, model.scaler.apply(node.fixed));
    case ModelKind::kSvm:
      return svm_score(model.params, model.scaler.apply(node.fixed));
  }
  throw Error("unknown model kind");
}

double siamese_prob(double score_a, double score_b) { return nn::sigmoid(score_a - score_b); }

double siamese_prob(const Model& model, const NodeRepr& a, const NodeRepr& b) {
  return siamese_prob(model_score(model, a), model_score(model, b));
}

CompDecision decision_from_prob(double f) {
  return f <= 0.5 ? CompDecision::kFirstBetter : CompDecision::kSecondBetter;
}

CompDecision model_nodecomp(const Model& model, const NodeRepr& a, const NodeRepr& b) {
  return decision_from_prob(siamese_prob(model, a, b));
}

}  // namespace nodecomp
