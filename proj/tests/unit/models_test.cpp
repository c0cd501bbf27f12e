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
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "nodecomp/errors.hpp"
#include "nodecomp/models.hpp"
#include "nodecomp/rng.hpp"
#include "oracles.hpp"

using namespace nodecomp;

namespace {

NodeBipartiteGraph random_graph(Rng& rng, std::size_t m, std::size_t n) {
  NodeBipartiteGraph g;
  g.num_cons = m;
  g.num_vars = n;
  g.cons_feats.resize(m * kConsFeatDim);
  g.var_feats.resize(n * kVarFeatDim);
  for (double& v : g.cons_feats) v = uniform_real(rng, -1.0, 1.0);
  for (double& v : g.var_feats) v = uniform_real(rng, -1.0, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (bernoulli(rng, 0.5)) {
        g.edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), uniform_real(rng, -1.0, 1.0)});
      }
    }
  }
  g.global_feats = {uniform_real(rng, -1.0, 1.0), uniform_real(rng, -1.0, 1.0)};
  return g;
}

NodeRepr random_repr(Rng& rng) {
  NodeRepr r;
  r.graph = random_graph(rng, 2 + static_cast<std::size_t>(uniform_int(rng, 0, 3)),
                         2 + static_cast<std::size_t>(uniform_int(rng, 0, 4)));
  for (double& v : r.fixed) v = uniform_real(rng, -2.0, 2.0);
  return r;
}

double mean_var_feat0(const NodeBipartiteGraph& g) {
  double s = 0.0;
  for (std::size_t j = 0; j < g.num_vars; ++j) s += g.var_feats[j * kVarFeatDim];
  return s / static_cast<double>(g.num_vars);
}

// Pairs labelled by which node has the lower hidden value, kept at least
// `margin` apart. The fixed-feature value is linear; the graph value is the
// mean of the first variable feature, with globals zeroed.
SampleDataset toy_dataset(std::uint64_t seed, int count, bool flip = false, bool graph_label = false,
                          double margin = 0.2) {
  Rng rng(seed);
  SampleDataset ds;
  while (static_cast<int>(ds.samples.size()) < count) {
    const int k = static_cast<int>(ds.samples.size());
    Sample s;
    s.a = random_repr(rng);
    s.b = random_repr(rng);
    double va, vb;
    if (graph_label) {
      s.a.graph.global_feats = {0.0, 0.0};
      s.b.graph.global_feats = {0.0, 0.0};
      va = mean_var_feat0(s.a.graph);
      vb = mean_var_feat0(s.b.graph);
    } else {
      va = s.a.fixed[1] + 0.5 * s.a.fixed[2];
      vb = s.b.fixed[1] + 0.5 * s.b.fixed[2];
    }
    if (std::abs(va - vb) < margin) continue;
    s.label = va <= vb ? 0 : 1;
    if (flip) s.label = 1 - s.label;
    s.weight = 1.0 + uniform01(rng);
    s.instance_id = static_cast<std::uint64_t>(k / 4);
    s.ordinal = k;
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Model random_model(ModelKind kind, std::uint64_t seed) {
  Model m;
  m.kind = kind;
  m.params = kind == ModelKind::kGnn ? make_gnn_params() : kind == ModelKind::kMlp ? make_mlp_params() : make_svm_params();
  Rng rng(seed);
  for (auto& [name, t] : m.params.entries()) {
    for (double& v : t.data) v = uniform_real(rng, -0.8, 0.8);
  }
  return m;
}

NodeBipartiteGraph permute(const NodeBipartiteGraph& g, Rng& rng) {
  std::vector<std::uint32_t> cp(g.num_cons), vp(g.num_vars);
  std::iota(cp.begin(), cp.end(), 0u);
  std::iota(vp.begin(), vp.end(), 0u);
  shuffle(cp, rng);
  shuffle(vp, rng);
  NodeBipartiteGraph p = g;
  for (std::size_t i = 0; i < g.num_cons; ++i) {
    std::copy_n(&g.cons_feats[i * kConsFeatDim], kConsFeatDim, &p.cons_feats[cp[i] * kConsFeatDim]);
  }
  for (std::size_t j = 0; j < g.num_vars; ++j) {
    std::copy_n(&g.var_feats[j * kVarFeatDim], kVarFeatDim, &p.var_feats[vp[j] * kVarFeatDim]);
  }
  for (GraphEdge& e : p.edges) {
    e.cons = cp[e.cons];
    e.var = vp[e.var];
  }
  shuffle(p.edges, rng);
  return p;
}

}  // namespace

TEST_CASE("architecture shapes") {
  const nn::ParamStore g = make_gnn_params();
  CHECK(g.get("gnn.cons_embed.w").shape == std::vector<std::size_t>{32, 3});
  CHECK(g.get("gnn.var_embed.w").shape == std::vector<std::size_t>{32, 6});
  CHECK(g.get("gnn.conv0.cons_self.w").shape[0] == 8);
  CHECK(g.get("gnn.conv1.var_self.w").shape[0] == 4);
  CHECK(g.get("gnn.conv2.var.b").shape == std::vector<std::size_t>{4});
  const nn::ParamStore m = make_mlp_params();
  CHECK(m.get("mlp.hidden.w").shape == std::vector<std::size_t>{32, 12});
  CHECK(m.get("mlp.out.w").shape == std::vector<std::size_t>{1, 32});
  CHECK(make_svm_params().get("svm.w").numel() == 12);
}

TEST_CASE("all-zero GNN parameters score the global features") {
  Rng rng(1);
  const nn::ParamStore zero = make_gnn_params();
  for (int k = 0; k < 20; ++k) {
    const NodeBipartiteGraph g = random_graph(rng, 3, 4);
    CHECK(gnn_score(zero, g) == doctest::Approx(std::hypot(g.global_feats[0], g.global_feats[1])));
  }
}

TEST_CASE("GNN score is nonnegative and permutation invariant") {
  Rng rng(2);
  for (int k = 0; k < 30; ++k) {
    const Model m = random_model(ModelKind::kGnn, 50 + k);
    const NodeBipartiteGraph g = random_graph(rng, 4, 6);
    const double s = gnn_score(m.params, g);
    CHECK(s >= 0.0);
    CHECK(std::abs(gnn_score(m.params, permute(g, rng)) - s) <= 1e-10 * std::max(1.0, s));
  }
}

TEST_CASE("GNN rejects malformed graphs") {
  const nn::ParamStore zero = make_gnn_params();
  Rng rng(3);
  NodeBipartiteGraph g = random_graph(rng, 2, 2);
  g.var_feats.pop_back();
  CHECK_THROWS_AS(gnn_score(zero, g), DimensionError);
  g = random_graph(rng, 2, 2);
  g.edges.push_back({5, 0, 1.0});
  CHECK_THROWS_AS(gnn_score(zero, g), DimensionError);
}

TEST_CASE("graph without edges or constraints still scores") {
  Rng rng(4);
  const Model m = random_model(ModelKind::kGnn, 9);
  NodeBipartiteGraph g = random_graph(rng, 0, 3);
  CHECK(g.edges.empty());
  CHECK(std::isfinite(gnn_score(m.params, g)));
}

TEST_CASE("siamese probability and decisions") {
  CHECK(siamese_prob(1.0, 3.0) == doctest::Approx(nn::sigmoid(-2.0)));
  CHECK(decision_from_prob(siamese_prob(1.0, 3.0)) == CompDecision::kFirstBetter);
  CHECK(decision_from_prob(0.5) == CompDecision::kFirstBetter);
  CHECK(decision_from_prob(0.5000001) == CompDecision::kSecondBetter);

  Rng rng(5);
  for (ModelKind kind : {ModelKind::kGnn, ModelKind::kMlp, ModelKind::kSvm}) {
    const Model m = random_model(kind, 77);
    for (int k = 0; k < 50; ++k) {
      const NodeRepr a = random_repr(rng);
      const NodeRepr b = random_repr(rng);
      const double fab = siamese_prob(m, a, b);
      const double fba = siamese_prob(m, b, a);
      CHECK(std::abs(fab + fba - 1.0) <= 1e-12);
      CHECK(siamese_prob(m, a, a) == 0.5);
      CHECK(model_nodecomp(m, a, a) == CompDecision::kFirstBetter);
      if (fab != 0.5) CHECK(model_nodecomp(m, a, b) != model_nodecomp(m, b, a));
      CHECK(model_nodecomp(m, a, b) != CompDecision::kEqual);
    }
  }
}

TEST_CASE("induced ranking has no cycles") {
  Rng rng(6);
  const Model m = random_model(ModelKind::kGnn, 8);
  for (int k = 0; k < 100; ++k) {
    const NodeRepr x = random_repr(rng), y = random_repr(rng), z = random_repr(rng);
    const bool xy = model_nodecomp(m, x, y) == CompDecision::kFirstBetter;
    const bool yz = model_nodecomp(m, y, z) == CompDecision::kFirstBetter;
    const bool xz = model_nodecomp(m, x, z) == CompDecision::kFirstBetter;
    if (xy && yz) CHECK(xz);
    if (!xy && !yz) CHECK_FALSE(xz);
  }
}

TEST_CASE("finite differences: GNN and MLP siamese losses") {
  Rng rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    const Model g = random_model(ModelKind::kGnn, 300 + trial);
    const NodeRepr a = random_repr(rng), b = random_repr(rng);
    const int label = trial % 2;
    auto check = testing_oracles::check_param_gradients(g.params, [&](nn::Tape& t) {
      return t.weighted_bce(t.sigmoid(t.sub(gnn_score_tape(t, a.graph), gnn_score_tape(t, b.graph))), label, 1.3);
    });
    CHECK(check.max_rel_error < 1e-4);
    const Model m = random_model(ModelKind::kMlp, 400 + trial);
    check = testing_oracles::check_param_gradients(m.params, [&](nn::Tape& t) {
      return t.weighted_bce(t.sigmoid(t.sub(mlp_score_tape(t, a.fixed), mlp_score_tape(t, b.fixed))), label, 0.7);
    });
    CHECK(check.max_rel_error < 1e-4);
  }
}

TEST_CASE("SVM separates linearly separable pairs") {
  const SampleDataset ds = toy_dataset(10, 200);
  TrainConfig cfg;
  cfg.val_fraction = 0.0;
  cfg.svm_epochs = 60;
  const Model m = svm_train(ds, cfg);
  std::vector<std::size_t> all(ds.samples.size());
  std::iota(all.begin(), all.end(), 0);
  CHECK(evaluate_samples(m, ds, all).accuracy == 1.0);
}

TEST_CASE("flipped labels flip learned decisions") {
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.adam.lr = 1e-2;
  for (ModelKind kind : {ModelKind::kSvm, ModelKind::kMlp, ModelKind::kGnn}) {
    const bool graph_label = kind == ModelKind::kGnn;
    const SampleDataset ds = toy_dataset(11, 160, false, graph_label);
    const SampleDataset flipped = toy_dataset(11, 160, true, graph_label);
    const Model m1 = train_model(kind, ds, cfg);
    const Model m2 = train_model(kind, flipped, cfg);
    int flips = 0, counted = 0;
    for (const Sample& s : ds.samples) {
      const double f1 = siamese_prob(m1, s.a, s.b);
      if (std::abs(f1 - 0.5) < 1e-9) continue;
      ++counted;
      flips += model_nodecomp(m1, s.a, s.b) != model_nodecomp(m2, s.a, s.b);
    }
    INFO(std::string(to_string(kind)));
    if (kind == ModelKind::kSvm) {
      CHECK(flips == counted);  // the hinge objective is odd in the labels
    } else {
      CHECK(flips >= 0.85 * counted);
    }
  }
}

TEST_CASE("split by instance does not leak") {
  const SampleDataset ds = toy_dataset(12, 200);
  auto [train, val] = split_by_instance(ds, 0.1, 3);
  CHECK(train.size() + val.size() == ds.samples.size());
  CHECK_FALSE(val.empty());
  for (std::size_t i : train) {
    for (std::size_t j : val) CHECK(ds.samples[i].instance_id != ds.samples[j].instance_id);
  }
  auto again = split_by_instance(ds, 0.1, 3);
  CHECK(again.first == train);
}

TEST_CASE("training rejects bad datasets") {
  SampleDataset empty;
  CHECK_THROWS_AS(train_model(ModelKind::kSvm, empty, {}), Error);
  SampleDataset bad = toy_dataset(13, 20);
  bad.samples[3].weight = 0.0;
  CHECK_THROWS_AS(train_model(ModelKind::kMlp, bad, {}), Error);
  bad = toy_dataset(13, 20);
  bad.samples[2].label = 2;
  CHECK_THROWS_AS(train_model(ModelKind::kGnn, bad, {}), Error);
}

TEST_CASE("checkpoints are deterministic and round trip") {
  const SampleDataset ds = toy_dataset(14, 120);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 99;
  for (ModelKind kind : {ModelKind::kSvm, ModelKind::kMlp, ModelKind::kGnn}) {
    const Model a = train_model(kind, ds, cfg);
    const Model b = train_model(kind, ds, cfg);
    const std::string bytes = checkpoint_bytes(a);
    CHECK(bytes == checkpoint_bytes(b));
    const Model back = model_from_checkpoint_bytes(bytes);
    CHECK(back.kind == kind);
    CHECK(back.params == a.params);
    CHECK(back.scaler == a.scaler);
    CHECK(checkpoint_bytes(back) == bytes);
    const nlohmann::json d = describe_model(back);
    CHECK(d["kind"] == to_string(kind));
    CHECK_THROWS_AS(model_from_checkpoint_bytes(bytes.substr(0, bytes.size() / 2)), FormatError);
    std::string corrupt = bytes;
    corrupt[0] = 'X';
    CHECK_THROWS_AS(model_from_checkpoint_bytes(corrupt), FormatError);
  }
}
