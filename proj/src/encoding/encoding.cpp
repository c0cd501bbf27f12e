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

#include "nodecomp/binary_io.hpp"
#include "nodecomp/encoding.hpp"
#include "nodecomp/errors.hpp"

namespace nodecomp {

namespace {

double clip_bound(double v, const EncodingConstants& k) {
  return std::clamp(v, -k.bound_clip, k.bound_clip) / k.bound_scale;
}

}  // namespace

BipartiteEncoder::BipartiteEncoder(const MilpInstance& inst, EncodingConstants constants)
    : inst_(inst), constants_(constants) {
  const std::size_t m = inst.num_cons();
  const std::size_t n = inst.num_vars();
  base_.num_cons = m;
  base_.num_vars = n;
  base_.cons_feats.assign(m * kConsFeatDim, 0.0);
  base_.var_feats.assign(n * kVarFeatDim, 0.0);
  base_.edges.reserve(inst.num_nonzeros());

  for (std::size_t i = 0; i < m; ++i) {
    const Row& row = inst.rows[i];
    double sq = row.rhs * row.rhs;
    for (const RowEntry& e : row.entries) sq += e.coef * e.coef;
    const double norm = sq > 0.0 ? std::sqrt(sq) : 1.0;
    double* f = &base_.cons_feats[i * kConsFeatDim];
    f[0] = row.rhs / norm;
    f[1] = row.sense != Sense::kLe ? 1.0 : 0.0;
    f[2] = row.sense != Sense::kGe ? 1.0 : 0.0;
    for (const RowEntry& e : row.entries) {
      base_.edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(e.index), e.coef / norm});
    }
  }

  double csq = 0.0;
  for (double c : inst.objective) csq += c * c;
  const double cnorm = csq > 0.0 ? std::sqrt(csq) : 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double* f = &base_.var_feats[j * kVarFeatDim];
    f[0] = inst.objective[j] / cnorm;
    f[1] = clip_bound(inst.lower[j], constants_);
    f[2] = clip_bound(inst.upper[j], constants_);
    f[3] = inst.vtypes[j] == VarType::kBinary ? 1.0 : 0.0;
    f[4] = inst.vtypes[j] == VarType::kInteger ? 1.0 : 0.0;
    f[5] = inst.vtypes[j] == VarType::kContinuous ? 1.0 : 0.0;
  }
}

NodeBipartiteGraph BipartiteEncoder::encode(const BnbNode& node, double root_bound) const {
  if (node.lp.status != LpStatus::kOptimal) throw Error("cannot encode a node without an optimal LP");
  NodeBipartiteGraph g = base_;
  for (const BoundOverride& o : node.bounds.overrides()) {
    double* f = &g.var_feats[static_cast<std::size_t>(o.var) * kVarFeatDim];
    f[1] = clip_bound(std::max(inst_.lower[o.var], o.lb), constants_);
    f[2] = clip_bound(std::min(inst_.upper[o.var], o.ub), constants_);
  }
  const double scale = std::abs(root_bound) + 1.0;
  g.global_feats = {node.estimate / scale, node.dual_bound / scale};
  return g;
}

NodeBipartiteGraph encode_bipartite(const MilpInstance& inst, const BnbNode& node, double root_bound,
                                    EncodingConstants constants) {
  return BipartiteEncoder(inst, constants).encode(node, root_bound);
}

FixedFeatures encode_fixed(const MilpInstance& inst, const BnbNode& node, const TreeState& tree) {
  namespace ff = fixed_feat;
  FixedFeatures f{};
  const double scale = std::abs(tree.root_bound) + 1.0;
  f[ff::kDepth] = node.depth;
  f[ff::kDualBound] = node.dual_bound / scale;
  f[ff::kEstimate] = node.estimate / scale;
  if (tree.incumbent_objective) {
    f[ff::kIncumbentGap] = (*tree.incumbent_objective - node.dual_bound) / (std::abs(*tree.incumbent_objective) + 1.0);
    f[ff::kHasIncumbent] = 1.0;
  }
  if (node.branch_dir) f[ff::kBranchDir] = *node.branch_dir == BranchDir::kUp ? 1.0 : -1.0;
  f[ff::kBranchFraction] = node.branch_var ? node.branch_fraction : 0.0;
  const double num_int = std::max<std::size_t>(1, inst.num_integer_vars());
  f[ff::kParentFracRatio] = node.parent_id ? node.parent_num_fractional / num_int : 0.0;
  f[ff::kPlungeDepth] = tree.plunge_depth;
  f[ff::kIncumbentCount] = tree.incumbent_count;
  f[ff::kLogOpen] = std::log1p(static_cast<double>(tree.open_count));
  f[ff::kLogProcessed] = std::log1p(static_cast<double>(tree.nodes_processed));
  for (double& v : f) {
    if (!std::isfinite(v)) v = 0.0;
  }
  return f;
}

void write_graph(std::ostream& out, const NodeBipartiteGraph& g) {
  binio::put_u64(out, g.num_cons);
  binio::put_u64(out, g.num_vars);
  binio::put_u64(out, g.edges.size());
  for (double v : g.cons_feats) binio::put_f64(out, v);
  for (double v : g.var_feats) binio::put_f64(out, v);
  for (const GraphEdge& e : g.edges) {
    binio::put_u32(out, e.cons);
    binio::put_u32(out, e.var);
    binio::put_f64(out, e.coef);
  }
  for (double v : g.global_feats) binio::put_f64(out, v);
}

NodeBipartiteGraph read_graph(std::istream& in) {
  constexpr std::uint64_t kMaxDim = 1ULL << 28;
  NodeBipartiteGraph g;
  g.num_cons = binio::get_u64(in);
  g.num_vars = binio::get_u64(in);
  const std::uint64_t ne = binio::get_u64(in);
  if (g.num_cons > kMaxDim || g.num_vars > kMaxDim || ne > kMaxDim) throw FormatError("graph dimensions out of range");
  g.cons_feats.resize(g.num_cons * kConsFeatDim);
  g.var_feats.resize(g.num_vars * kVarFeatDim);
  for (double& v : g.cons_feats) v = binio::get_f64(in);
  for (double& v : g.var_feats) v = binio::get_f64(in);
  g.edges.resize(ne);
  for (GraphEdge& e : g.edges) {
    e.cons = binio::get_u32(in);
    e.var = binio::get_u32(in);
    e.coef = binio::get_f64(in);
    if (e.cons >= g.num_cons || e.var >= g.num_vars) throw FormatError("graph edge index out of range");
  }
  for (double& v : g.global_feats) v = binio::get_f64(in);
  return g;
}

}  // namespace nodecomp
