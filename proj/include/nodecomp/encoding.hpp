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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nodecomp/bnb.hpp"
#include "nodecomp/milp.hpp"

namespace nodecomp {

inline constexpr std::size_t kConsFeatDim = 3;
inline constexpr std::size_t kVarFeatDim = 6;
inline constexpr std::size_t kGlobalFeatDim = 2;
inline constexpr std::size_t kFixedFeatDim = 12;

// Normalization constants of the bipartite encoding. Stored in model
// checkpoints so inference reproduces training inputs.
struct EncodingConstants {
  double bound_clip = 1e4;
  double bound_scale = 1e4;
};

struct GraphEdge {
  std::uint32_t cons = 0;
  std::uint32_t var = 0;
  double coef = 0.0;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

// Node state as a constraint/variable bipartite graph plus a detached
// global vertex.
//   cons row: [rhs / ||(a_i, b_i)||, is_ge, is_le]  (equality sets both)
//   var row:  [c_j / ||c||, lb, ub, is_binary, is_integer, is_continuous]
//             with bounds clipped to +-bound_clip and divided by bound_scale
//   edge:     a_ij / ||(a_i, b_i)||
//   global:   [estimate, dual_bound] / (|root bound| + 1)
struct NodeBipartiteGraph {
  std::size_t num_cons = 0;
  std::size_t num_vars = 0;
  std::vector<double> cons_feats;  // num_cons x 3, row-major
  std::vector<double> var_feats;   // num_vars x 6, row-major
  std::vector<GraphEdge> edges;
  std::array<double, kGlobalFeatDim> global_feats{};

  friend bool operator==(const NodeBipartiteGraph&, const NodeBipartiteGraph&) = default;
};

using FixedFeatures = std::array<double, kFixedFeatDim>;

// Feature positions inside FixedFeatures.
namespace fixed_feat {
inline constexpr std::size_t kDepth = 0;
inline constexpr std::size_t kDualBound = 1;
inline constexpr std::size_t kEstimate = 2;
inline constexpr std::size_t kIncumbentGap = 3;
inline constexpr std::size_t kHasIncumbent = 4;
inline constexpr std::size_t kBranchDir = 5;
inline constexpr std::size_t kBranchFraction = 6;
inline constexpr std::size_t kParentFracRatio = 7;
inline constexpr std::size_t kPlungeDepth = 8;
inline constexpr std::size_t kIncumbentCount = 9;
inline constexpr std::size_t kLogOpen = 10;
inline constexpr std::size_t kLogProcessed = 11;
}  // namespace fixed_feat

// Precomputes the instance-level part of the encoding (row norms, edge
// weights, objective scaling); encode() then fills in node-local bounds and
// the global vertex.
class BipartiteEncoder {
 public:
  explicit BipartiteEncoder(const MilpInstance& inst, EncodingConstants constants = {});

  // Throws Error when the node LP is not optimal.
  NodeBipartiteGraph encode(const BnbNode& node, double root_bound) const;

  const EncodingConstants& constants() const { return constants_; }

 private:
  const MilpInstance& inst_;
  EncodingConstants constants_;
  NodeBipartiteGraph base_;
};

NodeBipartiteGraph encode_bipartite(const MilpInstance& inst, const BnbNode& node, double root_bound,
                                    EncodingConstants constants = {});

FixedFeatures encode_fixed(const MilpInstance& inst, const BnbNode& node, const TreeState& tree);

// Binary layout, little-endian: u64 num_cons, u64 num_vars, u64 num_edges,
// f64 cons block, f64 var block, per edge (u32 cons, u32 var, f64 coef),
// f64 x 2 global features.
void write_graph(std::ostream& out, const NodeBipartiteGraph& g);
NodeBipartiteGraph read_graph(std::istream& in);

}  // namespace nodecomp
