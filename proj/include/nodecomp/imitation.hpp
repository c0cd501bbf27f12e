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
#include <string>
#include <vector>

#include "nodecomp/bnb.hpp"
#include "nodecomp/models.hpp"
#include "nodecomp/sample.hpp"

namespace nodecomp {

enum class WeightFormula : std::uint8_t {
  kDepthRatio,  // exp((1 + |d1 - d2|) / max(1, min(d1, d2)))
  kAltParse,    // exp(1 + |d1 - d2|) / max(1, min(d1, d2))
};

const char* to_string(WeightFormula f);
WeightFormula weight_formula_from_string(const std::string& s);

double sample_weight(int d1, int d2, WeightFormula formula = WeightFormula::kDepthRatio);

struct CollectItem {
  std::uint64_t id = 0;
  std::string name;
  MilpInstance instance;
};

struct CollectConfig {
  SolveLimits first_limits;        // limits of the x* solve
  std::int64_t node_limit_factor = 4;
  WeightFormula weight_formula = WeightFormula::kDepthRatio;
  EncodingConstants constants;
  LpOptions lp;
  int jobs = 1;
  SplitTag split = SplitTag::kTrain;
};

// Per-instance collection outcome, in input order.
struct CollectLog {
  std::uint64_t id = 0;
  std::string name;
  bool skipped = false;
  std::string reason;
  double x_star_objective = 0.0;
  std::int64_t first_nodes = 0;
  std::int64_t collect_nodes = 0;
  std::int64_t comparisons = 0;
  std::size_t samples = 0;
};

// Collection comparator: asks the oracle, records a sample whenever it has
// a preference and answers the opposite; otherwise answers like the
// estimate comparator and records nothing.
class CollectorComparator final : public NodeComparator {
 public:
  CollectorComparator(std::vector<double> x_star, std::uint64_t instance_id, WeightFormula formula,
                      EncodingConstants constants);
  std::string_view name() const override { return "collector"; }
  void begin_solve(const MilpInstance& inst) override;
  CompDecision compare(const BnbNode& a, const BnbNode& b, const TreeState& tree) override;

  std::vector<Sample>& samples() { return samples_; }
  std::int64_t comparisons() const { return ordinal_; }

 private:
  const NodeBipartiteGraph& graph_of(const BnbNode& node, double root_bound);

  std::vector<double> x_star_;
  std::uint64_t instance_id_;
  WeightFormula formula_;
  EncodingConstants constants_;
  const MilpInstance* inst_ = nullptr;
  std::unique_ptr<BipartiteEncoder> encoder_;
  std::unordered_map<std::int64_t, NodeBipartiteGraph> graphs_;
  std::vector<Sample> samples_;
  std::int64_t ordinal_ = 0;
};

// Runs both solves per instance (parallel over instances when jobs > 1)
// and merges samples in input order. Instances whose x* solve does not
// reach optimality are skipped and logged.
SampleDataset collect(const std::vector<CollectItem>& items, const CollectConfig& cfg,
                      std::vector<CollectLog>* log = nullptr);

// Unweighted fraction of samples where the model's decision matches the
// oracle label. Throws ConfigError on an empty dataset.
double evaluate_accuracy(const Model& model, const SampleDataset& ds);

// Dataset file: container with magic "NODECDST", JSON manifest (version,
// split, provenance, counts, SHA-256 of the record stream) and records.
inline constexpr std::uint32_t kDatasetVersion = 1;
std::string dataset_bytes(const SampleDataset& ds);
SampleDataset dataset_from_bytes(const std::string& bytes);
void save_dataset(const SampleDataset& ds, const std::string& path);
SampleDataset load_dataset(const std::string& path);
// Content hash as recorded in the manifest.
std::string dataset_hash(const SampleDataset& ds);

}  // namespace nodecomp
