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
#include <memory>
#include <string>
#include <unordered_map>

#include "json.hpp"

#include "nodecomp/bnb.hpp"
#include "nodecomp/encoding.hpp"
#include "nodecomp/nn.hpp"
#include "nodecomp/sample.hpp"

namespace nodecomp {

enum class ModelKind : std::uint8_t { kGnn, kMlp, kSvm };

const char* to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

inline constexpr std::size_t kGnnEmbedWidth = 32;
inline constexpr std::array<std::size_t, 3> kGnnConvWidths = {8, 4, 4};
inline constexpr std::size_t kMlpHidden = 32;

// Empty parameter sets with the fixed architecture shapes.
nn::ParamStore make_gnn_params();
nn::ParamStore make_mlp_params();
nn::ParamStore make_svm_params();

// Per-feature standardization of FixedFeatures for the SVM and MLP.
struct FixedScaler {
  FixedFeatures mean{};
  FixedFeatures scale{};  // 1 / std, or 1 for constant features

  static FixedScaler identity();
  FixedFeatures apply(const FixedFeatures& f) const;

  friend bool operator==(const FixedScaler&, const FixedScaler&) = default;
};

struct Model {
  ModelKind kind = ModelKind::kGnn;
  nn::ParamStore params;
  EncodingConstants constants;
  FixedScaler scaler = FixedScaler::identity();
  std::uint64_t seed = 0;
  nlohmann::json training = nlohmann::json::object();
};

// Scoring functions g. Lower is better.
double gnn_score(const nn::ParamStore& params, const NodeBipartiteGraph& graph);
double mlp_score(const nn::ParamStore& params, const FixedFeatures& standardized);
double svm_score(const nn::ParamStore& params, const FixedFeatures& standardized);
double model_score(const Model& model, const NodeRepr& node);

// Tape builders returning the scalar score node; used by training and the
// gradient checks.
nn::Tape::Id gnn_score_tape(nn::Tape& tape, const NodeBipartiteGraph& graph);
nn::Tape::Id mlp_score_tape(nn::Tape& tape, const FixedFeatures& standardized);

// f = sigmoid(g(a) - g(b)).
double siamese_prob(double score_a, double score_b);
double siamese_prob(const Model& model, const NodeRepr& a, const NodeRepr& b);

// kFirstBetter iff f <= 0.5; never kEqual.
CompDecision decision_from_prob(double f);
CompDecision model_nodecomp(const Model& model, const NodeRepr& a, const NodeRepr& b);

struct TrainConfig {
  int epochs = 30;
  int batch_size = 16;
  nn::AdamConfig adam;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
  double svm_lambda = 1e-4;
  int svm_epochs = 30;
  EncodingConstants constants;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainReport {
  int best_epoch = -1;
  double best_val_accuracy = 0.0;
  double best_val_loss = 0.0;
  std::size_t train_samples = 0;
  std::size_t val_samples = 0;
  std::vector<EpochRecord> history;
};

// Splits sample indices 90/10 (by default) on instance id, seeded. Throws
// Error if an instance id would land on both sides.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_by_instance(const SampleDataset& ds,
                                                                                double val_fraction,
                                                                                std::uint64_t seed);

Model svm_train(const SampleDataset& ds, const TrainConfig& cfg, TrainReport* report = nullptr);
Model mlp_train(const SampleDataset& ds, const TrainConfig& cfg, TrainReport* report = nullptr);
Model gnn_train(const SampleDataset& ds, const TrainConfig& cfg, TrainReport* report = nullptr);
Model train_model(ModelKind kind, const SampleDataset& ds, const TrainConfig& cfg, TrainReport* report = nullptr);

// Weighted mean BCE and unweighted accuracy over a subset of samples.
struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};
EvalResult evaluate_samples(const Model& model, const SampleDataset& ds, const std::vector<std::size_t>& idx);

// Checkpoint: container with magic "NODECKPT", JSON manifest (architecture,
// normalization constants, scaler, seed, training metadata) and the
// parameter blob.
inline constexpr std::uint32_t kCheckpointVersion = 1;
std::string checkpoint_bytes(const Model& model);
Model model_from_checkpoint_bytes(const std::string& bytes);
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);
nlohmann::json describe_model(const Model& model);

// Plugs a trained model into the engine. GNN scores are cached per node id
// for the duration of a solve.
class ModelComparator final : public NodeComparator {
 public:
  explicit ModelComparator(std::shared_ptr<const Model> model);
  std::string_view name() const override;
  CompDecision compare(const BnbNode& a, const BnbNode& b, const TreeState& tree) override;
  void begin_solve(const MilpInstance& inst) override;

  NodeRepr represent(const BnbNode& node, const TreeState& tree) const;

 private:
  double score(const BnbNode& node, const TreeState& tree);

  std::shared_ptr<const Model> model_;
  std::unique_ptr<BipartiteEncoder> encoder_;
  const MilpInstance* inst_ = nullptr;
  std::unordered_map<std::int64_t, double> cache_;
};

}  // namespace nodecomp
