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
#include <array>
#include <set>

#include "nodecomp/errors.hpp"
#include "nodecomp/models.hpp"
#include "nodecomp/rng.hpp"

namespace nodecomp {

namespace {

FixedScaler fit_scaler(const SampleDataset& ds, const std::vector<std::size_t>& idx) {
  FixedScaler s = FixedScaler::identity();
  if (idx.empty()) return s;
  FixedFeatures sum{}, sq{};
  double count = 0.0;
  for (std::size_t i : idx) {
    for (const FixedFeatures* f : {&ds.samples[i].a.fixed, &ds.samples[i].b.fixed}) {
      for (std::size_t k = 0; k < kFixedFeatDim; ++k) {
        sum[k] += (*f)[k];
        sq[k] += (*f)[k] * (*f)[k];
      }
      count += 1.0;
    }
  }
  for (std::size_t k = 0; k < kFixedFeatDim; ++k) {
    s.mean[k] = sum[k] / count;
    const double var = std::max(0.0, sq[k] / count - s.mean[k] * s.mean[k]);
    s.scale[k] = var > 1e-12 ? 1.0 / std::sqrt(var) : 1.0;
  }
  return s;
}

int label_of(CompDecision d) { return d == CompDecision::kFirstBetter ? 0 : 1; }

void check_dataset(const SampleDataset& ds) {
  if (ds.samples.empty()) throw ConfigError("training dataset is empty");
  for (const Sample& s : ds.samples) {
    if (s.label != 0 && s.label != 1) throw FormatError("sample label outside {0,1}");
    if (!(s.weight > 0.0) || !std::isfinite(s.weight)) throw FormatError("sample weight must be positive");
  }
}

bool improves(const EvalResult& r, int best_epoch, const TrainReport& rep) {
  if (best_epoch < 0) return true;
  if (r.accuracy > rep.best_val_accuracy) return true;
  return r.accuracy == rep.best_val_accuracy && r.loss < rep.best_val_loss;
}

void record_training(Model& m, const TrainConfig& cfg, const TrainReport& rep) {
  m.training = {
      {"epochs", m.kind == ModelKind::kSvm ? cfg.svm_epochs : cfg.epochs},
      {"batch_size", cfg.batch_size},
      {"learning_rate", cfg.adam.lr},
      {"svm_lambda", cfg.svm_lambda},
      {"val_fraction", cfg.val_fraction},
      {"best_epoch", rep.best_epoch},
      {"best_val_accuracy", rep.best_val_accuracy},
      {"best_val_loss", rep.best_val_loss},
      {"train_samples", rep.train_samples},
      {"val_samples", rep.val_samples},
  };
}

// Siamese training of a tape-built scorer with weighted BCE and Adam.
Model train_siamese(ModelKind kind, const SampleDataset& ds, const TrainConfig& cfg, TrainReport* out) {
  check_dataset(ds);
  if (cfg.batch_size <= 0 || cfg.epochs <= 0) throw ConfigError("epochs and batch size must be positive");
  auto [train_idx, val_idx] = split_by_instance(ds, cfg.val_fraction, cfg.seed);
  if (val_idx.empty()) val_idx = train_idx;

  Model model;
  model.kind = kind;
  model.seed = cfg.seed;
  model.constants = cfg.constants;
  model.params = kind == ModelKind::kGnn ? make_gnn_params() : make_mlp_params();
  model.params.init_glorot(cfg.seed);
  if (kind == ModelKind::kMlp) model.scaler = fit_scaler(ds, train_idx);

  // Standardized fixed features are reused every epoch.
  std::vector<std::pair<FixedFeatures, FixedFeatures>> fixed;
  if (kind == ModelKind::kMlp) {
    fixed.reserve(ds.samples.size());
    for (const Sample& s : ds.samples) fixed.emplace_back(model.scaler.apply(s.a.fixed), model.scaler.apply(s.b.fixed));
  }

  TrainReport rep;
  rep.train_samples = train_idx.size();
  rep.val_samples = val_idx.size();
  Model best = model;
  nn::AdamState adam(model.params, cfg.adam);
  nn::ParamStore grads = model.params.zeros_like();
  Rng rng(derive_seed(cfg.seed, 0x7261696eULL));
  std::vector<std::size_t> order = train_idx;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle(order, rng);
    double epoch_loss = 0.0, epoch_weight = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      grads.fill(0.0);
      double wsum = 0.0, lsum = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const Sample& s = ds.samples[order[k]];
        nn::Tape t(&model.params, &grads);
        nn::Tape::Id sa, sb;
        if (kind == ModelKind::kGnn) {
          sa = gnn_score_tape(t, s.a.graph);
          sb = gnn_score_tape(t, s.b.graph);
        } else {
          sa = mlp_score_tape(t, fixed[order[k]].first);
          sb = mlp_score_tape(t, fixed[order[k]].second);
        }
        const auto loss = t.weighted_bce(t.sigmoid(t.sub(sa, sb)), s.label, s.weight);
        t.backward(loss);
        lsum += t.scalar(loss);
        wsum += s.weight;
      }
      if (!std::isfinite(lsum)) throw NumericalError("training loss is not finite");
      grads.scale(1.0 / wsum);
      nn::adam_step(model.params, grads, adam);
      epoch_loss += lsum;
      epoch_weight += wsum;
    }
    const EvalResult r = evaluate_samples(model, ds, val_idx);
    rep.history.push_back({epoch, epoch_loss / epoch_weight, r.loss, r.accuracy});
    if (improves(r, rep.best_epoch, rep)) {
      rep.best_epoch = epoch;
      rep.best_val_accuracy = r.accuracy;
      rep.best_val_loss = r.loss;
      best.params = model.params;
    }
  }
  record_training(best, cfg, rep);
  if (out != nullptr) *out = rep;
  return best;
}

}  // namespace

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_by_instance(const SampleDataset& ds,
                                                                                double val_fraction,
                                                                                std::uint64_t seed) {
  if (val_fraction < 0.0 || val_fraction >= 1.0) throw ConfigError("validation fraction must be in [0, 1)");
  std::set<std::uint64_t> id_set;
  for (const Sample& s : ds.samples) id_set.insert(s.instance_id);
  std::vector<std::uint64_t> ids(id_set.begin(), id_set.end());
  Rng rng(derive_seed(seed, 0x73706c6974ULL));
  shuffle(ids, rng);
  std::size_t n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(ids.size())));
  if (val_fraction > 0.0 && n_val == 0 && ids.size() >= 2) n_val = 1;
  const std::set<std::uint64_t> val_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_val));

  std::vector<std::size_t> train, val;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    (val_ids.count(ds.samples[i].instance_id) ? val : train).push_back(i);
  }
  std::set<std::uint64_t> seen_train;
  for (std::size_t i : train) seen_train.insert(ds.samples[i].instance_id);
  for (std::size_t i : val) {
    if (seen_train.count(ds.samples[i].instance_id)) throw Error("instance leaked across the validation split");
  }
  return {std::move(train), std::move(val)};
}

EvalResult evaluate_samples(const Model& model, const SampleDataset& ds, const std::vector<std::size_t>& idx) {
  EvalResult r;
  if (idx.empty()) return r;
  double wsum = 0.0, lsum = 0.0;
  std::size_t correct = 0;
  for (std::size_t i : idx) {
    const Sample& s = ds.samples[i];
    const double f = siamese_prob(model, s.a, s.b);
    lsum += nn::weighted_bce(f, s.label, s.weight);
    wsum += s.weight;
    if (label_of(decision_from_prob(f)) == s.label) ++correct;
  }
  r.loss = lsum / wsum;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(idx.size());
  return r;
}

Model svm_train(const SampleDataset& ds, const TrainConfig& cfg, TrainReport* out) {
  check_dataset(ds);
  if (cfg.svm_lambda <= 0.0 || cfg.svm_epochs <= 0) throw ConfigError("svm lambda and epochs must be positive");
  auto [train_idx, val_idx] = split_by_instance(ds, cfg.val_fraction, cfg.seed);
  if (val_idx.empty()) val_idx = train_idx;

  Model model;
  model.kind = ModelKind::kSvm;
  model.seed = cfg.seed;
  model.constants = cfg.constants;
  model.params = make_svm_params();
  model.scaler = fit_scaler(ds, train_idx);

  // Difference features; y = +1 when the second node is better, so a
  // positive margin means g(a) > g(b).
  std::vector<FixedFeatures> diff(ds.samples.size());
  double mean_w = 0.0;
  for (std::size_t i : train_idx) mean_w += ds.samples[i].weight;
  mean_w /= static_cast<double>(std::max<std::size_t>(train_idx.size(), 1));
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const FixedFeatures a = model.scaler.apply(ds.samples[i].a.fixed);
    const FixedFeatures b = model.scaler.apply(ds.samples[i].b.fixed);
    for (std::size_t k = 0; k < kFixedFeatDim; ++k) diff[i][k] = a[k] - b[k];
  }

  const double lambda = cfg.svm_lambda;
  const double radius = 1.0 / std::sqrt(lambda);
  std::array<double, kFixedFeatDim> w{}, avg{};
  double steps = 0.0;
  TrainReport rep;
  rep.train_samples = train_idx.size();
  rep.val_samples = val_idx.size();
  Model best = model;
  Rng rng(derive_seed(cfg.seed, 0x73766dULL));
  std::vector<std::size_t> order = train_idx;

  for (int epoch = 1; epoch <= cfg.svm_epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t i : order) {
      steps += 1.0;
      const double eta = 1.0 / (lambda * steps);
      const double y = ds.samples[i].label == 0 ? -1.0 : 1.0;
      double margin = 0.0;
      for (std::size_t k = 0; k < kFixedFeatDim; ++k) margin += w[k] * diff[i][k];
      for (double& v : w) v *= 1.0 - eta * lambda;
      if (y * margin < 1.0) {
        const double step = eta * y * ds.samples[i].weight / mean_w;
        for (std::size_t k = 0; k < kFixedFeatDim; ++k) w[k] += step * diff[i][k];
      }
      double norm = 0.0;
      for (double v : w) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > radius) {
        for (double& v : w) v *= radius / norm;
      }
      for (std::size_t k = 0; k < kFixedFeatDim; ++k) avg[k] += (w[k] - avg[k]) / steps;
    }
    std::copy(avg.begin(), avg.end(), model.params.get("svm.w").data.begin());
    const EvalResult r = evaluate_samples(model, ds, val_idx);
    rep.history.push_back({epoch, 0.0, r.loss, r.accuracy});
    if (improves(r, rep.best_epoch, rep)) {
      rep.best_epoch = epoch;
      rep.best_val_accuracy = r.accuracy;
      rep.best_val_loss = r.loss;
      best.params = model.params;
    }
  }
  record_training(best, cfg, rep);
  if (out != nullptr) *out = rep;
  return best;
}

Model mlp_train(const SampleDataset& ds, const TrainConfig& cfg, TrainReport* report) {
  return train_siamese(ModelKind::kMlp, ds, cfg, report);
}

Model gnn_train(const SampleDataset& ds, const TrainConfig& cfg, TrainReport* report) {
  return train_siamese(ModelKind::kGnn, ds, cfg, report);
}

Model train_model(ModelKind kind, const SampleDataset& ds, const TrainConfig& cfg, TrainReport* report) {
  switch (kind) {
    case ModelKind::kGnn:
      return gnn_train(ds, cfg, report);
    case ModelKind::kMlp:
      return mlp_train(ds, cfg, report);
    case ModelKind::kSvm:
      return svm_train(ds, cfg, report);
  }
  throw ConfigError("unknown model kind");
}

}  // namespace nodecomp
