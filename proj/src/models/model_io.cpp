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

#include <sstream>

#include "nodecomp/container.hpp"
#include "nodecomp/errors.hpp"
#include "nodecomp/models.hpp"

namespace nodecomp {

namespace {

constexpr std::string_view kMagic = "NODECKPT";

nlohmann::json architecture(ModelKind kind) {
  switch (kind) {
    case ModelKind::kGnn:
      return {{"cons_feat_dim", kConsFeatDim},
              {"var_feat_dim", kVarFeatDim},
              {"global_feat_dim", kGlobalFeatDim},
              {"embed_width", kGnnEmbedWidth},
              {"conv_widths", kGnnConvWidths},
              {"aggregation", "sum"},
              {"pooling", "mean"},
              {"readout_order", {"cons_pool", "var_pool", "globals"}},
              {"readout", "l2_norm"}};
    case ModelKind::kMlp:
      return {{"input_dim", kFixedFeatDim}, {"hidden", kMlpHidden}, {"output", 1}};
    case ModelKind::kSvm:
      return {{"input_dim", kFixedFeatDim}, {"kernel", "linear"}};
  }
  return {};
}

}  // namespace

std::string checkpoint_bytes(const Model& model) {
  Container c;
  c.version = kCheckpointVersion;
  c.manifest = {
      {"kind", to_string(model.kind)},
      {"architecture", architecture(model.kind)},
      {"encoding", {{"bound_clip", model.constants.bound_clip}, {"bound_scale", model.constants.bound_scale}}},
      {"scaler", {{"mean", model.scaler.mean}, {"scale", model.scaler.scale}}},
      {"seed", model.seed},
      {"training", model.training},
  };
  std::ostringstream blob(std::ios::binary);
  nn::write_params(blob, model.params);
  c.payload = std::move(blob).str();
  c.manifest["params_sha256"] = sha256_hex(c.payload);
  return encode_container(kMagic, c);
}

Model model_from_checkpoint_bytes(const std::string& bytes) {
  const Container c = decode_container(kMagic, kCheckpointVersion, bytes);
  Model m;
  try {
    m.kind = model_kind_from_string(c.manifest.at("kind").get<std::string>());
    if (c.manifest.at("architecture") != architecture(m.kind)) {
      throw FormatError("checkpoint architecture does not match this build");
    }
    m.constants.bound_clip = c.manifest.at("encoding").at("bound_clip").get<double>();
    m.constants.bound_scale = c.manifest.at("encoding").at("bound_scale").get<double>();
    m.scaler.mean = c.manifest.at("scaler").at("mean").get<FixedFeatures>();
    m.scaler.scale = c.manifest.at("scaler").at("scale").get<FixedFeatures>();
    m.seed = c.manifest.at("seed").get<std::uint64_t>();
    m.training = c.manifest.at("training");
    if (c.manifest.at("params_sha256").get<std::string>() != sha256_hex(c.payload)) {
      throw FormatError("checkpoint parameter hash mismatch");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad checkpoint manifest: ") + e.what());
  }
  std::istringstream blob(c.payload, std::ios::binary);
  m.params = nn::read_params(blob);
  const nn::ParamStore expect = m.kind == ModelKind::kGnn   ? make_gnn_params()
                                : m.kind == ModelKind::kMlp ? make_mlp_params()
                                                            : make_svm_params();
  if (m.params.size() != expect.size()) throw FormatError("checkpoint parameter count mismatch");
  for (std::size_t i = 0; i < expect.size(); ++i) {
    if (m.params.entries()[i].first != expect.entries()[i].first ||
        m.params.entries()[i].second.shape != expect.entries()[i].second.shape) {
      throw FormatError("checkpoint parameter '" + m.params.entries()[i].first + "' does not match architecture");
    }
  }
  return m;
}

void save_checkpoint(const Model& model, const std::string& path) { write_file_bytes(path, checkpoint_bytes(model)); }

Model load_checkpoint(const std::string& path) { return model_from_checkpoint_bytes(read_file_bytes(path)); }

nlohmann::json describe_model(const Model& model) {
  std::size_t count = 0;
  nlohmann::json params = nlohmann::json::array();
  for (const auto& [name, t] : model.params.entries()) {
    params.push_back({{"name", name}, {"shape", t.shape}});
    count += t.numel();
  }
  return {{"kind", to_string(model.kind)},
          {"architecture", architecture(model.kind)},
          {"encoding", {{"bound_clip", model.constants.bound_clip}, {"bound_scale", model.constants.bound_scale}}},
          {"parameters", params},
          {"parameter_count", count},
          {"seed", model.seed},
          {"training", model.training}};
}

}  // namespace nodecomp
