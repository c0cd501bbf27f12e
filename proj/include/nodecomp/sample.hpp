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

#include "json.hpp"

#include "nodecomp/encoding.hpp"

namespace nodecomp {

// Both encodings of one node, so every model family trains from the same
// records.
struct NodeRepr {
  NodeBipartiteGraph graph;
  FixedFeatures fixed{};

  friend bool operator==(const NodeRepr&, const NodeRepr&) = default;
};

// One recorded oracle comparison. label 0 means the first node is better.
struct Sample {
  NodeRepr a;
  NodeRepr b;
  int label = 0;
  double weight = 1.0;
  std::uint64_t instance_id = 0;
  int depth_a = 0;
  int depth_b = 0;
  std::int64_t ordinal = 0;  // comparison index within the collection solve

  friend bool operator==(const Sample&, const Sample&) = default;
};

enum class SplitTag : std::uint8_t { kTrain, kTest };

const char* to_string(SplitTag s);
SplitTag split_tag_from_string(const std::string& s);

struct SampleDataset {
  SplitTag split = SplitTag::kTrain;
  nlohmann::json provenance = nlohmann::json::object();
  std::vector<Sample> samples;

  friend bool operator==(const SampleDataset&, const SampleDataset&) = default;
};

}  // namespace nodecomp
