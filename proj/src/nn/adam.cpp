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

#include "nodecomp/errors.hpp"
#include "nodecomp/nn.hpp"

namespace nodecomp::nn {

AdamState::AdamState(const ParamStore& params, AdamConfig cfg)
    : config(cfg), m(params.zeros_like()), v(params.zeros_like()) {}

void adam_step(ParamStore& params, const ParamStore& grads, AdamState& state) {
  auto& pe = params.entries();
  const auto& ge = grads.entries();
  if (pe.size() != ge.size() || state.m.size() != pe.size()) throw DimensionError("Adam state does not match parameters");
  for (std::size_t i = 0; i < ge.size(); ++i) {
    if (ge[i].second.data.size() != pe[i].second.data.size()) {
      throw DimensionError("gradient shape mismatch for '" + pe[i].first + "'");
    }
    for (double g : ge[i].second.data) {
      if (!std::isfinite(g)) throw Error("non-finite gradient for '" + pe[i].first + "'");
    }
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < pe.size(); ++i) {
    auto& p = pe[i].second.data;
    const auto& g = ge[i].second.data;
    auto& m = state.m.entries()[i].second.data;
    auto& v = state.v.entries()[i].second.data;
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g[k];
      v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g[k] * g[k];
      const double mh = m[k] / bc1;
      const double vh = v[k] / bc2;
      p[k] -= c.lr * mh / (std::sqrt(vh) + c.eps);
    }
  }
}

}  // namespace nodecomp::nn
