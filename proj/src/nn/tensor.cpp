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
#include <istream>
#include <ostream>

#include "nodecomp/binary_io.hpp"
#include "nodecomp/errors.hpp"
#include "nodecomp/nn.hpp"
#include "nodecomp/rng.hpp"

namespace nodecomp::nn {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

Tensor::Tensor(std::vector<std::size_t> dims, double fill) : shape(std::move(dims)), data(shape_numel(shape), fill) {}

Tensor Tensor::of_vector(std::vector<double> values) {
  Tensor t;
  t.shape = {values.size()};
  t.data = std::move(values);
  return t;
}

Tensor Tensor::of_matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  if (values.size() != rows * cols) throw DimensionError("matrix data does not match shape");
  Tensor t;
  t.shape = {rows, cols};
  t.data = std::move(values);
  return t;
}

Tensor& ParamStore::add(const std::string& name, std::vector<std::size_t> shape) {
  if (contains(name)) throw ConfigError("duplicate parameter '" + name + "'");
  entries_.emplace_back(name, Tensor(std::move(shape)));
  return entries_.back().second;
}

std::size_t ParamStore::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].first == name) return i;
  }
  throw ConfigError("unknown parameter '" + name + "'");
}

Tensor& ParamStore::get(const std::string& name) { return entries_[index_of(name)].second; }
const Tensor& ParamStore::get(const std::string& name) const { return entries_[index_of(name)].second; }

bool ParamStore::contains(const std::string& name) const {
  for (const auto& [n, t] : entries_) {
    if (n == name) return true;
  }
  return false;
}

ParamStore ParamStore::zeros_like() const {
  ParamStore z;
  for (const auto& [n, t] : entries_) z.add(n, t.shape);
  return z;
}

void ParamStore::fill(double v) {
  for (auto& [n, t] : entries_) std::fill(t.data.begin(), t.data.end(), v);
}

void ParamStore::accumulate(const ParamStore& other) {
  if (other.entries_.size() != entries_.size()) throw DimensionError("parameter stores differ in size");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& dst = entries_[i].second.data;
    const auto& src = other.entries_[i].second.data;
    if (dst.size() != src.size()) throw DimensionError("parameter '" + entries_[i].first + "' shape mismatch");
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  }
}

void ParamStore::scale(double s) {
  for (auto& [n, t] : entries_) {
    for (double& v : t.data) v *= s;
  }
}

void ParamStore::init_glorot(std::uint64_t seed) {
  Rng rng(seed);
  for (auto& [name, t] : entries_) {
    const bool weight = name.size() >= 2 && name.compare(name.size() - 2, 2, ".w") == 0;
    if (!weight) {
      std::fill(t.data.begin(), t.data.end(), 0.0);
      continue;
    }
    const double fan_out = static_cast<double>(t.rows());
    const double fan_in = static_cast<double>(t.cols());
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : t.data) v = uniform_real(rng, -a, a);
  }
}

void write_params(std::ostream& out, const ParamStore& params) {
  binio::put_u64(out, params.size());
  for (const auto& [name, t] : params.entries()) {
    binio::put_string(out, name);
    binio::put_u64(out, t.shape.size());
    for (std::size_t d : t.shape) binio::put_u64(out, d);
    for (double v : t.data) binio::put_f64(out, v);
  }
}

ParamStore read_params(std::istream& in) {
  ParamStore p;
  const std::uint64_t count = binio::get_u64(in);
  if (count > 4096) throw FormatError("implausible parameter count");
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string name = binio::get_string(in, 4096);
    const std::uint64_t rank = binio::get_u64(in);
    if (rank > 8) throw FormatError("implausible tensor rank");
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) {
      d = binio::get_u64(in);
      if (d > (1ULL << 24)) throw FormatError("implausible tensor dimension");
    }
    Tensor& t = p.add(name, shape);
    for (double& v : t.data) v = binio::get_f64(in);
  }
  return p;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double weighted_bce(double p, double label, double weight) {
  const double q = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  return -weight * (label * std::log(q) + (1.0 - label) * std::log(1.0 - q));
}

}  // namespace nodecomp::nn
