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
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

// Small reverse-mode differentiation kernel over dense f64 tensors. The op
// set is closed: exactly what the node scoring models need.
namespace nodecomp::nn {

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims, double fill = 0.0);
  static Tensor of_vector(std::vector<double> values);
  static Tensor of_matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t numel() const { return data.size(); }
  std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::size_t shape_numel(const std::vector<std::size_t>& shape);

// Named parameter arrays in insertion order.
class ParamStore {
 public:
  Tensor& add(const std::string& name, std::vector<std::size_t> shape);
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;

  std::size_t size() const { return entries_.size(); }
  std::vector<std::pair<std::string, Tensor>>& entries() { return entries_; }
  const std::vector<std::pair<std::string, Tensor>>& entries() const { return entries_; }

  // Same names and shapes, zero data.
  ParamStore zeros_like() const;
  void fill(double v);
  // grads += other, entry by entry.
  void accumulate(const ParamStore& other);
  void scale(double s);

  // Glorot-uniform for every parameter whose name ends in ".w", zero
  // otherwise. fan_in/fan_out come from a [out x in] shape.
  void init_glorot(std::uint64_t seed);

  friend bool operator==(const ParamStore&, const ParamStore&) = default;

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
};

// Binary blob of named arrays: u64 count, then per entry: string name,
// u64 rank, u64 dims..., f64 data (little-endian).
void write_params(std::ostream& out, const ParamStore& params);
ParamStore read_params(std::istream& in);

struct EdgeTriplet {
  std::uint32_t dst = 0;
  std::uint32_t src = 0;
  double weight = 0.0;
};

double sigmoid(double x);

inline constexpr double kProbClamp = 1e-12;

// Per-sample weighted binary cross-entropy on a probability clamped to
// [kProbClamp, 1 - kProbClamp].
double weighted_bce(double p, double label, double weight);

class Tape {
 public:
  using Id = std::size_t;

  // Parameters are read from params and their gradients summed into grads
  // (same layout) by backward(). grads may be null for inference.
  explicit Tape(const ParamStore* params = nullptr, ParamStore* grads = nullptr);

  Id constant(Tensor t);
  Id param(const std::string& name);

  const Tensor& value(Id id) const { return nodes_[id].value; }
  const std::vector<double>& grad(Id id) const { return nodes_[id].grad; }
  double scalar(Id id) const { return nodes_[id].value.data.at(0); }

  // x [r x in], w [out x in], b [out] -> [r x out]
  Id dense(Id x, Id w, Id b);
  // x [r x in], w [out x in] -> [r x out], no bias
  Id matmul_t(Id x, Id w);
  Id relu(Id x);
  Id add(Id a, Id b);
  // out[dst] += weight * src_rows[src]; out has num_dst rows.
  Id edge_aggregate(Id src_rows, std::vector<EdgeTriplet> edges, std::size_t num_dst);
  // Column means of a [r x d] matrix -> [d]; zeros when r == 0.
  Id mean_rows(Id x);
  Id concat(std::initializer_list<Id> parts);
  Id l2_norm(Id v);
  Id sub(Id a, Id b);
  Id sigmoid(Id x);
  Id weighted_bce(Id p, double label, double weight);

  // Reverse sweep from a scalar node. Parameter gradients are added to the
  // grads store given at construction.
  void backward(Id loss);

 private:
  struct Node {
    Tensor value;
    std::vector<double> grad;
    std::function<void()> back;
    int param_index = -1;
  };

  Id push(Tensor value);
  std::vector<double>& g(Id id);

  const ParamStore* params_;
  ParamStore* grads_;
  std::vector<Node> nodes_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  ParamStore m;
  ParamStore v;

  AdamState(const ParamStore& params, AdamConfig cfg = {});
};

// Bias-corrected Adam update. Throws nodecomp::Error on a non-finite
// gradient, leaving params untouched.
void adam_step(ParamStore& params, const ParamStore& grads, AdamState& state);

}  // namespace nodecomp::nn
