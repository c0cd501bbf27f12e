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
#include <string>

#include "nodecomp/errors.hpp"
#include "nodecomp/kernels/kernels.hpp"
#include "nodecomp/nn.hpp"

namespace nodecomp::nn {

namespace {

// A rank-1 tensor is treated as a single row.
std::size_t mat_rows(const Tensor& t) { return t.shape.size() == 1 ? 1 : t.shape.at(0); }
std::size_t mat_cols(const Tensor& t) { return t.shape.size() == 1 ? t.shape[0] : t.shape.at(1); }

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace

Tape::Tape(const ParamStore* params, ParamStore* grads) : params_(params), grads_(grads) {}

Tape::Id Tape::push(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

std::vector<double>& Tape::g(Id id) {
  auto& grad = nodes_[id].grad;
  if (grad.size() != nodes_[id].value.data.size()) grad.assign(nodes_[id].value.data.size(), 0.0);
  return grad;
}

Tape::Id Tape::constant(Tensor t) {
  require(t.data.size() == shape_numel(t.shape), "tensor data does not match its shape");
  return push(std::move(t));
}

Tape::Id Tape::param(const std::string& name) {
  if (params_ == nullptr) throw ConfigError("tape has no parameter store");
  const std::size_t idx = params_->index_of(name);
  const Id id = push(params_->entries()[idx].second);
  nodes_[id].param_index = static_cast<int>(idx);
  return id;
}

Tape::Id Tape::matmul_t(Id x, Id w) {
  const Tensor& X = nodes_[x].value;
  const Tensor& W = nodes_[w].value;
  require(W.shape.size() == 2, "weight must be a matrix");
  const std::size_t r = mat_rows(X), in = mat_cols(X), out = W.shape[0];
  require(W.shape[1] == in, "dense input width does not match weight");
  Tensor Y(X.shape.size() == 1 ? std::vector<std::size_t>{out} : std::vector<std::size_t>{r, out});
  for (std::size_t i = 0; i < r; ++i) {
    kernels::gemv(W.data, out, in, std::span<const double>(X.data).subspan(i * in, in),
                  std::span<double>(Y.data).subspan(i * out, out));
  }
  const Id y = push(std::move(Y));
  nodes_[y].back = [this, x, w, y, r, in, out] {
    const std::vector<double>& gy = nodes_[y].grad;
    std::vector<double>& gx = g(x);
    std::vector<double>& gw = g(w);
    const std::vector<double>& xv = nodes_[x].value.data;
    const std::vector<double>& wv = nodes_[w].value.data;
    std::vector<double> tmp(in);
    for (std::size_t i = 0; i < r; ++i) {
      std::span<const double> gyi = std::span<const double>(gy).subspan(i * out, out);
      kernels::gemv_t(wv, out, in, gyi, tmp);
      for (std::size_t k = 0; k < in; ++k) gx[i * in + k] += tmp[k];
      std::span<const double> xi = std::span<const double>(xv).subspan(i * in, in);
      for (std::size_t o = 0; o < out; ++o) {
        if (gyi[o] != 0.0) kernels::axpy(gyi[o], xi, std::span<double>(gw).subspan(o * in, in));
      }
    }
  };
  return y;
}

Tape::Id Tape::dense(Id x, Id w, Id b) {
  const Id y = matmul_t(x, w);
  const Tensor& B = nodes_[b].value;
  const std::size_t out = nodes_[w].value.shape[0];
  require(B.data.size() == out, "bias width does not match weight");
  Tensor& Y = nodes_[y].value;
  const std::size_t r = Y.data.size() / std::max<std::size_t>(out, 1);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t o = 0; o < out; ++o) Y.data[i * out + o] += B.data[o];
  }
  // Bias gradient rides on a separate node so matmul_t's closure stays intact.
  const Id z = push(Y);
  nodes_[z].back = [this, y, z, b, r, out] {
    const std::vector<double>& gz = nodes_[z].grad;
    std::vector<double>& gy = g(y);
    std::vector<double>& gb = g(b);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t o = 0; o < out; ++o) {
        gy[i * out + o] += gz[i * out + o];
        gb[o] += gz[i * out + o];
      }
    }
  };
  return z;
}

Tape::Id Tape::relu(Id x) {
  Tensor Y = nodes_[x].value;
  for (double& v : Y.data) v = v > 0.0 ? v : 0.0;
  const Id y = push(std::move(Y));
  nodes_[y].back = [this, x, y] {
    const std::vector<double>& gy = nodes_[y].grad;
    std::vector<double>& gx = g(x);
    const std::vector<double>& xv = nodes_[x].value.data;
    for (std::size_t k = 0; k < gy.size(); ++k) {
      if (xv[k] > 0.0) gx[k] += gy[k];
    }
  };
  return y;
}

Tape::Id Tape::add(Id a, Id b) {
  require(nodes_[a].value.shape == nodes_[b].value.shape, "add operands differ in shape");
  Tensor Y = nodes_[a].value;
  const std::vector<double>& bv = nodes_[b].value.data;
  for (std::size_t k = 0; k < Y.data.size(); ++k) Y.data[k] += bv[k];
  const Id y = push(std::move(Y));
  nodes_[y].back = [this, a, b, y] {
    const std::vector<double>& gy = nodes_[y].grad;
    std::vector<double>& ga = g(a);
    for (std::size_t k = 0; k < gy.size(); ++k) ga[k] += gy[k];
    std::vector<double>& gb = g(b);
    for (std::size_t k = 0; k < gy.size(); ++k) gb[k] += gy[k];
  };
  return y;
}

Tape::Id Tape::sub(Id a, Id b) {
  require(nodes_[a].value.shape == nodes_[b].value.shape, "sub operands differ in shape");
  Tensor Y = nodes_[a].value;
  const std::vector<double>& bv = nodes_[b].value.data;
  for (std::size_t k = 0; k < Y.data.size(); ++k) Y.data[k] -= bv[k];
  const Id y = push(std::move(Y));
  nodes_[y].back = [this, a, b, y] {
    const std::vector<double>& gy = nodes_[y].grad;
    std::vector<double>& ga = g(a);
    for (std::size_t k = 0; k < gy.size(); ++k) ga[k] += gy[k];
    std::vector<double>& gb = g(b);
    for (std::size_t k = 0; k < gy.size(); ++k) gb[k] -= gy[k];
  };
  return y;
}

Tape::Id Tape::edge_aggregate(Id src_rows, std::vector<EdgeTriplet> edges, std::size_t num_dst) {
  const Tensor& S = nodes_[src_rows].value;
  require(S.shape.size() == 2, "edge_aggregate source must be a matrix");
  const std::size_t ns = S.shape[0], d = S.shape[1];
  // Extended-precision sums keep the result independent of edge order.
  std::vector<long double> acc(num_dst * d, 0.0L);
  for (const EdgeTriplet& e : edges) {
    if (e.src >= ns || e.dst >= num_dst) throw DimensionError("edge index out of range");
    if (e.weight == 0.0) continue;
    const double* src = &S.data[std::size_t{e.src} * d];
    long double* dst = &acc[std::size_t{e.dst} * d];
    for (std::size_t k = 0; k < d; ++k) dst[k] += static_cast<long double>(e.weight) * src[k];
  }
  Tensor Y({num_dst, d});
  for (std::size_t k = 0; k < acc.size(); ++k) Y.data[k] = static_cast<double>(acc[k]);
  const Id y = push(std::move(Y));
  nodes_[y].back = [this, src_rows, y, d, edges = std::move(edges)] {
    const std::vector<double>& gy = nodes_[y].grad;
    std::vector<double>& gs = g(src_rows);
    for (const EdgeTriplet& e : edges) {
      if (e.weight == 0.0) continue;
      kernels::axpy(e.weight, std::span<const double>(gy).subspan(std::size_t{e.dst} * d, d),
                    std::span<double>(gs).subspan(std::size_t{e.src} * d, d));
    }
  };
  return y;
}

Tape::Id Tape::mean_rows(Id x) {
  const Tensor& X = nodes_[x].value;
  require(X.shape.size() == 2, "mean_rows expects a matrix");
  const std::size_t r = X.shape[0], d = X.shape[1];
  std::vector<long double> acc(d, 0.0L);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < d; ++k) acc[k] += X.data[i * d + k];
  }
  Tensor Y({d});
  if (r > 0) {
    for (std::size_t k = 0; k < d; ++k) Y.data[k] = static_cast<double>(acc[k] / static_cast<long double>(r));
  }
  const Id y = push(std::move(Y));
  nodes_[y].back = [this, x, y, r, d] {
    if (r == 0) return;
    const std::vector<double>& gy = nodes_[y].grad;
    std::vector<double>& gx = g(x);
    const double s = 1.0 / static_cast<double>(r);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t k = 0; k < d; ++k) gx[i * d + k] += gy[k] * s;
    }
  };
  return y;
}

Tape::Id Tape::concat(std::initializer_list<Id> parts) {
  std::vector<Id> ids(parts);
  std::vector<double> out;
  for (Id p : ids) out.insert(out.end(), nodes_[p].value.data.begin(), nodes_[p].value.data.end());
  const Id y = push(Tensor::of_vector(std::move(out)));
  nodes_[y].back = [this, ids, y] {
    const std::vector<double>& gy = nodes_[y].grad;
    std::size_t off = 0;
    for (Id p : ids) {
      std::vector<double>& gp = g(p);
      for (std::size_t k = 0; k < gp.size(); ++k) gp[k] += gy[off + k];
      off += gp.size();
    }
  };
  return y;
}

Tape::Id Tape::l2_norm(Id v) {
  const std::vector<double>& xv = nodes_[v].value.data;
  const double n = std::sqrt(kernels::dot(xv, xv));
  const Id y = push(Tensor::of_vector({n}));
  nodes_[y].back = [this, v, y, n] {
    if (n == 0.0) return;
    const double gy = nodes_[y].grad[0];
    std::vector<double>& gv = g(v);
    kernels::axpy(gy / n, nodes_[v].value.data, gv);
  };
  return y;
}

Tape::Id Tape::sigmoid(Id x) {
  Tensor Y = nodes_[x].value;
  for (double& v : Y.data) v = nn::sigmoid(v);
  const Id y = push(std::move(Y));
  nodes_[y].back = [this, x, y] {
    const std::vector<double>& gy = nodes_[y].grad;
    const std::vector<double>& yv = nodes_[y].value.data;
    std::vector<double>& gx = g(x);
    for (std::size_t k = 0; k < gy.size(); ++k) gx[k] += gy[k] * yv[k] * (1.0 - yv[k]);
  };
  return y;
}

Tape::Id Tape::weighted_bce(Id p, double label, double weight) {
  require(nodes_[p].value.data.size() == 1, "weighted_bce expects a scalar probability");
  const double pv = nodes_[p].value.data[0];
  const Id y = push(Tensor::of_vector({nn::weighted_bce(pv, label, weight)}));
  nodes_[y].back = [this, p, y, label, weight, pv] {
    if (pv <= kProbClamp || pv >= 1.0 - kProbClamp) return;
    const double gy = nodes_[y].grad[0];
    g(p)[0] += gy * -weight * (label / pv - (1.0 - label) / (1.0 - pv));
  };
  return y;
}

void Tape::backward(Id loss) {
  require(nodes_[loss].value.data.size() == 1, "backward needs a scalar loss");
  for (Node& n : nodes_) n.grad.clear();
  g(loss)[0] = 1.0;
  for (Id i = loss + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty()) continue;
    if (n.back) n.back();
  }
  if (grads_ == nullptr) return;
  for (const Node& n : nodes_) {
    if (n.param_index < 0 || n.grad.empty()) continue;
    std::vector<double>& dst = grads_->entries()[static_cast<std::size_t>(n.param_index)].second.data;
    if (dst.size() != n.grad.size()) throw DimensionError("gradient store does not match parameters");
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += n.grad[k];
  }
}

}  // namespace nodecomp::nn
