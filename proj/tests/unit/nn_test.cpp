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
#include <limits>
#include <sstream>

#include "doctest.h"
#include "nodecomp/errors.hpp"
#include "nodecomp/nn.hpp"
#include "nodecomp/rng.hpp"
#include "oracles.hpp"

using namespace nodecomp;
using nn::ParamStore;
using nn::Tape;
using nn::Tensor;

namespace {

void randomize(ParamStore& p, Rng& rng, double lo = -1.0, double hi = 1.0) {
  for (auto& [name, t] : p.entries()) {
    for (double& v : t.data) v = uniform_real(rng, lo, hi);
  }
}

// Projects any tensor onto a scalar through a fixed random linear map.
Tape::Id readout(Tape& tape, Tape::Id y, std::uint64_t seed) {
  const Tensor& v = tape.value(y);
  const std::size_t d = v.shape.size() == 2 ? v.shape[1] : v.numel();
  Rng rng(seed);
  std::vector<double> probe(d);
  for (double& p : probe) p = uniform_real(rng, -1.0, 1.0);
  const Tape::Id w = tape.constant(Tensor::of_matrix(1, d, probe));
  const Tape::Id z = tape.matmul_t(y, w);
  return tape.value(z).shape.size() == 2 ? tape.mean_rows(z) : z;
}

void require_grad_ok(const ParamStore& p, const std::function<Tape::Id(Tape&)>& build) {
  const auto check = testing_oracles::check_param_gradients(p, build);
  CHECK(check.max_rel_error < 1e-4);
}

}  // namespace

TEST_CASE("tensor constructors") {
  const Tensor t({2, 3}, 1.5);
  CHECK(t.numel() == 6);
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  CHECK_THROWS_AS(Tensor::of_matrix(2, 2, {1, 2, 3}), DimensionError);
}

TEST_CASE("elementary values") {
  CHECK(nn::sigmoid(0.0) == 0.5);
  CHECK(nn::sigmoid(800.0) == 1.0);
  CHECK(nn::sigmoid(-800.0) >= 0.0);
  CHECK(nn::sigmoid(3.0) + nn::sigmoid(-3.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(nn::weighted_bce(0.25, 1.0, 2.0) == doctest::Approx(-2.0 * std::log(0.25)));
  CHECK(nn::weighted_bce(0.25, 0.0, 1.0) == doctest::Approx(-std::log(0.75)));
  CHECK(std::isfinite(nn::weighted_bce(0.0, 1.0, 1.0)));
  CHECK(nn::weighted_bce(0.0, 1.0, 1.0) == doctest::Approx(-std::log(nn::kProbClamp)));

  ParamStore p;
  p.add("v", {3});
  Tape tape(&p);
  const Tape::Id v = tape.param("v");
  CHECK(tape.scalar(tape.l2_norm(v)) == 0.0);
  const Tape::Id rows = tape.constant(Tensor::of_matrix(3, 2, {1, 2, 1, 2, 1, 2}));
  CHECK(tape.value(tape.mean_rows(rows)).data == std::vector<double>{1.0, 2.0});
  const Tape::Id none = tape.constant(Tensor({0, 2}));
  CHECK(tape.value(tape.mean_rows(none)).data == std::vector<double>{0.0, 0.0});
  const Tape::Id agg = tape.edge_aggregate(rows, {}, 4);
  CHECK(tape.value(agg).shape == std::vector<std::size_t>{4, 2});
  CHECK(tape.value(agg).data == std::vector<double>(8, 0.0));
}

TEST_CASE("l2 norm at zero has zero gradient") {
  ParamStore p;
  p.add("v", {3});
  ParamStore g = p.zeros_like();
  Tape tape(&p, &g);
  tape.backward(tape.l2_norm(tape.param("v")));
  CHECK(g.get("v").data == std::vector<double>(3, 0.0));
}

TEST_CASE("shape errors") {
  ParamStore p;
  p.add("x", {2, 3});
  p.add("w", {4, 2});
  p.add("b", {5});
  Tape tape(&p);
  const auto x = tape.param("x");
  CHECK_THROWS_AS(tape.matmul_t(x, tape.param("w")), DimensionError);
  CHECK_THROWS_AS(tape.add(x, tape.param("b")), DimensionError);
  CHECK_THROWS_AS(tape.edge_aggregate(x, {{0, 2, 1.0}}, 1), DimensionError);
  CHECK_THROWS_AS(tape.edge_aggregate(x, {{1, 0, 1.0}}, 1), DimensionError);
  CHECK_THROWS_AS(tape.weighted_bce(x, 1.0, 1.0), DimensionError);
  CHECK_THROWS_AS(p.get("missing"), Error);
  Tape bare;
  CHECK_THROWS_AS(bare.param("x"), ConfigError);
}

TEST_CASE("finite differences: each op") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    ParamStore p;
    p.add("x", {4, 3});
    p.add("y", {4, 3});
    p.add("w", {5, 3});
    p.add("b", {5});
    p.add("v", {6});
    p.add("s", {1});
    randomize(p, rng);
    const std::uint64_t seed = 100 + trial;

    SUBCASE("dense") { require_grad_ok(p, [&](Tape& t) { return readout(t, t.dense(t.param("x"), t.param("w"), t.param("b")), seed); }); }
    SUBCASE("matmul_t") { require_grad_ok(p, [&](Tape& t) { return readout(t, t.matmul_t(t.param("x"), t.param("w")), seed); }); }
    SUBCASE("relu") {
      require_grad_ok(p, [&](Tape& t) { return readout(t, t.relu(t.dense(t.param("x"), t.param("w"), t.param("b"))), seed); });
    }
    SUBCASE("add and sub") {
      require_grad_ok(p, [&](Tape& t) {
        const auto a = t.add(t.param("x"), t.param("y"));
        return readout(t, t.sub(a, t.relu(t.param("y"))), seed);
      });
    }
    SUBCASE("edge_aggregate") {
      std::vector<nn::EdgeTriplet> edges;
      for (int e = 0; e < 7; ++e) {
        edges.push_back({static_cast<std::uint32_t>(uniform_int(rng, 0, 2)),
                         static_cast<std::uint32_t>(uniform_int(rng, 0, 3)), uniform_real(rng, -2.0, 2.0)});
      }
      require_grad_ok(p, [&](Tape& t) { return readout(t, t.edge_aggregate(t.param("x"), edges, 3), seed); });
    }
    SUBCASE("mean_rows") { require_grad_ok(p, [&](Tape& t) { return readout(t, t.mean_rows(t.param("x")), seed); }); }
    SUBCASE("concat") {
      require_grad_ok(p, [&](Tape& t) {
        return readout(t, t.concat({t.mean_rows(t.param("x")), t.param("v"), t.param("s")}), seed);
      });
    }
    SUBCASE("l2_norm") { require_grad_ok(p, [&](Tape& t) { return t.l2_norm(t.param("v")); }); }
    SUBCASE("sigmoid") { require_grad_ok(p, [&](Tape& t) { return readout(t, t.sigmoid(t.param("v")), seed); }); }
    SUBCASE("weighted_bce") {
      for (double label : {0.0, 1.0}) {
        require_grad_ok(p, [&](Tape& t) { return t.weighted_bce(t.sigmoid(t.param("s")), label, 1.7); });
      }
    }
  }
}

TEST_CASE("bce gradient vanishes in the clamped region") {
  ParamStore p;
  p.add("s", {1});
  p.get("s").data[0] = 60.0;
  ParamStore g = p.zeros_like();
  Tape tape(&p, &g);
  tape.backward(tape.weighted_bce(tape.sigmoid(tape.param("s")), 0.0, 1.0));
  CHECK(g.get("s").data[0] == 0.0);
}

TEST_CASE("backward accumulates into the gradient store") {
  ParamStore p;
  p.add("s", {1});
  p.get("s").data[0] = 2.0;
  ParamStore g = p.zeros_like();
  for (int k = 0; k < 2; ++k) {
    Tape tape(&p, &g);
    tape.backward(tape.l2_norm(tape.param("s")));
  }
  CHECK(g.get("s").data[0] == doctest::Approx(2.0));
}

TEST_CASE("adam") {
  ParamStore p;
  p.add("w", {1});
  p.get("w").data[0] = 1.0;
  ParamStore g = p.zeros_like();
  g.get("w").data[0] = 3.7;
  nn::AdamState st(p);
  nn::adam_step(p, g, st);
  CHECK(p.get("w").data[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-6));
  CHECK(st.step == 1);
  g.get("w").data[0] = -0.2;
  ParamStore before = p;
  nn::adam_step(p, g, st);
  CHECK(p.get("w").data[0] != before.get("w").data[0]);

  before = p;
  g.get("w").data[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(nn::adam_step(p, g, st), Error);
  CHECK(p == before);
  CHECK(st.step == 2);
}

TEST_CASE("adam decreases a fixed tiny loss monotonically") {
  // Logistic regression on four fixed points.
  ParamStore p;
  p.add("w", {1, 2});
  p.add("b", {1});
  p.get("w").data = {0.3, -0.2};
  const std::vector<std::vector<double>> xs{{1, 2}, {-1, 0.5}, {0.2, -1}, {2, 1}};
  const std::vector<double> ys{1, 0, 0, 1};
  auto loss_of = [&](const ParamStore& params, ParamStore* grads) {
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      Tape tape(&params, grads);
      const auto x = tape.constant(Tensor::of_vector(xs[i]));
      const auto l = tape.weighted_bce(tape.sigmoid(tape.dense(x, tape.param("w"), tape.param("b"))), ys[i], 1.0);
      total += tape.scalar(l);
      if (grads != nullptr) tape.backward(l);
    }
    return total;
  };
  nn::AdamState st(p);
  double prev = loss_of(p, nullptr);
  for (int step = 0; step < 50; ++step) {
    ParamStore g = p.zeros_like();
    loss_of(p, &g);
    nn::adam_step(p, g, st);
    const double cur = loss_of(p, nullptr);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("parameter blob round trip") {
  ParamStore p;
  p.add("a.w", {3, 2});
  p.add("a.b", {3});
  p.init_glorot(5);
  const double limit = std::sqrt(6.0 / 5.0);
  for (double v : p.get("a.w").data) CHECK(std::abs(v) <= limit);
  CHECK(p.get("a.b").data == std::vector<double>(3, 0.0));
  ParamStore q;
  q.add("a.w", {3, 2});
  q.add("a.b", {3});
  q.init_glorot(5);
  CHECK(p == q);

  std::ostringstream out;
  nn::write_params(out, p);
  const std::string bytes = out.str();
  std::istringstream in(bytes);
  CHECK(nn::read_params(in) == p);
  std::istringstream cut(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(nn::read_params(cut), FormatError);
}
