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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "nodecomp/errors.hpp"
#include "nodecomp/kernels/kernels.hpp"

namespace nodecomp::kernels {

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*gemv)(const double*, std::size_t, std::size_t, const double*, double*);
};

constexpr Table kScalarTable{&scalar::dot, &scalar::axpy, &scalar::gemv};
#if defined(NODECOMP_HAVE_AVX2)
constexpr Table kAvx2Table{&avx2::dot, &avx2::axpy, &avx2::gemv};
#endif

const Table* table_for(Isa isa) {
#if defined(NODECOMP_HAVE_AVX2)
  if (isa == Isa::kAvx2) return &kAvx2Table;
#endif
  return &kScalarTable;
}

Isa detect() {
  const char* env = std::getenv("NODECOMP_ISA");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::kScalar;
  if (isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  return Isa::kScalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

const Table& active() { return *table_for(current().load(std::memory_order_relaxed)); }

void check_same(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionError("kernel operand length mismatch");
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
  if (isa == Isa::kScalar) return true;
#if defined(NODECOMP_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) throw ConfigError("ISA not supported on this CPU: " + std::string(isa_name(isa)));
  current().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y) {
  check_same(a.size(), rows * cols);
  check_same(x.size(), cols);
  check_same(y.size(), rows);
  active().gemv(a.data(), rows, cols, x.data(), y.data());
}

void gemv_t(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
            std::span<double> y) {
  check_same(a.size(), rows * cols);
  check_same(x.size(), rows);
  check_same(y.size(), cols);
  const Table& t = active();
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (x[r] != 0.0) t.axpy(x[r], a.data() + r * cols, y.data(), cols);
  }
}

}  // namespace nodecomp::kernels
