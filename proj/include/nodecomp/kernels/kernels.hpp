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

#include <cstddef>
#include <span>
#include <string_view>

// Dense double-precision inner loops shared by the simplex and the neural
// network layers. Every kernel has a scalar reference implementation; wider
// ISA variants are selected once at runtime and must agree with the scalar
// path up to floating-point reassociation.
namespace nodecomp::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);

// Currently dispatched ISA. Defaults to the widest supported one unless the
// NODECOMP_ISA environment variable is set to "scalar".
Isa active_isa();

// Overrides dispatch. Throws nodecomp::ConfigError if unsupported here.
void set_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// y = A x with A row-major [rows x cols].
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y);

// y = A^T x with A row-major [rows x cols]; y has cols entries.
void gemv_t(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
            std::span<double> y);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace scalar

#if defined(NODECOMP_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace avx2
#endif

}  // namespace nodecomp::kernels
