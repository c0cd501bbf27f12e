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

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "nodecomp/errors.hpp"

// Little-endian scalar I/O for the binary sections of dataset and
// checkpoint files.
namespace nodecomp::binio {

template <typename T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <typename T>
void put(std::ostream& out, T v) {
  v = to_le(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("truncated binary data");
  return to_le(v);
}

inline void put_u32(std::ostream& out, std::uint32_t v) { put(out, v); }
inline void put_u64(std::ostream& out, std::uint64_t v) { put(out, v); }
inline void put_f64(std::ostream& out, double v) { put(out, v); }
inline std::uint32_t get_u32(std::istream& in) { return get<std::uint32_t>(in); }
inline std::uint64_t get_u64(std::istream& in) { return get<std::uint64_t>(in); }
inline double get_f64(std::istream& in) { return get<double>(in); }

inline void put_string(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in, std::uint64_t max_len = 1ULL << 32) {
  const std::uint64_t n = get_u64(in);
  if (n > max_len) throw FormatError("string length out of range");
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) throw FormatError("truncated string");
  return s;
}

}  // namespace nodecomp::binio
