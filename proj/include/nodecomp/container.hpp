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
#include <string_view>

#include "json.hpp"

// On-disk envelope shared by checkpoints and datasets:
//   8-byte magic, u32 version, u64-length JSON manifest, u64-length payload.
namespace nodecomp {

struct Container {
  std::uint32_t version = 0;
  nlohmann::json manifest;
  std::string payload;
};

std::string encode_container(std::string_view magic, const Container& c);
// Throws FormatError on wrong magic, version mismatch, or truncation.
Container decode_container(std::string_view magic, std::uint32_t expected_version, std::string_view bytes);

void write_file_bytes(const std::string& path, std::string_view bytes);
std::string read_file_bytes(const std::string& path);

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

}  // namespace nodecomp
