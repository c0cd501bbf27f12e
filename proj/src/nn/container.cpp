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

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "nodecomp/binary_io.hpp"
#include "nodecomp/container.hpp"
#include "nodecomp/errors.hpp"

namespace nodecomp {

std::string encode_container(std::string_view magic, const Container& c) {
  if (magic.size() != 8) throw ConfigError("container magic must be 8 bytes");
  std::ostringstream out(std::ios::binary);
  out.write(magic.data(), 8);
  binio::put_u32(out, c.version);
  binio::put_string(out, c.manifest.dump());
  binio::put_string(out, c.payload);
  return std::move(out).str();
}

Container decode_container(std::string_view magic, std::uint32_t expected_version, std::string_view bytes) {
  std::istringstream in(std::string(bytes), std::ios::binary);
  char m[8];
  if (!in.read(m, 8) || std::string_view(m, 8) != magic) throw FormatError("bad file magic");
  Container c;
  c.version = binio::get_u32(in);
  if (c.version != expected_version) {
    throw FormatError("unsupported format version " + std::to_string(c.version) + " (expected " +
                      std::to_string(expected_version) + ")");
  }
  const std::string manifest = binio::get_string(in, bytes.size());
  try {
    c.manifest = nlohmann::json::parse(manifest);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad manifest: ") + e.what());
  }
  c.payload = binio::get_string(in, bytes.size());
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload");
  return c;
}

void write_file_bytes(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write to '" + path + "' failed");
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    s.push_back(hex[digest[i] >> 4]);
    s.push_back(hex[digest[i] & 15]);
  }
  return s;
}

}  // namespace nodecomp
