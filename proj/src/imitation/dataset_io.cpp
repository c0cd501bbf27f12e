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

#include <set>
#include <sstream>

#include "nodecomp/binary_io.hpp"
#include "nodecomp/container.hpp"
#include "nodecomp/errors.hpp"
#include "nodecomp/imitation.hpp"

namespace nodecomp {

namespace {

constexpr std::string_view kMagic = "NODECDST";

void put_fixed(std::ostream& out, const FixedFeatures& f) {
  for (double v : f) binio::put_f64(out, v);
}

FixedFeatures get_fixed(std::istream& in) {
  FixedFeatures f{};
  for (double& v : f) v = binio::get_f64(in);
  return f;
}

std::string records(const SampleDataset& ds) {
  std::ostringstream out(std::ios::binary);
  binio::put_u64(out, ds.samples.size());
  for (const Sample& s : ds.samples) {
    binio::put_u64(out, s.instance_id);
    binio::put<std::int32_t>(out, s.depth_a);
    binio::put<std::int32_t>(out, s.depth_b);
    binio::put<std::int64_t>(out, s.ordinal);
    binio::put_u32(out, static_cast<std::uint32_t>(s.label));
    binio::put_f64(out, s.weight);
    write_graph(out, s.a.graph);
    write_graph(out, s.b.graph);
    put_fixed(out, s.a.fixed);
    put_fixed(out, s.b.fixed);
  }
  return std::move(out).str();
}

}  // namespace

const char* to_string(SplitTag s) { return s == SplitTag::kTrain ? "TRAIN" : "TEST"; }

SplitTag split_tag_from_string(const std::string& s) {
  if (s == "TRAIN" || s == "train") return SplitTag::kTrain;
  if (s == "TEST" || s == "test") return SplitTag::kTest;
  throw ConfigError("unknown split '" + s + "'");
}

std::string dataset_hash(const SampleDataset& ds) { return sha256_hex(records(ds)); }

std::string dataset_bytes(const SampleDataset& ds) {
  Container c;
  c.version = kDatasetVersion;
  c.payload = records(ds);
  std::set<std::uint64_t> ids;
  std::size_t label1 = 0;
  for (const Sample& s : ds.samples) {
    ids.insert(s.instance_id);
    label1 += s.label == 1 ? 1 : 0;
  }
  c.manifest = {{"version", kDatasetVersion},
                {"split", to_string(ds.split)},
                {"provenance", ds.provenance},
                {"counts",
                 {{"samples", ds.samples.size()},
                  {"instances", ids.size()},
                  {"label0", ds.samples.size() - label1},
                  {"label1", label1}}},
                {"content_sha256", sha256_hex(c.payload)}};
  return encode_container(kMagic, c);
}

SampleDataset dataset_from_bytes(const std::string& bytes) {
  const Container c = decode_container(kMagic, kDatasetVersion, bytes);
  SampleDataset ds;
  try {
    if (c.manifest.at("content_sha256").get<std::string>() != sha256_hex(c.payload)) {
      throw FormatError("dataset content hash mismatch");
    }
    ds.split = split_tag_from_string(c.manifest.at("split").get<std::string>());
    ds.provenance = c.manifest.at("provenance");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad dataset manifest: ") + e.what());
  }
  std::istringstream in(c.payload, std::ios::binary);
  const std::uint64_t n = binio::get_u64(in);
  if (n > c.payload.size()) throw FormatError("implausible sample count");
  ds.samples.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Sample s;
    s.instance_id = binio::get_u64(in);
    s.depth_a = binio::get<std::int32_t>(in);
    s.depth_b = binio::get<std::int32_t>(in);
    s.ordinal = binio::get<std::int64_t>(in);
    const std::uint32_t label = binio::get_u32(in);
    if (label > 1) throw FormatError("sample label outside {0,1}");
    s.label = static_cast<int>(label);
    s.weight = binio::get_f64(in);
    s.a.graph = read_graph(in);
    s.b.graph = read_graph(in);
    s.a.fixed = get_fixed(in);
    s.b.fixed = get_fixed(in);
    ds.samples.push_back(std::move(s));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in dataset records");
  return ds;
}

void save_dataset(const SampleDataset& ds, const std::string& path) { write_file_bytes(path, dataset_bytes(ds)); }

SampleDataset load_dataset(const std::string& path) { return dataset_from_bytes(read_file_bytes(path)); }

}  // namespace nodecomp
