/* Copyright 2026 The gsacert Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "gsacert/container.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gsacert/errors.h"
#include "gsacert/json_out.h"

namespace gsacert {
namespace {

std::string at(const std::string& source, std::size_t offset) {
  return source + ": offset " + std::to_string(offset) + ": ";
}

void put_le(std::string& out, std::uint64_t v, int bytes) {
  for (int b = 0; b < bytes; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint64_t get_le(const std::string& in, std::size_t offset, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + b])) << (8 * b);
  return v;
}

std::string required_string(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    fail(ErrorKind::kManifest, where + "/" + key + ": expected a string");
  return it->get<std::string>();
}

std::string optional_string(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return "";
  if (!it->is_string()) fail(ErrorKind::kManifest, where + "/" + key + ": expected a string");
  return it->get<std::string>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> keys,
                    const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) fail(ErrorKind::kManifest, where + "/" + k + ": unknown key");
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, path + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, path + ": write failed");
}

std::string join_path(const std::string& dir, const std::string& file) {
  if (dir.empty() || std::filesystem::path(file).is_absolute()) return file;
  return (std::filesystem::path(dir) / file).string();
}

std::string encode_container(const Mat& m) {
  if (m.rows() > 0xffffffffLL || m.cols() > 0xffffffffLL)
    fail(ErrorKind::kContainer, "matrix too large for a GSAM container");
  std::string out(kContainerMagic, 4);
  put_le(out, kContainerVersion, 2);
  put_le(out, static_cast<std::uint64_t>(m.rows()), 4);
  put_le(out, static_cast<std::uint64_t>(m.cols()), 4);
  out.reserve(kContainerHeaderSize + 8 * m.size());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) put_le(out, std::bit_cast<std::uint64_t>(m(r, c)), 8);
  return out;
}

Mat decode_container(const std::string& bytes, const std::string& source) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kContainerMagic, 4) != 0)
    fail(ErrorKind::kContainer, at(source, 0) + "bad magic, expected \"GSAM\"");
  if (bytes.size() < kContainerHeaderSize)
    fail(ErrorKind::kContainer, at(source, bytes.size()) + "truncated header (" +
                                    std::to_string(bytes.size()) + " of " +
                                    std::to_string(kContainerHeaderSize) + " bytes)");
  const auto version = get_le(bytes, kOffsetVersion, 2);
  if (version != kContainerVersion)
    fail(ErrorKind::kContainer, at(source, kOffsetVersion) + "unsupported version " +
                                    std::to_string(version));
  const std::uint64_t rows = get_le(bytes, kOffsetRows, 4);
  const std::uint64_t cols = get_le(bytes, kOffsetCols, 4);
  const std::uint64_t expected = kContainerHeaderSize + rows * cols * 8;
  if (bytes.size() < expected)
    fail(ErrorKind::kContainer, at(source, bytes.size()) + "payload truncated: " +
                                    std::to_string(rows) + "x" + std::to_string(cols) +
                                    " needs " + std::to_string(expected) + " bytes");
  if (bytes.size() > expected)
    fail(ErrorKind::kContainer, at(source, expected) + std::to_string(bytes.size() - expected) +
                                    " trailing bytes after payload");
  Mat m(rows, cols);
  std::size_t off = kContainerHeaderSize;
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c, off += 8) {
      const double v = std::bit_cast<double>(get_le(bytes, off, 8));
      if (!std::isfinite(v))
        fail(ErrorKind::kInput, at(source, off) + "non-finite entry at (" + std::to_string(r) +
                                    "," + std::to_string(c) + ")");
      m(r, c) = v;
    }
  }
  return m;
}

void write_container(const std::string& path, const Mat& m) {
  write_file(path, encode_container(m));
}

Mat read_container(const std::string& path) { return decode_container(read_file(path), path); }

Manifest parse_manifest(const std::string& text, const std::string& source) {
  const Json j = parse_json(text, source, ErrorKind::kManifest);
  if (!j.is_object()) fail(ErrorKind::kManifest, at(source, 0) + "expected a JSON object");
  reject_unknown(j, {"name", "layers"}, source + ": ");
  Manifest m;
  if (j.contains("name")) m.name = required_string(j, "name", source + ": ");
  auto layers = j.find("layers");
  if (layers == j.end() || !layers->is_array() || layers->empty())
    fail(ErrorKind::kManifest, source + ": /layers: expected a nonempty array");
  for (std::size_t i = 0; i < layers->size(); ++i) {
    const Json& l = (*layers)[i];
    const std::string where = source + ": /layers/" + std::to_string(i);
    if (!l.is_object()) fail(ErrorKind::kManifest, where + ": expected an object");
    reject_unknown(l, {"file", "label", "provenance", "flattening"}, where);
    ManifestLayer layer;
    layer.file = required_string(l, "file", where);
    layer.label = optional_string(l, "label", where);
    if (layer.label.empty()) layer.label = "layer" + std::to_string(i);
    layer.provenance = optional_string(l, "provenance", where);
    layer.flattening = optional_string(l, "flattening", where);
    m.layers.push_back(layer);
  }
  return m;
}

Manifest read_manifest(const std::string& path) {
  Manifest m = parse_manifest(read_file(path), path);
  m.dir = std::filesystem::path(path).parent_path().string();
  return m;
}

void write_manifest(const std::string& path, const Manifest& m) {
  Json j;
  j["name"] = m.name;
  j["layers"] = Json::array();
  for (const auto& l : m.layers) {
    Json e;
    e["file"] = l.file;
    e["label"] = l.label;
    e["provenance"] = l.provenance;
    e["flattening"] = l.flattening;
    j["layers"].push_back(e);
  }
  write_json(path, j);
}

std::vector<LayerMatrix> load_chain(const Manifest& m, bool allow_embed) {
  std::vector<LayerMatrix> chain;
  for (const auto& l : m.layers) chain.push_back({l.label, read_container(join_path(m.dir, l.file))});
  if (allow_embed) return chain;
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    if (chain[k + 1].w.cols() != chain[k].w.rows()) {
      fail(ErrorKind::kDimension,
           at(join_path(m.dir, m.layers[k + 1].file), kOffsetCols) + "cols " +
               std::to_string(chain[k + 1].w.cols()) + " do not match rows " +
               std::to_string(chain[k].w.rows()) + " of " + join_path(m.dir, m.layers[k].file) +
               " (interface " + std::to_string(k) + ")");
    }
  }
  return chain;
}

std::vector<int> read_partition(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<std::pair<long, long>> entries;
  long max_row = -1;
  std::size_t offset = 0;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    long row = 0, group = 0;
    if (!(ls >> row)) continue;
    std::string rest;
    if (!(ls >> group) || (ls >> rest) || row < 0 || group < 0) {
      fail(ErrorKind::kConfig, at(path, line_offset) + "line " + std::to_string(line_no) +
                                   ": expected \"row group\" with nonnegative integers");
    }
    entries.emplace_back(row, group);
    max_row = std::max(max_row, row);
  }
  std::vector<int> labels(max_row + 1, -1);
  for (const auto& [row, group] : entries) {
    if (labels[row] != -1)
      fail(ErrorKind::kConfig, path + ": row " + std::to_string(row) + " listed twice");
    labels[row] = static_cast<int>(group);
  }
  for (std::size_t r = 0; r < labels.size(); ++r)
    if (labels[r] == -1) fail(ErrorKind::kConfig, path + ": row " + std::to_string(r) + " missing");
  return labels;
}

void write_partition(const std::string& path, const std::vector<int>& labels) {
  std::string out = "# row group\n";
  for (std::size_t r = 0; r < labels.size(); ++r)
    out += std::to_string(r) + " " + std::to_string(labels[r]) + "\n";
  write_file(path, out);
}

}  // namespace gsacert
