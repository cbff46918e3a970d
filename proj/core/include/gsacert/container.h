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

#ifndef GSACERT_CONTAINER_H_
#define GSACERT_CONTAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "gsacert/gauge.h"

namespace gsacert {

// GSAM matrix file: "GSAM", u16 version, u32 rows, u32 cols (all little
// endian), then rows*cols float64 LE values in row-major order.
constexpr char kContainerMagic[4] = {'G', 'S', 'A', 'M'};
constexpr std::uint16_t kContainerVersion = 1;
constexpr std::size_t kContainerHeaderSize = 14;
constexpr std::size_t kOffsetVersion = 4;
constexpr std::size_t kOffsetRows = 6;
constexpr std::size_t kOffsetCols = 10;

std::string encode_container(const Mat& m);
// `source` names the origin in error messages.
Mat decode_container(const std::string& bytes, const std::string& source);
void write_container(const std::string& path, const Mat& m);
Mat read_container(const std::string& path);

struct ManifestLayer {
  std::string file;   // relative to the manifest directory
  std::string label;
  std::string provenance;  // model layer or block the operator was taken from
  std::string flattening;  // how the tensor became a matrix
};

struct Manifest {
  std::string name = "chain";
  std::vector<ManifestLayer> layers;
  std::string dir;  // directory the manifest was read from
};

Manifest parse_manifest(const std::string& text, const std::string& source);
Manifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const Manifest& m);

// Reads every layer listed in the manifest. Unless `allow_embed` is set,
// consecutive layers must compose (cols of layer k+1 = rows of layer k).
std::vector<LayerMatrix> load_chain(const Manifest& m, bool allow_embed = false);

// Row-partition file: one "row group" pair per line, '#' starts a comment.
// Group 0 marks unassigned rows.
std::vector<int> read_partition(const std::string& path);
void write_partition(const std::string& path, const std::vector<int>& labels);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);
std::string join_path(const std::string& dir, const std::string& file);

}  // namespace gsacert

#endif  // GSACERT_CONTAINER_H_
