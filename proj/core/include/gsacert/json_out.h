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

#ifndef GSACERT_JSON_OUT_H_
#define GSACERT_JSON_OUT_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gsacert/errors.h"
#include "gsacert/gauge.h"

namespace gsacert {

using Json = nlohmann::ordered_json;

// "%.17g"; non-finite values become the strings "inf", "-inf" and "nan".
std::string format_double(double x);
Json number(double x);

// Two-space indented, insertion-ordered, newline-terminated. Parsing the
// output and dumping it again reproduces the same bytes.
std::string dump_json(const Json& j);
void write_json(const std::string& path, const Json& j);
// Parse errors are raised as `kind` with the byte offset of the failure.
Json parse_json(const std::string& text, const std::string& source, ErrorKind kind);

Json to_json(const Vec& v);
Json to_json(const Mat& m);  // array of rows
Json to_json(const std::vector<Index>& v);
Json to_json(const std::vector<std::vector<Index>>& v);

std::string encode_csv(const Mat& m);
void write_csv(const std::string& path, const Mat& m);

// Linear min-max scaling to 0..255: round(255 (x - min) / (max - min)), or 0
// everywhere when max == min.
struct PgmScaling {
  double min = 0.0;
  double max = 0.0;
  Index rows = 0;
  Index cols = 0;
};

std::string encode_pgm(const Mat& m, PgmScaling* scaling = nullptr);
// Writes `path` and the scaling sidecar `path + ".json"`.
PgmScaling write_pgm(const std::string& path, const Mat& m, const std::string& what);

}  // namespace gsacert

#endif  // GSACERT_JSON_OUT_H_
