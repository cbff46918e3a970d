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

#include "gsacert/json_out.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "gsacert/container.h"

namespace gsacert {
namespace {

void dump(const Json& j, int depth, std::string& out) {
  const std::string pad(2 * depth + 2, ' ');
  const std::string close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(k).dump() + ": ";
        dump(v, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& v : j) flat = flat && v.is_primitive();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(j[i], depth + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, 0, out);
  out += "\n";
  return out;
}

void write_json(const std::string& path, const Json& j) { write_file(path, dump_json(j)); }

Json parse_json(const std::string& text, const std::string& source, ErrorKind kind) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(kind, source + ": offset " + std::to_string(e.byte) + ": " + e.what());
  }
}

Json to_json(const Vec& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(number(v(i)));
  return j;
}

Json to_json(const Mat& m) {
  Json j = Json::array();
  for (Index r = 0; r < m.rows(); ++r) j.push_back(to_json(Vec(m.row(r).transpose())));
  return j;
}

Json to_json(const std::vector<Index>& v) {
  Json j = Json::array();
  for (Index x : v) j.push_back(x);
  return j;
}

Json to_json(const std::vector<std::vector<Index>>& v) {
  Json j = Json::array();
  for (const auto& s : v) j.push_back(to_json(s));
  return j;
}

std::string encode_csv(const Mat& m) {
  std::string out;
  char buf[32];
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const Mat& m) { write_file(path, encode_csv(m)); }

std::string encode_pgm(const Mat& m, PgmScaling* scaling) {
  PgmScaling s;
  s.rows = m.rows();
  s.cols = m.cols();
  if (m.size()) {
    s.min = m.minCoeff();
    s.max = m.maxCoeff();
  }
  std::string out = "P5\n" + std::to_string(m.cols()) + " " + std::to_string(m.rows()) + "\n255\n";
  const double range = s.max - s.min;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      const double v = range > 0 ? std::round(255.0 * (m(r, c) - s.min) / range) : 0.0;
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(v, 0.0, 255.0))));
    }
  }
  if (scaling) *scaling = s;
  return out;
}

PgmScaling write_pgm(const std::string& path, const Mat& m, const std::string& what) {
  PgmScaling s;
  write_file(path, encode_pgm(m, &s));
  Json side;
  side["image"] = std::filesystem::path(path).filename().string();
  side["matrix"] = what;
  side["rows"] = s.rows;
  side["cols"] = s.cols;
  side["min"] = number(s.min);
  side["max"] = number(s.max);
  side["mapping"] = "round(255*(x-min)/(max-min)), 0 if max == min";
  write_json(path + ".json", side);
  return s;
}

}  // namespace gsacert
