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

#include <cstring>
#include <filesystem>
#include <limits>
#include <set>

#include <gtest/gtest.h>

#include "gsacert/config.h"
#include "gsacert/container.h"
#include "gsacert/errors.h"
#include "gsacert/json_out.h"
#include "gsacert/synth.h"

namespace gsacert {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("gsacert_io_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

// Expects `fn` to throw an Error of `kind` whose message contains `needle`.
template <typename Fn>
void expect_error(Fn fn, ErrorKind kind, const std::string& needle) {
  try {
    fn();
    ADD_FAILURE() << "no error raised";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(Container, HeaderLayout) {
  Mat m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  std::string b = encode_container(m);
  ASSERT_EQ(b.size(), kContainerHeaderSize + 6 * 8);
  EXPECT_EQ(b.substr(0, 4), "GSAM");
  EXPECT_EQ(static_cast<unsigned char>(b[4]), kContainerVersion);
  EXPECT_EQ(b[5], 0);
  EXPECT_EQ(b[6], 2);
  EXPECT_EQ(b[10], 3);
  double second;
  std::memcpy(&second, b.data() + kContainerHeaderSize + 8, 8);
  EXPECT_EQ(second, 2.0);  // row-major
}

TEST(Container, BitExactRoundTrip) {
  Rng rng(1);
  Mat m = gaussian_matrix(7, 5, rng);
  m(0, 0) = std::numeric_limits<double>::denorm_min();
  m(1, 1) = -0.0;
  m(2, 2) = std::numeric_limits<double>::max();
  Mat back = decode_container(encode_container(m), "mem");
  ASSERT_EQ(back.rows(), 7);
  ASSERT_EQ(back.cols(), 5);
  EXPECT_EQ(std::memcmp(back.data(), m.data(), sizeof(double) * m.size()), 0);
}

TEST(Container, BadMagic) {
  std::string b = encode_container(Mat::Identity(2, 2));
  b[0] = 'X';
  expect_error([&] { decode_container(b, "w.gsam"); }, ErrorKind::kContainer, "w.gsam: offset 0");
}

TEST(Container, TruncatedHeader) {
  expect_error([&] { decode_container("GSAM\x01", "h.gsam"); }, ErrorKind::kContainer,
               "h.gsam: offset 5");
}

TEST(Container, UnsupportedVersion) {
  std::string b = encode_container(Mat::Identity(2, 2));
  b[4] = 9;
  expect_error([&] { decode_container(b, "v.gsam"); }, ErrorKind::kContainer, "offset 4");
}

TEST(Container, TruncatedPayload) {
  std::string b = encode_container(Mat::Identity(2, 2));
  b.resize(b.size() - 3);
  expect_error([&] { decode_container(b, "p.gsam"); }, ErrorKind::kContainer,
               "offset " + std::to_string(b.size()));
}

TEST(Container, TrailingBytes) {
  std::string b = encode_container(Mat::Identity(2, 2));
  const std::size_t expected = b.size();
  b += "xx";
  expect_error([&] { decode_container(b, "t.gsam"); }, ErrorKind::kContainer,
               "offset " + std::to_string(expected));
}

TEST(Container, NonFiniteEntry) {
  Mat m = Mat::Identity(2, 2);
  m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  expect_error([&] { decode_container(encode_container(m), "n.gsam"); }, ErrorKind::kInput,
               "offset " + std::to_string(kContainerHeaderSize + 2 * 8));
}

TEST_F(TempDir, ManifestAndChain) {
  Manifest man;
  man.name = "tiny";
  for (int k = 0; k < 2; ++k) {
    write_container(path("l" + std::to_string(k) + ".gsam"), Mat::Identity(3, 3) * (k + 1));
    man.layers.push_back({"l" + std::to_string(k) + ".gsam", "L" + std::to_string(k), "block", "rows=out"});
  }
  write_manifest(path("manifest.json"), man);
  Manifest back = read_manifest(path("manifest.json"));
  EXPECT_EQ(back.name, "tiny");
  ASSERT_EQ(back.layers.size(), 2u);
  EXPECT_EQ(back.layers[1].label, "L1");
  EXPECT_EQ(back.layers[0].provenance, "block");
  auto chain = load_chain(back);
  EXPECT_EQ(chain[1].w, Mat::Identity(3, 3) * 2);
}

TEST_F(TempDir, DimensionMismatchNamesFile) {
  write_container(path("a.gsam"), Mat::Identity(3, 3));
  write_container(path("b.gsam"), Mat::Identity(2, 2));
  Manifest man;
  man.layers = {{"a.gsam", "a", "", ""}, {"b.gsam", "b", "", ""}};
  write_manifest(path("m.json"), man);
  expect_error([&] { load_chain(read_manifest(path("m.json"))); }, ErrorKind::kDimension,
               "b.gsam: offset 10");
  EXPECT_NO_THROW(load_chain(read_manifest(path("m.json")), true));
}

TEST(Manifest, Errors) {
  expect_error([] { parse_manifest("{\"layers\": [", "m.json"); }, ErrorKind::kManifest,
               "m.json: offset");
  expect_error([] { parse_manifest("{\"layers\": []}", "m.json"); }, ErrorKind::kManifest,
               "/layers");
  expect_error([] { parse_manifest(R"({"layers": [{"file": 3}]})", "m.json"); },
               ErrorKind::kManifest, "/layers/0/file");
  expect_error([] { parse_manifest(R"({"layers": [{"file": "a", "x": 1}]})", "m.json"); },
               ErrorKind::kManifest, "/layers/0/x: unknown key");
}

TEST_F(TempDir, MissingFileIsIoError) {
  expect_error([&] { read_container(path("nope.gsam")); }, ErrorKind::kIo, "nope.gsam");
}

TEST_F(TempDir, PartitionRoundTrip) {
  std::vector<int> labels = {1, 0, 2, 2, 1};
  write_partition(path("p.txt"), labels);
  EXPECT_EQ(read_partition(path("p.txt")), labels);
  write_file(path("bad.txt"), "# rows\n0 1\n1 x\n");
  expect_error([&] { read_partition(path("bad.txt")); }, ErrorKind::kConfig, "line 3");
  write_file(path("dup.txt"), "0 1\n0 2\n");
  expect_error([&] { read_partition(path("dup.txt")); }, ErrorKind::kConfig, "listed twice");
}

TEST(Json, FloatFormatting) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(number(std::numeric_limits<double>::infinity()), Json("inf"));
  EXPECT_EQ(number(-std::numeric_limits<double>::infinity()), Json("-inf"));
  EXPECT_EQ(number(std::nan("")), Json("nan"));
}

TEST(Json, ByteStableRoundTrip) {
  Json j;
  j["b"] = number(0.1);
  j["a"] = to_json(Vec((Vec(3) << 1.5, -2.25e-300, 3).finished()));
  j["m"] = to_json(Mat(Mat::Identity(2, 2)));
  j["sets"] = to_json(std::vector<std::vector<Index>>{{0, 2}, {1}});
  j["nested"]["x"] = "y";
  const std::string once = dump_json(j);
  EXPECT_EQ(once.back(), '\n');
  EXPECT_LT(once.find("\"b\""), once.find("\"a\""));  // insertion order
  const std::string twice = dump_json(parse_json(once, "mem", ErrorKind::kInput));
  EXPECT_EQ(once, twice);
  EXPECT_NE(once.find("[1.5, -2.25e-300, 3]"), std::string::npos) << once;
}

TEST(Json, ParseErrorOffset) {
  expect_error([] { parse_json("{\"a\": }", "c.json", ErrorKind::kConfig); }, ErrorKind::kConfig,
               "c.json: offset 7");
}

TEST(Csv, Rows) {
  Mat m(2, 2);
  m << 1, 0.5, -3, 0.1;
  EXPECT_EQ(encode_csv(m), "1,0.5\n-3,0.10000000000000001\n");
}

TEST(Pgm, LinearScaling) {
  Mat m(2, 2);
  m << 0, 1, 2, 4;
  PgmScaling s;
  std::string img = encode_pgm(m, &s);
  const std::string header = "P5\n2 2\n255\n";
  ASSERT_EQ(img.substr(0, header.size()), header);
  ASSERT_EQ(img.size(), header.size() + 4);
  const auto px = [&](int i) { return static_cast<unsigned char>(img[header.size() + i]); };
  EXPECT_EQ(px(0), 0);
  EXPECT_EQ(px(1), 64);  // round(63.75)
  EXPECT_EQ(px(2), 128);  // round(127.5)
  EXPECT_EQ(px(3), 255);
  EXPECT_EQ(s.min, 0.0);
  EXPECT_EQ(s.max, 4.0);
}

TEST(Pgm, ConstantMatrixIsBlack) {
  std::string img = encode_pgm(Mat::Constant(1, 3, 7.0));
  EXPECT_EQ(img.substr(img.size() - 3), std::string(3, '\0'));
}

TEST_F(TempDir, PgmSidecar) {
  write_pgm(path("h/m.pgm"), Mat::Identity(3, 3), "M_0");
  Json side = parse_json(read_file(path("h/m.pgm.json")), "side", ErrorKind::kInput);
  EXPECT_EQ(side["image"], "m.pgm");
  EXPECT_EQ(side["matrix"], "M_0");
  EXPECT_EQ(side["max"], 1.0);
  EXPECT_EQ(side["rows"], 3);
}

TEST_F(TempDir, ConfigRoundTrip) {
  ProtocolConfig c;
  c.energy_threshold = 0.05;
  c.support = SupportRule{{2, 2, 1}, {}};
  c.accepted = {{1}, {0}, {}};
  c.eps_noise = 1e-9;
  c.jacobian_bound = 2.5;
  c.baselines = {Baseline::kGaussian, Baseline::kPermuted};
  c.seed = 42;
  write_config(path("c.json"), c);
  ProtocolConfig back = read_config(path("c.json"));
  EXPECT_EQ(dump_json(config_to_json(back)), dump_json(config_to_json(c)));
  EXPECT_TRUE(std::isnan(back.eps_alpha));
  EXPECT_EQ(back.support.sizes, c.support.sizes);
  EXPECT_EQ(back.baselines, c.baselines);
}

TEST_F(TempDir, ConfigLoadsPartitionRelative) {
  write_partition(path("part.txt"), {1, 1, 0, 2});
  write_file(path("c.json"), R"({"partition_file": "part.txt"})");
  ProtocolConfig c = read_config(path("c.json"));
  EXPECT_EQ(c.partition, (std::vector<int>{1, 1, 0, 2}));
}

TEST(Config, Errors) {
  expect_error([] { config_from_json(Json::parse(R"({"bogus": 1})"), "c.json"); },
               ErrorKind::kConfig, "c.json: /bogus: unknown key");
  expect_error([] { config_from_json(Json::parse(R"({"energy_threshold": 1.5})"), "c.json"); },
               ErrorKind::kConfig, "energy_threshold");
  expect_error([] { config_from_json(Json::parse(R"({"energy_threshold": "x"})"), "c.json"); },
               ErrorKind::kConfig, "energy_threshold");
  expect_error([] { config_from_json(Json::parse(R"({"variant": "sideways"})"), "c.json"); },
               ErrorKind::kConfig, "sideways");
  expect_error(
      [] { config_from_json(Json::parse(R"({"c_overlap": 0.34})"), "c.json"); },
      ErrorKind::kConfig, "c_overlap");
  expect_error(
      [] {
        config_from_json(Json::parse(R"({"support": {"sizes": [1], "fractions": [0.5]}})"),
                         "c.json");
      },
      ErrorKind::kConfig, "support");
}

TEST(Errors, DistinctExitCodes) {
  std::set<int> codes;
  for (auto k : {ErrorKind::kInput, ErrorKind::kRange, ErrorKind::kFitDomain,
                 ErrorKind::kDegenerate, ErrorKind::kContainer, ErrorKind::kManifest,
                 ErrorKind::kConfig, ErrorKind::kDimension, ErrorKind::kIo}) {
    const int c = exit_code(k);
    EXPECT_GE(c, 2);
    codes.insert(c);
  }
  EXPECT_EQ(codes.size(), 9u);
}

}  // namespace
}  // namespace gsacert
