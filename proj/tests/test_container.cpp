// Copyright (c) the qpeg project authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "qpeg/codec.hpp"
#include "qpeg/container.hpp"
#include "support/synthetic.hpp"

using qpeg::Container;
using qpeg::SiteTensor;
using qpeg::TensorShape;

namespace {

std::vector<SiteTensor> sample_tensors(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<SiteTensor> out = {SiteTensor(1, 4, 3), SiteTensor(3, 4, 2), SiteTensor(2, 4, 1)};
  for (auto& t : out)
    for (Eigen::Index i = 0; i < t.data.size(); ++i)
      t.data[i] = static_cast<double>(static_cast<float>(dist(rng)));  // f32-exact values
  return out;
}

std::vector<TensorShape> shapes_of(const std::vector<SiteTensor>& ts) {
  std::vector<TensorShape> out;
  for (const auto& t : ts) out.push_back({t.left, t.phys, t.right});
  return out;
}

std::vector<std::uint8_t> valid_qzip_bytes() {
  return qpeg::qzip_encode(qpeg_test::random_image(16, 16, 77), 2, 4);
}

}  // namespace

TEST_CASE("payload round-trips bit-exactly without quantization", "[container]") {
  const auto tensors = sample_tensors(1);
  const auto bytes = qpeg::pack_payload(tensors, 0.0);
  const auto back = qpeg::unpack_payload(bytes, shapes_of(tensors), 0.0);
  REQUIRE(back.size() == tensors.size());
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    CHECK(back[i].left == tensors[i].left);
    CHECK(back[i].right == tensors[i].right);
    REQUIRE(back[i].data == tensors[i].data);
  }
}

TEST_CASE("quantized payload obeys the half-step error bound", "[container]") {
  const double q = 0.125;
  auto tensors = sample_tensors(2);
  const auto bytes = qpeg::pack_payload(tensors, q);
  const auto back = qpeg::unpack_payload(bytes, shapes_of(tensors), q);
  for (std::size_t i = 0; i < tensors.size(); ++i)
    REQUIRE((back[i].data - tensors[i].data).cwiseAbs().maxCoeff() <= q / 2 + 1e-12);
}

TEST_CASE("all-zero tensors deflate below raw size", "[container]") {
  std::vector<SiteTensor> zeros = {SiteTensor(4, 16, 4), SiteTensor(4, 16, 4)};
  const auto bytes = qpeg::pack_payload(zeros, 0.0);
  const std::int64_t raw = (zeros[0].size() + zeros[1].size()) * 4;
  CHECK(static_cast<std::int64_t>(bytes.size()) < raw);
}

TEST_CASE("unencodable entries raise encode errors", "[container]") {
  auto tensors = sample_tensors(3);
  tensors[1].data[5] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(qpeg::pack_payload(tensors, 0.0), qpeg::encode_error);

  tensors = sample_tensors(3);
  tensors[0].data[0] = 1e300;
  CHECK_THROWS_AS(qpeg::pack_payload(tensors, 0.5), qpeg::encode_error);  // index overflow
  CHECK_THROWS_AS(qpeg::pack_payload(tensors, -1.0), qpeg::domain_error);
}

TEST_CASE("non-finite payload floats are rejected on decode", "[container]") {
  std::vector<std::uint8_t> raw = {0x00, 0x00, 0x80, 0x7f};  // +inf as f32 LE
  for (int i = 0; i < 15; ++i) raw.insert(raw.end(), {0, 0, 0, 0});
  const auto deflated = qpeg::detail::deflate_bytes(raw);
  const std::vector<TensorShape> profile = {TensorShape{1, 4, 2}, TensorShape{2, 4, 1}};
  CHECK_THROWS_AS(qpeg::unpack_payload(deflated, profile, 0.0), qpeg::format_error);
}

TEST_CASE("header fields survive a serialize/parse round trip", "[container]") {
  const auto bytes = valid_qzip_bytes();
  const Container c = qpeg::parse_container(bytes);
  CHECK(c.version == 1);
  CHECK(c.mode == qpeg::kModeQzip);
  CHECK(c.branch == 2);
  CHECK(c.levels == 4);
  CHECK(c.width == 16);
  CHECK(c.height == 16);
  CHECK(c.box_side == 16);
  CHECK(c.flags == 0);
  CHECK(c.quant_step == 0.0f);
  CHECK(c.box_rows == 1);
  CHECK(c.box_cols == 1);
  REQUIRE(c.boxes.size() == 1);
  CHECK(c.boxes[0].bonds == std::vector<std::uint16_t>{4, 16, 4});
  CHECK(qpeg::serialize(c) == bytes);
}

TEST_CASE("serialization is deterministic", "[container]") {
  CHECK(valid_qzip_bytes() == valid_qzip_bytes());
  const auto img = qpeg_test::synthetic_photo(20, 11);
  qpeg::QpegConfig config;
  CHECK(qpeg::qpeg_encode(img, config) == qpeg::qpeg_encode(img, config));
}

TEST_CASE("parser rejects corrupted headers", "[container]") {
  const auto good = valid_qzip_bytes();

  auto bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(qpeg::parse_container(bad), qpeg::format_error);

  bad = good;
  bad[4] = 2;  // version
  CHECK_THROWS_MATCHES(qpeg::parse_container(bad), qpeg::format_error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("unsupported version")));

  bad = good;
  bad[5] = 7;  // mode
  CHECK_THROWS_AS(qpeg::parse_container(bad), qpeg::format_error);

  bad = good;
  bad[14] = 0xff;  // flags: unknown bits
  CHECK_THROWS_AS(qpeg::parse_container(bad), qpeg::format_error);

  bad = good;
  bad[12] = 15;  // box_side low byte: 16 -> 15, no longer b^n
  CHECK_THROWS_AS(qpeg::parse_container(bad), qpeg::format_error);

  bad = good;
  // First bond dimension chi_2 lives right after the 23-byte fixed header +
  // 4-byte scale; cap for b=2 is 4, so 5 must be rejected.
  bad[27] = 5;
  CHECK_THROWS_AS(qpeg::parse_container(bad), qpeg::format_error);

  bad = good;
  bad.resize(20);  // truncated mid-header
  CHECK_THROWS_AS(qpeg::parse_container(bad), qpeg::format_error);
}

TEST_CASE("mode invariants are enforced", "[container]") {
  const auto good = valid_qzip_bytes();

  auto bad = good;
  bad[14] = qpeg::kFlagDct;  // qzip must carry no flags
  CHECK_THROWS_AS(qpeg::parse_container(bad), qpeg::format_error);

  // Quantized flag without a step, and a step without the flag.
  const auto img = qpeg_test::random_image(8, 8, 5);
  qpeg::QpegConfig config;
  config.levels = 3;
  config.chi_trunc = 2;
  const auto lossy = qpeg::qpeg_encode(img, config);
  bad = lossy;
  bad[14] |= qpeg::kFlagQuantized;
  CHECK_THROWS_AS(qpeg::parse_container(bad), qpeg::format_error);
  bad = lossy;
  bad[15] = 0x00;
  bad[16] = 0x00;
  bad[17] = 0x80;
  bad[18] = 0x3f;  // quant_step = 1.0f but flag clear
  CHECK_THROWS_AS(qpeg::parse_container(bad), qpeg::format_error);
}

TEST_CASE("payload corruption yields format errors, never partial images", "[container]") {
  const auto good = valid_qzip_bytes();
  const Container c = qpeg::parse_container(good);
  const std::size_t header = good.size() - c.payload.size();

  auto bad = good;
  bad.resize(header + c.payload.size() / 2);  // truncated DEFLATE stream
  CHECK_THROWS_AS(qpeg::decode(qpeg::parse_container(bad)), qpeg::format_error);

  bad = good;
  bad[header] = static_cast<std::uint8_t>(bad[header] | 0x06);  // reserved BTYPE 11
  CHECK_THROWS_AS(qpeg::decode(qpeg::parse_container(bad)), qpeg::format_error);

  bad = good;
  bad.resize(header);  // payload missing entirely
  CHECK_THROWS_AS(qpeg::decode(qpeg::parse_container(bad)), qpeg::format_error);
}
