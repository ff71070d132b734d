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
//
// The .qpg container. Little-endian layout, normative:
//
//   magic "QPG1"; u8 version = 1; u8 mode (0 = qzip, 1 = qpeg); u8 b; u8 n;
//   u16 width; u16 height; u16 box_side; u8 flags (bit0 dct, bit1 level
//   shift, bit2 quantized); f32 quant_step; u16 box_rows; u16 box_cols;
//   per box (row-major): f32 scale, u16 bond dims chi_2 .. chi_n;
//   then one raw DEFLATE stream (RFC 1951) of every tensor payload in box
//   order, site order, row-major tensor entries (left bond slowest, right
//   bond fastest). Entries are f32, or i32 quantizer indices when flags bit2
//   is set; dequantization multiplies by quant_step.
//
// The header is self-describing: bond profiles fix the payload size, so the
// decoder needs no side information.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <zlib.h>

#include "qpeg/error.hpp"
#include "qpeg/mps.hpp"

namespace qpeg {

constexpr std::uint8_t kContainerVersion = 1;
constexpr std::uint8_t kModeQzip = 0;
constexpr std::uint8_t kModeQpeg = 1;
constexpr std::uint8_t kFlagDct = 0x01;
constexpr std::uint8_t kFlagLevelShift = 0x02;
constexpr std::uint8_t kFlagQuantized = 0x04;

struct BoxRecord {
  float scale = 0.0f;
  std::vector<std::uint16_t> bonds;  // chi_2 .. chi_n
};

struct Container {
  std::uint8_t version = kContainerVersion;
  std::uint8_t mode = kModeQzip;
  std::uint8_t branch = 2;
  std::uint8_t levels = 1;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::uint16_t box_side = 0;
  std::uint8_t flags = 0;
  float quant_step = 0.0f;
  std::uint16_t box_rows = 0;
  std::uint16_t box_cols = 0;
  std::vector<BoxRecord> boxes;
  std::vector<std::uint8_t> payload;  // raw DEFLATE stream

  /// Bond profile of one box as full chi_1 .. chi_{n+1} dims.
  std::vector<int> bond_profile(std::size_t box) const {
    std::vector<int> chi;
    chi.push_back(1);
    for (std::uint16_t v : boxes[box].bonds) chi.push_back(v);
    chi.push_back(1);
    return chi;
  }
};

namespace detail {

inline void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>((v >> (8 * k)) & 0xff));
}

inline void put_f32(std::vector<std::uint8_t>& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

inline void put_i32(std::vector<std::uint8_t>& out, std::int32_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
}

struct ByteReader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  void need(std::size_t count, const char* what) const {
    if (bytes.size() - pos < count)
      throw format_error(std::string("container: truncated before ") + what, pos);
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes[pos++];
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    const std::uint16_t v = static_cast<std::uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
    pos += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes[pos + k]) << (8 * k);
    pos += 4;
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
};

/// Raw DEFLATE (no zlib/gzip wrapper), fixed settings for determinism.
inline std::vector<std::uint8_t> deflate_bytes(std::span<const std::uint8_t> raw) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw resource_error("deflate: initialization failed");
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(raw.size())));
  zs.next_in = const_cast<Bytef*>(raw.data());
  zs.avail_in = static_cast<uInt>(raw.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw resource_error("deflate: compression failed");
  out.resize(out.size() - zs.avail_out);
  return out;
}

inline std::vector<std::uint8_t> inflate_bytes(std::span<const std::uint8_t> compressed,
                                               std::size_t expected_size, std::size_t offset_base) {
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK) throw resource_error("inflate: initialization failed");
  std::vector<std::uint8_t> out(expected_size);
  zs.next_in = const_cast<Bytef*>(compressed.data());
  zs.avail_in = static_cast<uInt>(compressed.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t consumed = compressed.size() - zs.avail_in;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.avail_out != 0)
    throw format_error("container: corrupt DEFLATE payload", offset_base + consumed);
  return out;
}

}  // namespace detail

/// Entry count of the full tensor payload described by a container header.
inline std::int64_t payload_entry_count(const Container& c) {
  std::int64_t total = 0;
  const int d = static_cast<int>(c.branch) * c.branch;
  for (std::size_t box = 0; box < c.boxes.size(); ++box) {
    const std::vector<int> chi = c.bond_profile(box);
    for (std::size_t a = 0; a + 1 < chi.size(); ++a)
      total += static_cast<std::int64_t>(chi[a]) * d * chi[a + 1];
  }
  return total;
}

/// Serializes site tensors (row-major entry order) and deflates the stream.
/// quant_step = 0 stores raw 32-bit floats; quant_step > 0 stores i32
/// quantizer indices round(v / step).
inline std::vector<std::uint8_t> pack_payload(std::span<const SiteTensor> tensors,
                                              double quant_step) {
  if (quant_step < 0.0 || !std::isfinite(quant_step))
    throw domain_error("pack_payload: quant_step must be finite and >= 0");
  std::vector<std::uint8_t> raw;
  std::int64_t total = 0;
  for (const SiteTensor& t : tensors) total += t.size();
  raw.reserve(static_cast<std::size_t>(total) * 4);
  for (const SiteTensor& t : tensors)
    for (int a = 0; a < t.left; ++a)
      for (int i = 0; i < t.phys; ++i)
        for (int b = 0; b < t.right; ++b) {
          const double v = t.at(a, i, b);
          if (!std::isfinite(v)) throw encode_error("pack_payload: non-finite tensor entry");
          if (quant_step == 0.0) {
            detail::put_f32(raw, static_cast<float>(v));
          } else {
            const double q = std::round(v / quant_step);
            if (q < std::numeric_limits<std::int32_t>::min() ||
                q > std::numeric_limits<std::int32_t>::max())
              throw encode_error("pack_payload: quantizer index overflows 32 bits");
            detail::put_i32(raw, static_cast<std::int32_t>(q));
          }
        }
  return detail::deflate_bytes(raw);
}

/// Inflates and deserializes a payload against the expected site shapes.
/// Shapes are (left, phys, right) triples in stream order.
struct TensorShape {
  int left = 1;
  int phys = 1;
  int right = 1;
};

inline std::vector<SiteTensor> unpack_payload(std::span<const std::uint8_t> bytes,
                                              std::span<const TensorShape> profile,
                                              double quant_step, std::size_t offset_base = 0) {
  std::int64_t total = 0;
  for (const TensorShape& s : profile) total += static_cast<std::int64_t>(s.left) * s.phys * s.right;
  const std::vector<std::uint8_t> raw =
      detail::inflate_bytes(bytes, static_cast<std::size_t>(total) * 4, offset_base);

  detail::ByteReader in{raw};
  std::vector<SiteTensor> tensors;
  tensors.reserve(profile.size());
  for (const TensorShape& s : profile) {
    SiteTensor t(s.left, s.phys, s.right);
    for (int a = 0; a < t.left; ++a)
      for (int i = 0; i < t.phys; ++i)
        for (int b = 0; b < t.right; ++b) {
          double v;
          if (quant_step == 0.0) {
            const float f = in.f32("tensor entry");
            if (!std::isfinite(f))
              throw format_error("container: non-finite tensor entry", offset_base);
            v = static_cast<double>(f);
          } else {
            v = static_cast<double>(static_cast<std::int32_t>(in.u32("tensor entry"))) * quant_step;
          }
          t.at(a, i, b) = v;
        }
    tensors.push_back(std::move(t));
  }
  return tensors;
}

inline std::vector<std::uint8_t> serialize(const Container& c) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), {'Q', 'P', 'G', '1'});
  detail::put_u8(out, c.version);
  detail::put_u8(out, c.mode);
  detail::put_u8(out, c.branch);
  detail::put_u8(out, c.levels);
  detail::put_u16(out, c.width);
  detail::put_u16(out, c.height);
  detail::put_u16(out, c.box_side);
  detail::put_u8(out, c.flags);
  detail::put_f32(out, c.quant_step);
  detail::put_u16(out, c.box_rows);
  detail::put_u16(out, c.box_cols);
  for (const BoxRecord& box : c.boxes) {
    detail::put_f32(out, box.scale);
    for (std::uint16_t v : box.bonds) detail::put_u16(out, v);
  }
  out.insert(out.end(), c.payload.begin(), c.payload.end());
  return out;
}

inline Container parse_container(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in{bytes};
  in.need(4, "magic");
  if (std::memcmp(bytes.data(), "QPG1", 4) != 0)
    throw format_error("container: bad magic, expected QPG1", 0);
  in.pos = 4;

  Container c;
  const std::size_t version_at = in.pos;
  c.version = in.u8("version");
  if (c.version != kContainerVersion)
    throw format_error("container: unsupported version " + std::to_string(c.version), version_at);
  c.mode = in.u8("mode");
  if (c.mode != kModeQzip && c.mode != kModeQpeg)
    throw format_error("container: unknown mode " + std::to_string(c.mode), in.pos - 1);
  c.branch = in.u8("branch factor");
  c.levels = in.u8("levels");
  if (c.branch < 2) throw format_error("container: branch factor must be >= 2", in.pos - 2);
  if (c.levels < 1) throw format_error("container: levels must be >= 1", in.pos - 1);
  c.width = in.u16("width");
  c.height = in.u16("height");
  c.box_side = in.u16("box side");
  if (c.width == 0 || c.height == 0) throw format_error("container: empty image", in.pos - 6);

  std::int64_t side = 1;
  for (int k = 0; k < c.levels; ++k) {
    side *= c.branch;
    if (side > AddressScheme::max_side)
      throw format_error("container: box side b^n out of range", in.pos - 2);
  }
  if (side != c.box_side) throw format_error("container: box side is not b^n", in.pos - 2);

  const std::size_t flags_at = in.pos;
  c.flags = in.u8("flags");
  if (c.flags & ~(kFlagDct | kFlagLevelShift | kFlagQuantized))
    throw format_error("container: unknown flag bits", flags_at);
  c.quant_step = in.f32("quant step");
  const bool quantized = (c.flags & kFlagQuantized) != 0;
  if (quantized && !(c.quant_step > 0.0f && std::isfinite(c.quant_step)))
    throw format_error("container: quantized flag with invalid step", flags_at + 1);
  if (!quantized && c.quant_step != 0.0f)
    throw format_error("container: nonzero quant step without quantized flag", flags_at + 1);

  c.box_rows = in.u16("box rows");
  c.box_cols = in.u16("box cols");
  const auto expect_boxes = [&](std::uint16_t extent, std::uint16_t have, const char* axis) {
    const std::uint32_t want = (static_cast<std::uint32_t>(extent) + c.box_side - 1) / c.box_side;
    if (want != have)
      throw format_error(std::string("container: box grid does not tile the ") + axis, in.pos - 4);
  };
  expect_boxes(c.height, c.box_rows, "height");
  expect_boxes(c.width, c.box_cols, "width");
  if (c.mode == kModeQzip &&
      (c.flags != 0 || c.box_rows != 1 || c.box_cols != 1 || c.width != c.box_side ||
       c.height != c.box_side))
    throw format_error("container: qzip mode must be a single unprocessed box", flags_at);

  const int d = static_cast<int>(c.branch) * c.branch;
  const std::size_t box_count =
      static_cast<std::size_t>(c.box_rows) * static_cast<std::size_t>(c.box_cols);
  c.boxes.resize(box_count);
  for (BoxRecord& box : c.boxes) {
    const std::size_t scale_at = in.pos;
    box.scale = in.f32("box scale");
    if (!std::isfinite(box.scale)) throw format_error("container: non-finite box scale", scale_at);
    box.bonds.resize(static_cast<std::size_t>(c.levels) - 1);
    for (std::size_t a = 0; a < box.bonds.size(); ++a) {
      const std::size_t bond_at = in.pos;
      const std::uint16_t chi = in.u16("bond dimension");
      // Schmidt-rank ceiling from both chain ends.
      const std::int64_t left_cap = detail::pow_int(d, static_cast<int>(a) + 1);
      const std::int64_t right_cap = detail::pow_int(d, c.levels - 1 - static_cast<int>(a));
      if (chi < 1 || chi > std::min(left_cap, right_cap))
        throw format_error("container: inconsistent bond profile", bond_at);
      box.bonds[a] = chi;
    }
  }
  c.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(in.pos), bytes.end());
  return c;
}

}  // namespace qpeg
