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
// End-to-end codec pipelines.
//
// qpeg (lossy): pad the image to a grid of b^n x b^n boxes by edge
// replication, per box subtract the mid-gray level, apply the orthonormal
// 2D DCT, cast the coefficient block to a ket, fit a bond-capped MPS by
// alternating least squares, and serialize all boxes into one container.
//
// qzip (lossless): the whole image is a single untransformed box factorized
// exactly; decoding reproduces the input bytes.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "qpeg/als.hpp"
#include "qpeg/container.hpp"
#include "qpeg/dct.hpp"
#include "qpeg/error.hpp"
#include "qpeg/image.hpp"
#include "qpeg/mps.hpp"
#include "qpeg/rg_map.hpp"

namespace qpeg {

/// Lossy-pipeline parameters. `chi_trunc` is the bond cap and overrides the
/// one inside `als`; the remaining ALS knobs are taken from `als` unchanged.
struct QpegConfig {
  int branch = 2;
  int levels = 4;
  int chi_trunc = 4;
  bool use_dct = true;
  bool level_shift = true;
  double quant_step = 0.0;  // 0 = store raw floats
  AlsConfig als;

  std::int64_t box_side() const { return AddressScheme(branch, levels).side(); }
};

inline double mean_squared_error(const ImageGrid& a, const ImageGrid& b) {
  if (a.width != b.width || a.height != b.height)
    throw domain_error("mean_squared_error: image dimensions differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double diff = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
    sum += diff * diff;
  }
  return sum / static_cast<double>(a.pixels.size());
}

/// Peak signal-to-noise ratio against the 8-bit peak, 10 log10(255^2 / MSE).
/// Identical images give +infinity.
inline double psnr(const ImageGrid& a, const ImageGrid& b) {
  const double mse = mean_squared_error(a, b);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

struct Metrics {
  double mse = 0.0;
  double psnr_db = 0.0;
  std::int64_t stored_bits = 0;
  double bits_per_pixel = 0.0;
};

inline Metrics metrics(const ImageGrid& original, const ImageGrid& decoded,
                       std::size_t container_bytes) {
  Metrics m;
  m.mse = mean_squared_error(original, decoded);
  m.psnr_db = m.mse == 0.0 ? std::numeric_limits<double>::infinity()
                           : 10.0 * std::log10(255.0 * 255.0 / m.mse);
  m.stored_bits = static_cast<std::int64_t>(container_bytes) * 8;
  m.bits_per_pixel = static_cast<double>(m.stored_bits) /
                     (static_cast<double>(original.width) * original.height);
  return m;
}

namespace detail {

// Container field widths cap what an encoder may emit.
constexpr int kMaxGeometry = 65535;

inline void check_geometry(int branch, int levels, std::int64_t side) {
  if (branch > 255) throw domain_error("codec: branch factor exceeds the container limit of 255");
  if (levels > 255) throw domain_error("codec: levels exceed the container limit of 255");
  if (side > kMaxGeometry)
    throw domain_error("codec: box side b^n exceeds the container limit of 65535");
}

inline BoxRecord box_record(const Mps& mps) {
  BoxRecord rec;
  rec.scale = static_cast<float>(mps.scale);
  const std::vector<int> chi = mps.bond_dims();
  rec.bonds.reserve(chi.size() - 2);
  for (std::size_t a = 1; a + 1 < chi.size(); ++a)
    rec.bonds.push_back(static_cast<std::uint16_t>(chi[a]));
  return rec;
}

inline std::size_t header_size(const Container& c) {
  return 23 + c.boxes.size() * (4 + 2 * (static_cast<std::size_t>(c.levels) - 1));
}

// All per-box site shapes concatenated, in stream order.
inline std::vector<TensorShape> payload_profile(const Container& c) {
  std::vector<TensorShape> profile;
  const int d = static_cast<int>(c.branch) * c.branch;
  profile.reserve(c.boxes.size() * c.levels);
  for (std::size_t box = 0; box < c.boxes.size(); ++box) {
    const std::vector<int> chi = c.bond_profile(box);
    for (std::size_t a = 0; a + 1 < chi.size(); ++a)
      profile.push_back(TensorShape{chi[a], d, chi[a + 1]});
  }
  return profile;
}

}  // namespace detail

/// Losslessly encodes a b^n x b^n grayscale image as an exactly factorized
/// MPS container (mode 0). The image must fill one box exactly.
inline std::vector<std::uint8_t> qzip_encode(const ImageGrid& grid, int branch, int levels) {
  const AddressScheme scheme(branch, levels);
  detail::check_geometry(branch, levels, scheme.side());
  if (grid.width != grid.height || grid.width != scheme.side())
    throw domain_error("qzip_encode: image side must equal b^n exactly");

  const Mps mps = exact_mps(image_to_ket(grid, scheme));

  Container c;
  c.mode = kModeQzip;
  c.branch = static_cast<std::uint8_t>(branch);
  c.levels = static_cast<std::uint8_t>(levels);
  c.width = c.height = c.box_side = static_cast<std::uint16_t>(scheme.side());
  c.box_rows = c.box_cols = 1;
  c.boxes.push_back(detail::box_record(mps));
  c.payload = pack_payload(mps.sites, 0.0);
  return serialize(c);
}

/// Lossily encodes a grayscale image (mode 1) under the given configuration.
inline std::vector<std::uint8_t> qpeg_encode(const ImageGrid& grid, const QpegConfig& config) {
  const AddressScheme scheme(config.branch, config.levels);
  detail::check_geometry(config.branch, config.levels, scheme.side());
  if (grid.width < 1 || grid.height < 1) throw domain_error("qpeg_encode: empty image");
  if (grid.width > detail::kMaxGeometry || grid.height > detail::kMaxGeometry)
    throw domain_error("qpeg_encode: image dimensions exceed the container limit of 65535");
  const std::int64_t chi_cap = detail::pow_int(scheme.local_dim(), scheme.levels() / 2);
  if (config.chi_trunc < 1 || config.chi_trunc > chi_cap)
    throw domain_error("qpeg_encode: chi must lie in [1, d^floor(n/2)] = [1, " +
                       std::to_string(chi_cap) + "]");
  if (!(config.quant_step >= 0.0) || !std::isfinite(config.quant_step))
    throw domain_error("qpeg_encode: quant_step must be finite and >= 0");
  AlsConfig als = config.als;
  als.chi_trunc = config.chi_trunc;
  validate(als);

  auto [layout, blocks] = pad_and_split(grid, static_cast<int>(scheme.side()));

  Container c;
  c.mode = kModeQpeg;
  c.branch = static_cast<std::uint8_t>(config.branch);
  c.levels = static_cast<std::uint8_t>(config.levels);
  c.width = static_cast<std::uint16_t>(grid.width);
  c.height = static_cast<std::uint16_t>(grid.height);
  c.box_side = static_cast<std::uint16_t>(scheme.side());
  c.flags = static_cast<std::uint8_t>((config.use_dct ? kFlagDct : 0) |
                                      (config.level_shift ? kFlagLevelShift : 0) |
                                      (config.quant_step > 0.0 ? kFlagQuantized : 0));
  c.quant_step = static_cast<float>(config.quant_step);
  c.box_rows = static_cast<std::uint16_t>(layout.rows);
  c.box_cols = static_cast<std::uint16_t>(layout.cols);

  std::vector<SiteTensor> stream;
  stream.reserve(blocks.size() * static_cast<std::size_t>(config.levels));
  for (Eigen::MatrixXd& block : blocks) {
    if (config.level_shift) block.array() -= 128.0;
    if (config.use_dct) block = dct2(block);
    const AlsResult fit = als_truncate(image_to_ket(block, scheme), als);
    c.boxes.push_back(detail::box_record(fit.mps));
    for (const SiteTensor& t : fit.mps.sites) stream.push_back(t);
  }
  c.payload = pack_payload(stream, static_cast<double>(c.quant_step));
  return serialize(c);
}

/// Decodes a parsed container of either mode back to pixels.
inline ImageGrid decode(const Container& c) {
  const AddressScheme scheme(c.branch, c.levels);
  const std::vector<TensorShape> profile = detail::payload_profile(c);
  std::vector<SiteTensor> tensors = unpack_payload(
      c.payload, profile, static_cast<double>(c.quant_step), detail::header_size(c));

  BoxLayout layout;
  layout.box_side = static_cast<int>(scheme.side());
  layout.rows = c.box_rows;
  layout.cols = c.box_cols;
  layout.pad_right = layout.cols * layout.box_side - c.width;
  layout.pad_bottom = layout.rows * layout.box_side - c.height;

  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(c.boxes.size());
  auto next = tensors.begin();
  for (const BoxRecord& rec : c.boxes) {
    std::vector<SiteTensor> sites(std::make_move_iterator(next),
                                  std::make_move_iterator(next + c.levels));
    next += c.levels;
    const Mps mps(scheme, static_cast<double>(rec.scale), std::move(sites));
    Eigen::MatrixXd block = ket_to_image(reconstruct(mps));
    if (c.flags & kFlagDct) block = idct2(block);
    if (c.flags & kFlagLevelShift) block.array() += 128.0;
    blocks.push_back(std::move(block));
  }
  return merge_boxes(layout, blocks);
}

inline ImageGrid decode(std::span<const std::uint8_t> bytes) { return decode(parse_container(bytes)); }

inline ImageGrid qzip_decode(std::span<const std::uint8_t> bytes) {
  const Container c = parse_container(bytes);
  if (c.mode != kModeQzip) throw format_error("container: expected qzip mode", 5);
  return decode(c);
}

inline ImageGrid qpeg_decode(std::span<const std::uint8_t> bytes) {
  const Container c = parse_container(bytes);
  if (c.mode != kModeQpeg) throw format_error("container: expected qpeg mode", 5);
  return decode(c);
}

}  // namespace qpeg
