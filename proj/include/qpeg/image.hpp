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
// 8-bit grayscale raster I/O (binary PGM, "P5"), edge-replication padding and
// box tiling. Rounding of reconstructed reals back to pixels is
// half-away-from-zero, then clamped to [0, 255].

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qpeg/error.hpp"
#include "qpeg/rg_map.hpp"

namespace qpeg {

/// Row-major 8-bit grayscale image.
struct ImageGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(col)];
  }
  std::uint8_t& at(int row, int col) {
    return pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(col)];
  }
};

inline std::uint8_t to_pixel(double value) {
  const double r = std::round(value);  // half away from zero
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

namespace detail {

struct PgmScanner {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  bool at_end() const { return pos >= bytes.size(); }
  std::uint8_t peek() const { return bytes[pos]; }

  // Whitespace and '#' comment lines between header tokens.
  void skip_separators() {
    while (!at_end()) {
      const std::uint8_t c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        ++pos;
      } else {
        break;
      }
    }
  }

  long read_int(const char* what) {
    skip_separators();
    if (at_end()) throw format_error(std::string("pgm: missing ") + what, pos);
    if (peek() < '0' || peek() > '9')
      throw format_error(std::string("pgm: expected digit for ") + what, pos);
    long v = 0;
    while (!at_end() && peek() >= '0' && peek() <= '9') {
      v = v * 10 + (peek() - '0');
      if (v > 1'000'000'000L) throw format_error(std::string("pgm: oversized ") + what, pos);
      ++pos;
    }
    return v;
  }
};

}  // namespace detail

/// Parses a binary "P5" PGM with maxval <= 255. Failures report the byte
/// offset where parsing stopped.
inline ImageGrid read_pgm(std::span<const std::uint8_t> bytes) {
  detail::PgmScanner in{bytes};
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw format_error("pgm: bad magic, expected P5", 0);
  in.pos = 2;
  const long width = in.read_int("width");
  const long height = in.read_int("height");
  if (width < 1 || height < 1) throw format_error("pgm: dimensions must be positive", in.pos);
  const std::size_t maxval_at = in.pos;
  const long maxval = in.read_int("maxval");
  if (maxval < 1 || maxval > 255)
    throw format_error("pgm: unsupported maxval " + std::to_string(maxval), maxval_at);
  if (in.at_end()) throw format_error("pgm: missing separator before payload", in.pos);
  const std::uint8_t sep = in.peek();
  if (sep != ' ' && sep != '\t' && sep != '\r' && sep != '\n')
    throw format_error("pgm: expected single whitespace before payload", in.pos);
  ++in.pos;

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - in.pos < count)
    throw format_error("pgm: truncated payload, expected " + std::to_string(count) + " bytes",
                       bytes.size());
  ImageGrid grid;
  grid.width = static_cast<int>(width);
  grid.height = static_cast<int>(height);
  grid.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(in.pos),
                     bytes.begin() + static_cast<std::ptrdiff_t>(in.pos + count));
  return grid;
}

/// Canonical header "P5\n<w> <h>\n255\n" plus the row-major payload.
inline std::vector<std::uint8_t> write_pgm(const ImageGrid& grid) {
  if (grid.width < 1 || grid.height < 1 ||
      grid.pixels.size() != static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height))
    throw domain_error("write_pgm: inconsistent image dimensions");
  const std::string header =
      "P5\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), grid.pixels.begin(), grid.pixels.end());
  return out;
}

inline ImageGrid load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("pgm: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return read_pgm(bytes);
}

inline void save_pgm(const ImageGrid& grid, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = write_pgm(grid);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw format_error("pgm: cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw format_error("pgm: short write to " + path.string());
}

/// Box tiling of a padded image.
struct BoxLayout {
  int box_side = 0;
  int rows = 0;
  int cols = 0;
  int pad_right = 0;
  int pad_bottom = 0;

  int width() const { return cols * box_side - pad_right; }
  int height() const { return rows * box_side - pad_bottom; }
};

/// Splits into box_side x box_side real-valued blocks, row-major box order,
/// replicating the last row/column into the padding.
inline std::pair<BoxLayout, std::vector<Eigen::MatrixXd>> pad_and_split(const ImageGrid& grid,
                                                                        int box_side) {
  if (box_side < 1) throw domain_error("pad_and_split: box side must be >= 1");
  if (grid.width < 1 || grid.height < 1) throw domain_error("pad_and_split: empty image");
  BoxLayout layout;
  layout.box_side = box_side;
  layout.cols = (grid.width + box_side - 1) / box_side;
  layout.rows = (grid.height + box_side - 1) / box_side;
  layout.pad_right = layout.cols * box_side - grid.width;
  layout.pad_bottom = layout.rows * box_side - grid.height;

  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(static_cast<std::size_t>(layout.rows) * static_cast<std::size_t>(layout.cols));
  for (int br = 0; br < layout.rows; ++br)
    for (int bc = 0; bc < layout.cols; ++bc) {
      Eigen::MatrixXd block(box_side, box_side);
      for (int r = 0; r < box_side; ++r) {
        const int sr = std::min(br * box_side + r, grid.height - 1);
        for (int c = 0; c < box_side; ++c) {
          const int sc = std::min(bc * box_side + c, grid.width - 1);
          block(r, c) = static_cast<double>(grid.at(sr, sc));
        }
      }
      blocks.push_back(std::move(block));
    }
  return {layout, std::move(blocks)};
}

/// Inverse of pad_and_split up to rounding/clamping: crops the padding and
/// quantizes reconstructed reals back to 8-bit pixels.
inline ImageGrid merge_boxes(const BoxLayout& layout, const std::vector<Eigen::MatrixXd>& blocks) {
  if (static_cast<std::size_t>(layout.rows) * static_cast<std::size_t>(layout.cols) != blocks.size())
    throw domain_error("merge_boxes: block count does not match layout");
  ImageGrid grid;
  grid.width = layout.width();
  grid.height = layout.height();
  if (grid.width < 1 || grid.height < 1) throw domain_error("merge_boxes: degenerate layout");
  grid.pixels.assign(static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height), 0);
  for (int br = 0; br < layout.rows; ++br)
    for (int bc = 0; bc < layout.cols; ++bc) {
      const Eigen::MatrixXd& block =
          blocks[static_cast<std::size_t>(br) * static_cast<std::size_t>(layout.cols) +
                 static_cast<std::size_t>(bc)];
      if (block.rows() != layout.box_side || block.cols() != layout.box_side)
        throw domain_error("merge_boxes: block side does not match layout");
      for (int r = 0; r < layout.box_side; ++r) {
        const int gr = br * layout.box_side + r;
        if (gr >= grid.height) break;
        for (int c = 0; c < layout.box_side; ++c) {
          const int gc = bc * layout.box_side + c;
          if (gc >= grid.width) break;
          grid.at(gr, gc) = to_pixel(block(r, c));
        }
      }
    }
  return grid;
}

/// Casts an 8-bit image of side b^n directly into a ket.
inline Ket image_to_ket(const ImageGrid& grid, const AddressScheme& scheme) {
  if (grid.width != grid.height || grid.width != scheme.side())
    throw domain_error("image_to_ket: image side must equal b^n");
  Eigen::MatrixXd block(grid.height, grid.width);
  for (int r = 0; r < grid.height; ++r)
    for (int c = 0; c < grid.width; ++c) block(r, c) = static_cast<double>(grid.at(r, c));
  return image_to_ket(block, scheme);
}

}  // namespace qpeg
