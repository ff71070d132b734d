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
// Hierarchical block addressing between 2D pixel coordinates and base-d digit
// strings, and the casting of a square image into a dense coefficient vector
// ("ket"). Each digit selects one cell of a b x b super-cell at one
// coarse-graining level; the finest digit varies fastest in the linear index,
// so every level-k bipartition of the coefficient vector is a contiguous
// reshape. All functions here are pure permutations.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qpeg/error.hpp"

namespace qpeg {

/// Addressing parameters: branching factor b per axis and number of levels n.
/// Covers a b^n x b^n raster with d^n coefficients, d = b*b.
struct AddressScheme {
  AddressScheme(int branch, int levels) : branch_(branch), levels_(levels) {
    if (branch < 2) throw domain_error("AddressScheme: branch factor must be >= 2");
    if (levels < 1) throw domain_error("AddressScheme: levels must be >= 1");
    std::int64_t s = 1;
    for (int k = 0; k < levels; ++k) {
      s *= branch;
      if (s > max_side) throw domain_error("AddressScheme: side b^n exceeds " + std::to_string(max_side));
    }
    side_ = s;
  }

  int branch() const { return branch_; }
  int levels() const { return levels_; }
  int local_dim() const { return branch_ * branch_; }

  /// Raster side b^n.
  std::int64_t side() const { return side_; }
  /// Total coefficients d^n = (b^n)^2.
  std::int64_t coeff_count() const { return side_ * side_; }

  friend bool operator==(const AddressScheme& a, const AddressScheme& b) {
    return a.branch_ == b.branch_ && a.levels_ == b.levels_;
  }

  static constexpr std::int64_t max_side = 1 << 16;

 private:
  int branch_;
  int levels_;
  std::int64_t side_;
};

/// Digit string of one pixel, ordered coarsest level first. Each digit lies in
/// [1, d]; digit value r*b + c + 1 names the cell at (row r, col c), 0-based,
/// of its super-cell, so for b = 2 the cells read 1,2,3,4 = up-left, up-right,
/// down-left, down-right.
struct DigitString {
  std::vector<int> digits;  // digits[0] is the coarsest level
};

/// Unnormalized real coefficient vector over n sites of local dimension d.
/// coeffs[sum_k (i_k - 1) d^(k-1)] holds the coefficient of digit string
/// (i_n, ..., i_1); the finest digit i_1 is the fastest-varying index.
struct Ket {
  Ket(AddressScheme s, Eigen::VectorXd c) : scheme(s), coeffs(std::move(c)) {
    if (coeffs.size() != scheme.coeff_count())
      throw domain_error("Ket: coefficient count does not match scheme");
  }

  AddressScheme scheme;
  Eigen::VectorXd coeffs;

  double norm() const { return coeffs.norm(); }
};

inline DigitString pixel_to_digits(std::int64_t row, std::int64_t col, const AddressScheme& scheme) {
  if (row < 0 || col < 0 || row >= scheme.side() || col >= scheme.side())
    throw domain_error("pixel_to_digits: coordinate out of range");
  const int b = scheme.branch();
  const int n = scheme.levels();
  DigitString out;
  out.digits.resize(n);
  std::int64_t r = row, c = col;
  for (int k = 1; k <= n; ++k) {
    const int rk = static_cast<int>(r % b);
    const int ck = static_cast<int>(c % b);
    out.digits[n - k] = rk * b + ck + 1;  // level k lands at position n-k (coarsest first)
    r /= b;
    c /= b;
  }
  return out;
}

inline std::pair<std::int64_t, std::int64_t> digits_to_pixel(const DigitString& digits,
                                                             const AddressScheme& scheme) {
  const int b = scheme.branch();
  const int n = scheme.levels();
  const int d = scheme.local_dim();
  if (static_cast<int>(digits.digits.size()) != n)
    throw domain_error("digits_to_pixel: digit count does not match scheme");
  std::int64_t row = 0, col = 0;
  for (int pos = 0; pos < n; ++pos) {  // walk coarse to fine
    const int digit = digits.digits[pos];
    if (digit < 1 || digit > d) throw domain_error("digits_to_pixel: digit out of [1,d]");
    const int v = digit - 1;
    row = row * b + v / b;
    col = col * b + v % b;
  }
  return {row, col};
}

/// Linear index of a digit string: sum_k (i_k - 1) d^(k-1).
inline std::int64_t digit_index(const DigitString& digits, const AddressScheme& scheme) {
  const int n = scheme.levels();
  const int d = scheme.local_dim();
  if (static_cast<int>(digits.digits.size()) != n)
    throw domain_error("digit_index: digit count does not match scheme");
  std::int64_t idx = 0;
  for (int pos = 0; pos < n; ++pos) {  // digits[0] is i_n, the slowest index
    const int digit = digits.digits[pos];
    if (digit < 1 || digit > d) throw domain_error("digit_index: digit out of [1,d]");
    idx = idx * d + (digit - 1);
  }
  return idx;
}

namespace detail {

// The digit map splits into independent row/col contributions:
//   index = sum_k (r_k b + c_k) d^(k-1) = rowOffset(row) + colOffset(col),
// which turns the full image cast into two lookup tables of length side.
inline void rg_offsets(const AddressScheme& scheme, std::vector<std::int64_t>& row_off,
                       std::vector<std::int64_t>& col_off) {
  const int b = scheme.branch();
  const int d = scheme.local_dim();
  const std::int64_t side = scheme.side();
  row_off.assign(static_cast<std::size_t>(side), 0);
  col_off.assign(static_cast<std::size_t>(side), 0);
  for (std::int64_t p = 0; p < side; ++p) {
    std::int64_t v = p, weight = 1, ro = 0, co = 0;
    for (int k = 0; k < scheme.levels(); ++k) {
      const std::int64_t digit = v % b;
      ro += digit * b * weight;
      co += digit * weight;
      v /= b;
      weight *= d;
    }
    row_off[static_cast<std::size_t>(p)] = ro;
    col_off[static_cast<std::size_t>(p)] = co;
  }
}

}  // namespace detail

/// Casts a square real-valued block of side b^n into a ket. Lossless; a pure
/// permutation of the block's values.
inline Ket image_to_ket(const Eigen::MatrixXd& block, const AddressScheme& scheme) {
  if (block.rows() != block.cols() || block.rows() != scheme.side())
    throw domain_error("image_to_ket: block side must equal b^n");
  std::vector<std::int64_t> row_off, col_off;
  detail::rg_offsets(scheme, row_off, col_off);
  Eigen::VectorXd coeffs(scheme.coeff_count());
  const std::int64_t side = scheme.side();
  for (std::int64_t r = 0; r < side; ++r)
    for (std::int64_t c = 0; c < side; ++c)
      coeffs[row_off[static_cast<std::size_t>(r)] + col_off[static_cast<std::size_t>(c)]] =
          block(r, c);
  return Ket(scheme, std::move(coeffs));
}

/// Exact inverse permutation of image_to_ket.
inline Eigen::MatrixXd ket_to_image(const Ket& ket) {
  const AddressScheme& scheme = ket.scheme;
  std::vector<std::int64_t> row_off, col_off;
  detail::rg_offsets(scheme, row_off, col_off);
  const std::int64_t side = scheme.side();
  Eigen::MatrixXd block(side, side);
  for (std::int64_t r = 0; r < side; ++r)
    for (std::int64_t c = 0; c < side; ++c)
      block(r, c) =
          ket.coeffs[row_off[static_cast<std::size_t>(r)] + col_off[static_cast<std::size_t>(c)]];
  return block;
}

}  // namespace qpeg
