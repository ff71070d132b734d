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

#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "qpeg/error.hpp"

namespace qpeg {

/// Orthonormal DCT-II basis matrix of size n: row k is the k-th cosine mode,
/// so D * D^T = I and the DC mode sits in row 0.
inline Eigen::MatrixXd dct_matrix(int n) {
  if (n < 1) throw domain_error("dct_matrix: size must be >= 1");
  Eigen::MatrixXd d(n, n);
  const double a0 = std::sqrt(1.0 / n);
  const double ak = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      d(k, i) = (k == 0 ? a0 : ak) * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
  return d;
}

/// Separable orthonormal 2D DCT-II of a square block. Parseval holds exactly
/// up to rounding, and the DC coefficient lands at (0, 0), so the transformed
/// block packs low frequencies into the coarse corner of the addressing.
inline Eigen::MatrixXd dct2(const Eigen::MatrixXd& block) {
  if (block.rows() != block.cols()) throw domain_error("dct2: block must be square");
  const Eigen::MatrixXd d = dct_matrix(static_cast<int>(block.rows()));
  return d * block * d.transpose();
}

/// Exact inverse of dct2.
inline Eigen::MatrixXd idct2(const Eigen::MatrixXd& block) {
  if (block.rows() != block.cols()) throw domain_error("idct2: block must be square");
  const Eigen::MatrixXd d = dct_matrix(static_cast<int>(block.rows()));
  return d.transpose() * block * d;
}

}  // namespace qpeg
