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
#include <numbers>

#include <catch2/catch_amalgamated.hpp>

#include "qpeg/dct.hpp"
#include "support/synthetic.hpp"

namespace {

// Brute-force 2D DCT-II straight from the textbook double sum, as an
// implementation-independent oracle.
Eigen::MatrixXd dct2_reference(const Eigen::MatrixXd& block) {
  using std::numbers::pi;
  const int n = static_cast<int>(block.rows());
  Eigen::MatrixXd out(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      double sum = 0.0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          sum += block(r, c) * std::cos(pi * (2 * r + 1) * u / (2.0 * n)) *
                 std::cos(pi * (2 * c + 1) * v / (2.0 * n));
      const double au = u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      const double av = v == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      out(u, v) = au * av * sum;
    }
  return out;
}

}  // namespace

TEST_CASE("basis matrix is orthonormal", "[dct]") {
  for (int n : {1, 2, 8, 81}) {
    const Eigen::MatrixXd d = qpeg::dct_matrix(n);
    REQUIRE((d * d.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("constant 2x2 block concentrates into DC 200", "[dct]") {
  const Eigen::MatrixXd f = qpeg::dct2(Eigen::MatrixXd::Constant(2, 2, 100.0));
  CHECK(f(0, 0) == Catch::Approx(200.0).margin(1e-12));
  CHECK(std::abs(f(0, 1)) < 1e-12);
  CHECK(std::abs(f(1, 0)) < 1e-12);
  CHECK(std::abs(f(1, 1)) < 1e-12);

  // And the inverse of a pure DC block is the constant again.
  Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(2, 2);
  dc(0, 0) = 200.0;
  CHECK((qpeg::idct2(dc) - Eigen::MatrixXd::Constant(2, 2, 100.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matches the brute-force definition", "[dct]") {
  const Eigen::MatrixXd block = qpeg_test::random_block(6, 41, -100.0, 100.0);
  REQUIRE((qpeg::dct2(block) - dct2_reference(block)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("inverse pair and Parseval on random blocks", "[dct]") {
  for (int n : {2, 9, 81}) {
    const Eigen::MatrixXd block = qpeg_test::random_block(n, 100u + n, -128.0, 127.0);
    const Eigen::MatrixXd f = qpeg::dct2(block);
    REQUIRE((qpeg::idct2(f) - block).norm() / block.norm() < 1e-9);
    REQUIRE(std::abs(f.norm() - block.norm()) / block.norm() < 1e-9);
  }
}

TEST_CASE("zero block maps to zero both ways", "[dct]") {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(5, 5);
  CHECK(qpeg::dct2(z).norm() == 0.0);
  CHECK(qpeg::idct2(z).norm() == 0.0);
}

TEST_CASE("transform is linear", "[dct]") {
  const Eigen::MatrixXd x = qpeg_test::random_block(9, 7);
  const Eigen::MatrixXd y = qpeg_test::random_block(9, 8);
  const Eigen::MatrixXd lhs = qpeg::dct2(2.5 * x - 1.25 * y);
  const Eigen::MatrixXd rhs = 2.5 * qpeg::dct2(x) - 1.25 * qpeg::dct2(y);
  REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rejects non-square blocks", "[dct]") {
  CHECK_THROWS_AS(qpeg::dct2(Eigen::MatrixXd::Zero(2, 3)), qpeg::domain_error);
  CHECK_THROWS_AS(qpeg::idct2(Eigen::MatrixXd::Zero(3, 2)), qpeg::domain_error);
  CHECK_THROWS_AS(qpeg::dct_matrix(0), qpeg::domain_error);
}
