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
// Matrix product state (tensor train) engine: exact factorization of a ket by
// a cascade of Schmidt decompositions, dense reconstruction, bond-capped SVD
// truncation, Schmidt spectra and von Neumann bond entropies.
//
// Conventions. Site a of n carries the level-a physical index i_a (site 1 is
// the finest addressing level), a left bond of size chi_a and a right bond of
// size chi_{a+1}; chi_1 = chi_{n+1} = 1 (open boundary). Site data is stored
// with the left bond fastest, then the physical index, then the right bond,
// which makes every matricization used below a plain reinterpretation of the
// same buffer. A state is scale * (contraction of all sites); the cascade
// keeps the site product at unit norm and stores the ket norm in scale.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "qpeg/error.hpp"
#include "qpeg/rg_map.hpp"

namespace qpeg {

/// One rank-3 site tensor, shape (left, phys, right), left index fastest.
struct SiteTensor {
  int left = 1;
  int phys = 1;
  int right = 1;
  Eigen::VectorXd data;  // size left*phys*right

  SiteTensor() = default;
  SiteTensor(int l, int p, int r) : left(l), phys(p), right(r) {
    if (l < 1 || p < 1 || r < 1) throw domain_error("SiteTensor: dimensions must be positive");
    data = Eigen::VectorXd::Zero(static_cast<std::int64_t>(l) * p * r);
  }

  std::int64_t size() const { return data.size(); }

  double& at(int a, int i, int b) { return data[a + static_cast<std::int64_t>(left) * (i + static_cast<std::int64_t>(phys) * b)]; }
  double at(int a, int i, int b) const { return data[a + static_cast<std::int64_t>(left) * (i + static_cast<std::int64_t>(phys) * b)]; }

  /// (left*phys) x right view; left-orthonormal sites have orthonormal columns here.
  Eigen::Map<const Eigen::MatrixXd> left_matrix() const {
    return {data.data(), static_cast<Eigen::Index>(left) * phys, right};
  }
  /// left x (phys*right) view; right-orthonormal sites have orthonormal rows here.
  Eigen::Map<const Eigen::MatrixXd> right_matrix() const {
    return {data.data(), left, static_cast<Eigen::Index>(phys) * right};
  }
};

/// Open-boundary MPS over the sites of an AddressScheme.
struct Mps {
  Mps(AddressScheme s, double sc, std::vector<SiteTensor> site_list)
      : scheme(s), scale(sc), sites(std::move(site_list)) {
    if (static_cast<int>(sites.size()) != scheme.levels())
      throw domain_error("Mps: site count must equal levels");
    int prev = 1;
    for (const SiteTensor& t : sites) {
      if (t.phys != scheme.local_dim()) throw domain_error("Mps: physical dimension mismatch");
      if (t.left != prev) throw domain_error("Mps: adjacent bond dimensions do not match");
      prev = t.right;
    }
    if (prev != 1) throw domain_error("Mps: right boundary bond must be 1");
  }

  AddressScheme scheme;
  double scale;
  std::vector<SiteTensor> sites;

  /// chi_1 .. chi_{n+1}, with the boundary ones included.
  std::vector<int> bond_dims() const {
    std::vector<int> chi;
    chi.reserve(sites.size() + 1);
    chi.push_back(sites.front().left);
    for (const SiteTensor& t : sites) chi.push_back(t.right);
    return chi;
  }

  int max_bond() const {
    int m = 1;
    for (const SiteTensor& t : sites) m = std::max(m, std::max(t.left, t.right));
    return m;
  }
};

/// Schmidt spectrum of the bipartition (first `cut` sites | rest).
struct SchmidtSpectrum {
  int cut = 1;
  Eigen::VectorXd values;  // descending, all >= 0
};

namespace detail {

inline std::int64_t pow_int(std::int64_t base, int exp) {
  std::int64_t v = 1;
  for (int k = 0; k < exp; ++k) v *= base;
  return v;
}

// d-dimensional product state with uniform entries 1/sqrt(d) at every site.
inline std::vector<SiteTensor> uniform_product_sites(const AddressScheme& scheme) {
  std::vector<SiteTensor> sites;
  const int d = scheme.local_dim();
  const double v = 1.0 / std::sqrt(static_cast<double>(d));
  for (int a = 0; a < scheme.levels(); ++a) {
    SiteTensor t(1, d, 1);
    t.data.setConstant(v);
    sites.push_back(std::move(t));
  }
  return sites;
}

}  // namespace detail

/// Exact MPS factorization by successive Schmidt decompositions, sweeping from
/// the finest site. Bond dimensions are the numerical ranks of the sequential
/// matricizations: singular values of the normalized ket above `rank_tol` are
/// kept (the cascade preserves unit Frobenius norm, so this threshold equals
/// rank_tol * |ket| in unnormalized units). Sites 1..n-1 come out
/// left-orthonormal and the ket norm is stored in scale. A zero ket yields an
/// all-chi=1 state with scale 0.
inline Mps exact_mps(const Ket& ket, double rank_tol = 1e-12) {
  const AddressScheme& scheme = ket.scheme;
  const int n = scheme.levels();
  const int d = scheme.local_dim();
  const double nrm = ket.norm();
  if (nrm == 0.0) return Mps(scheme, 0.0, detail::uniform_product_sites(scheme));

  Eigen::VectorXd cur = ket.coeffs / nrm;
  std::vector<SiteTensor> sites;
  sites.reserve(static_cast<std::size_t>(n));
  int chi = 1;
  for (int a = 1; a < n; ++a) {
    const Eigen::Index rows = static_cast<Eigen::Index>(chi) * d;
    const Eigen::Index cols = cur.size() / rows;
    Eigen::Map<const Eigen::MatrixXd> m(cur.data(), rows, cols);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > rank_tol) ++r;
    r = std::max(r, 1);

    SiteTensor site(chi, d, r);
    Eigen::Map<Eigen::MatrixXd>(site.data.data(), rows, r) = svd.matrixU().leftCols(r);
    sites.push_back(std::move(site));

    // Carry S V^T forward; reinterpreting the (r x cols) buffer as
    // (r*d) x (cols/d) absorbs the next physical index into the rows.
    Eigen::MatrixXd rest = sv.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
    cur = Eigen::Map<const Eigen::VectorXd>(rest.data(), rest.size());
    chi = r;
  }
  SiteTensor last(chi, d, 1);
  last.data = cur;
  sites.push_back(std::move(last));
  return Mps(scheme, nrm, std::move(sites));
}

/// Contracts all bond indices into the dense coefficient vector, times scale.
/// Reconstruction is exponential in the number of sites; `max_coeffs` caps the
/// dense output size.
inline Ket reconstruct(const Mps& mps, std::int64_t max_coeffs = (std::int64_t{1} << 26)) {
  const AddressScheme& scheme = mps.scheme;
  if (scheme.coeff_count() > max_coeffs)
    throw resource_error("reconstruct: output of " + std::to_string(scheme.coeff_count()) +
                         " coefficients exceeds the cap of " + std::to_string(max_coeffs));
  const int d = scheme.local_dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Ones(1, 1);
  for (const SiteTensor& site : mps.sites) {
    // (d^{a-1} x chi_a) * (chi_a x d*chi_{a+1}); the product buffer read
    // column-major is already the (d^a x chi_{a+1}) matrix for the next step.
    Eigen::MatrixXd next = acc * site.right_matrix();
    acc = Eigen::Map<const Eigen::MatrixXd>(next.data(), next.rows() * d, next.cols() / d);
  }
  Eigen::VectorXd coeffs = Eigen::Map<const Eigen::VectorXd>(acc.data(), acc.size());
  coeffs *= mps.scale;
  return Ket(scheme, std::move(coeffs));
}

/// Singular values of the d^cut x d^(n-cut) matricization of the ket.
inline SchmidtSpectrum schmidt_spectrum(const Ket& ket, int cut) {
  const int n = ket.scheme.levels();
  if (cut < 1 || cut > n - 1) throw domain_error("schmidt_spectrum: cut must lie in [1, n-1]");
  const std::int64_t rows = detail::pow_int(ket.scheme.local_dim(), cut);
  const std::int64_t cols = ket.coeffs.size() / rows;
  Eigen::Map<const Eigen::MatrixXd> m(ket.coeffs.data(), rows, cols);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return SchmidtSpectrum{cut, svd.singularValues()};
}

/// Von Neumann entropy (base 2) of a Schmidt spectrum, with 0 log 0 = 0.
inline double von_neumann_entropy(const Eigen::VectorXd& singular_values) {
  const double total = singular_values.squaredNorm();
  if (total <= 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    const double p = singular_values[i] * singular_values[i] / total;
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

/// S_a for every cut a = 1 .. n-1. Zero ket: all zeros.
inline std::vector<double> bond_entropies(const Ket& ket) {
  std::vector<double> out;
  const int n = ket.scheme.levels();
  out.reserve(static_cast<std::size_t>(n - 1));
  for (int cut = 1; cut <= n - 1; ++cut)
    out.push_back(von_neumann_entropy(schmidt_spectrum(ket, cut).values));
  return out;
}

/// Caps every bond at `chi` by discarding the smallest singular values cut by
/// cut, left to right (a right-orthogonalizing sweep first makes each local
/// spectrum the true Schmidt spectrum of the current state). If no bond
/// exceeds the cap the input is returned unchanged.
inline Mps svd_truncate(const Mps& mps, int chi) {
  if (chi < 1) throw domain_error("svd_truncate: chi must be >= 1");
  if (mps.max_bond() <= chi) return mps;

  const int n = mps.scheme.levels();
  const int d = mps.scheme.local_dim();
  std::vector<SiteTensor> sites = mps.sites;

  // Right-orthogonalize: site a becomes the orthonormal-row Q of an LQ
  // decomposition, the triangular factor moves into site a-1.
  for (int a = n - 1; a >= 1; --a) {
    SiteTensor& t = sites[static_cast<std::size_t>(a)];
    const Eigen::Index rows = t.left;
    const Eigen::Index cols = static_cast<Eigen::Index>(t.phys) * t.right;
    const Eigen::Index k = std::min(rows, cols);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(t.right_matrix().transpose());
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(cols, k);
    Eigen::MatrixXd rfac = qr.matrixQR().topRows(k);  // upper trapezoid, k x rows
    for (Eigen::Index i = 1; i < k; ++i) rfac.row(i).head(std::min(i, rows)).setZero();
    Eigen::MatrixXd l = rfac.transpose();

    SiteTensor repl(static_cast<int>(k), t.phys, t.right);
    Eigen::Map<Eigen::MatrixXd>(repl.data.data(), k, cols) = q.transpose();
    sites[static_cast<std::size_t>(a)] = std::move(repl);

    SiteTensor& prev = sites[static_cast<std::size_t>(a - 1)];
    Eigen::MatrixXd merged = prev.left_matrix() * l;  // (chi*d x rows) * (rows x k)
    SiteTensor nprev(prev.left, prev.phys, static_cast<int>(k));
    nprev.data = Eigen::Map<const Eigen::VectorXd>(merged.data(), merged.size());
    sites[static_cast<std::size_t>(a - 1)] = std::move(nprev);
  }

  // Truncating left-to-right sweep.
  for (int a = 0; a < n - 1; ++a) {
    SiteTensor& t = sites[static_cast<std::size_t>(a)];
    Eigen::BDCSVD<Eigen::MatrixXd> svd(t.left_matrix(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(sv.size(), chi); ++i)
      if (sv[i] > 0.0) ++r;
    r = std::max(r, 1);

    SiteTensor repl(t.left, t.phys, r);
    Eigen::Map<Eigen::MatrixXd>(repl.data.data(), static_cast<Eigen::Index>(t.left) * t.phys, r) =
        svd.matrixU().leftCols(r);

    SiteTensor& nxt = sites[static_cast<std::size_t>(a + 1)];
    Eigen::MatrixXd carry = sv.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
    Eigen::MatrixXd merged = carry * nxt.right_matrix();  // (r x chi) * (chi x d*chi')
    SiteTensor nnxt(r, nxt.phys, nxt.right);
    nnxt.data = Eigen::Map<const Eigen::VectorXd>(merged.data(), merged.size());

    sites[static_cast<std::size_t>(a)] = std::move(repl);
    sites[static_cast<std::size_t>(a + 1)] = std::move(nnxt);
  }

  // The truncated weight accumulated in the last site; keep the site product
  // at unit norm and fold the loss into scale.
  double tail = sites.back().data.norm();
  double scale = mps.scale * tail;
  if (tail > 0.0) sites.back().data /= tail;
  return Mps(mps.scheme, scale, std::move(sites));
}

enum class CountConvention { actual, uniform };

/// Number of stored reals. "actual" sums the true tensor sizes; "uniform"
/// counts n * d * chi_max^2 as if every site carried square chi_max bonds.
inline std::int64_t parameter_count(const Mps& mps, CountConvention convention) {
  if (convention == CountConvention::actual) {
    std::int64_t total = 0;
    for (const SiteTensor& t : mps.sites) total += t.size();
    return total;
  }
  const std::int64_t chi = mps.max_bond();
  return static_cast<std::int64_t>(mps.scheme.levels()) * mps.scheme.local_dim() * chi * chi;
}

}  // namespace qpeg
