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
// Alternating-least-squares truncation: finds the bond-capped MPS minimizing
// the squared distance to a dense target ket, sweeping site by site. Each
// local step solves the normal equations Gamma <- B+ E exactly, where B is
// the Gram matrix of the site's environments over the combined (left, right)
// bond index and E contracts the target against those environments. B factors
// as the Kronecker product of the small Grams G = L^T L and H = R R^T, so its
// pseudo-inverse (with the joint cutoff pinv_tol * sigma_max(B)) is applied
// through their eigendecompositions, one factorization shared by all d
// right-hand sides. Local minimization is exact, so the objective is
// non-increasing across updates; sweeps stop once the per-sweep decrease,
// relative to the target's squared norm, falls below rel_tol.

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "qpeg/error.hpp"
#include "qpeg/mps.hpp"
#include "qpeg/rg_map.hpp"

namespace qpeg {

struct AlsConfig {
  int chi_trunc = 4;       // target bond cap
  int max_sweeps = 32;     // one sweep = forward + backward pass
  double rel_tol = 1e-9;   // stop when the per-sweep decrease / |target|^2 drops below this
  double pinv_tol = 1e-12; // singular-value cutoff for the pseudo-inverse of B, relative to sigma_max(B)
};

inline void validate(const AlsConfig& config) {
  if (config.chi_trunc < 1) throw domain_error("AlsConfig: chi_trunc must be >= 1");
  if (config.max_sweeps < 0) throw domain_error("AlsConfig: max_sweeps must be >= 0");
  if (!(config.rel_tol > 0.0)) throw domain_error("AlsConfig: rel_tol must be > 0");
  if (!(config.pinv_tol > 0.0)) throw domain_error("AlsConfig: pinv_tol must be > 0");
}

struct LocalUpdate {
  SiteTensor site;
  double fit = 0.0;        // <E, Gamma> = |state|^2 at the local optimum; objective = |c|^2 - fit
  bool stagnated = false;  // B numerically zero, site left unchanged
};

/// Exact least-squares update of one site given its environments.
///
/// left_env:  rows are the combined physical indices left of the site (their
///            product dimension), columns the left bond.
/// right_env: rows the right bond, columns the combined physical indices to
///            the right.
/// target:    dense coefficients with layout (left combo, site physical index,
///            right combo), left combo fastest.
inline LocalUpdate als_local_update(const Eigen::Ref<const Eigen::MatrixXd>& left_env,
                                    const Eigen::Ref<const Eigen::MatrixXd>& right_env,
                                    const Eigen::Ref<const Eigen::VectorXd>& target, int phys_dim,
                                    double pinv_tol, const SiteTensor& current) {
  const Eigen::Index ml = left_env.rows();
  const Eigen::Index chi_l = left_env.cols();
  const Eigen::Index chi_r = right_env.rows();
  const Eigen::Index mr = right_env.cols();
  if (current.left != chi_l || current.right != chi_r || current.phys != phys_dim)
    throw domain_error("als_local_update: site shape does not match environments");
  if (target.size() != ml * phys_dim * mr)
    throw domain_error("als_local_update: target size does not match environments");

  const Eigen::MatrixXd gram_l = left_env.transpose() * left_env;    // G
  const Eigen::MatrixXd gram_r = right_env * right_env.transpose();  // H

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_l(gram_l);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_r(gram_r);
  const Eigen::VectorXd lam = eig_l.eigenvalues().cwiseMax(0.0);
  const Eigen::VectorXd mu = eig_r.eigenvalues().cwiseMax(0.0);
  const double sigma_max = lam[chi_l - 1] * mu[chi_r - 1];
  if (!(sigma_max > 0.0)) return {current, 0.0, true};
  const double cutoff = pinv_tol * sigma_max;

  // Z = C * R^T contracts the right environment once for all physical values.
  Eigen::Map<const Eigen::MatrixXd> cmat(target.data(), ml * phys_dim, mr);
  const Eigen::MatrixXd z = cmat * right_env.transpose();  // (ml*d) x chi_r

  SiteTensor updated(static_cast<int>(chi_l), phys_dim, static_cast<int>(chi_r));
  double fit = 0.0;
  for (int i = 0; i < phys_dim; ++i) {
    const Eigen::MatrixXd e = left_env.transpose() * z.middleRows(ml * i, ml);  // E^{i}
    Eigen::MatrixXd rot = eig_l.eigenvectors().transpose() * e * eig_r.eigenvectors();
    for (Eigen::Index p = 0; p < chi_l; ++p)
      for (Eigen::Index q = 0; q < chi_r; ++q) {
        const double ev = lam[p] * mu[q];
        rot(p, q) = ev > cutoff ? rot(p, q) / ev : 0.0;
      }
    const Eigen::MatrixXd gamma = eig_l.eigenvectors() * rot * eig_r.eigenvectors().transpose();
    fit += (e.array() * gamma.array()).sum();
    Eigen::Map<Eigen::MatrixXd, 0, Eigen::OuterStride<>>(
        updated.data.data() + static_cast<std::int64_t>(chi_l) * i, chi_l, chi_r,
        Eigen::OuterStride<>(chi_l * phys_dim)) = gamma;
  }
  return {std::move(updated), fit, false};
}

struct AlsResult {
  Mps mps;
  bool converged = false;
  int sweeps = 0;
  double final_objective = 0.0;          // |target - state|^2
  std::vector<double> objective_trace;   // initialization value, then one entry per local update
};

namespace detail {

// Environment of everything left of site j+1: (d^j x chi) -> (d^{j+1} x chi').
inline Eigen::MatrixXd extend_left(const Eigen::MatrixXd& env, const SiteTensor& site) {
  Eigen::MatrixXd m = env * site.right_matrix();
  return Eigen::Map<const Eigen::MatrixXd>(m.data(), m.rows() * site.phys, site.right);
}

// Environment of everything right of site j-1: (chi' x m) -> (chi x d*m).
inline Eigen::MatrixXd extend_right(const SiteTensor& site, const Eigen::MatrixXd& env) {
  Eigen::MatrixXd m = site.left_matrix() * env;
  return Eigen::Map<const Eigen::MatrixXd>(m.data(), site.left, site.phys * env.cols());
}

// |scale * contraction(sites)|, via transfer matrices.
inline double mps_norm(const std::vector<SiteTensor>& sites, double scale) {
  Eigen::MatrixXd rho = Eigen::MatrixXd::Ones(1, 1);
  for (const SiteTensor& site : sites) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(site.right, site.right);
    for (int i = 0; i < site.phys; ++i) {
      Eigen::Map<const Eigen::MatrixXd, 0, Eigen::OuterStride<>> gi(
          site.data.data() + static_cast<std::int64_t>(site.left) * i, site.left, site.right,
          Eigen::OuterStride<>(static_cast<Eigen::Index>(site.left) * site.phys));
      next.noalias() += gi.transpose() * rho * gi;
    }
    rho = std::move(next);
  }
  return std::abs(scale) * std::sqrt(std::max(rho(0, 0), 0.0));
}

}  // namespace detail

/// Minimizes |target - state|^2 over MPS with every bond capped at
/// config.chi_trunc, starting from the SVD truncation of the exact
/// factorization. Non-convergence within max_sweeps is reported through the
/// flag, not an error; the best (latest) iterate is returned either way.
inline AlsResult als_truncate(const Ket& target, const AlsConfig& config) {
  validate(config);
  const int n = target.scheme.levels();
  const int d = target.scheme.local_dim();

  Mps init = svd_truncate(exact_mps(target), config.chi_trunc);
  const double c_sq = target.coeffs.squaredNorm();
  if (c_sq == 0.0) return {std::move(init), true, 0, 0.0, {0.0}};

  // Work on raw tensors with the norm folded into the last site.
  std::vector<SiteTensor> sites = init.sites;
  sites.back().data *= init.scale;

  AlsResult result{std::move(init), false, 0, 0.0, {}};
  {
    Mps current(target.scheme, 1.0, sites);
    result.objective_trace.push_back((target.coeffs - reconstruct(current).coeffs).squaredNorm());
  }

  double sweep_prev = result.objective_trace.front();
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    // Right environments for the forward pass, from the current tensors.
    std::vector<Eigen::MatrixXd> renv(static_cast<std::size_t>(n));
    renv[static_cast<std::size_t>(n - 1)] = Eigen::MatrixXd::Ones(1, 1);
    for (int j = n - 2; j >= 0; --j)
      renv[static_cast<std::size_t>(j)] = detail::extend_right(
          sites[static_cast<std::size_t>(j + 1)], renv[static_cast<std::size_t>(j + 1)]);

    std::vector<Eigen::MatrixXd> lenv(static_cast<std::size_t>(n) + 1);
    lenv[0] = Eigen::MatrixXd::Ones(1, 1);
    for (int j = 0; j < n; ++j) {
      LocalUpdate upd =
          als_local_update(lenv[static_cast<std::size_t>(j)], renv[static_cast<std::size_t>(j)],
                           target.coeffs, d, config.pinv_tol, sites[static_cast<std::size_t>(j)]);
      sites[static_cast<std::size_t>(j)] = std::move(upd.site);
      result.objective_trace.push_back(c_sq - upd.fit);
      lenv[static_cast<std::size_t>(j + 1)] =
          detail::extend_left(lenv[static_cast<std::size_t>(j)], sites[static_cast<std::size_t>(j)]);
    }

    // Backward pass; the stored left environments stay valid until their site
    // is reached, right environments rebuild incrementally from the updates.
    Eigen::MatrixXd rcur = Eigen::MatrixXd::Ones(1, 1);
    for (int j = n - 1; j >= 0; --j) {
      LocalUpdate upd = als_local_update(lenv[static_cast<std::size_t>(j)], rcur, target.coeffs, d,
                                         config.pinv_tol, sites[static_cast<std::size_t>(j)]);
      sites[static_cast<std::size_t>(j)] = std::move(upd.site);
      result.objective_trace.push_back(c_sq - upd.fit);
      rcur = detail::extend_right(sites[static_cast<std::size_t>(j)], rcur);
    }

    result.sweeps = sweep;
    const double sweep_cur = result.objective_trace.back();
    if (sweep_prev - sweep_cur <= config.rel_tol * c_sq) {
      result.converged = true;
      break;
    }
    sweep_prev = sweep_cur;
  }

  const double nrm = detail::mps_norm(sites, 1.0);
  if (nrm > 0.0) sites.back().data /= nrm;
  result.mps = Mps(target.scheme, nrm, std::move(sites));
  result.final_objective = result.objective_trace.back();
  return result;
}

}  // namespace qpeg
