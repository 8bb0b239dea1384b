#pragma once

// Exact ground state of the truncated Hamiltonian.
//
// H conserves the parity (-1)^(nu + sum g_i n_i), so each sector is
// diagonalized on its own. Reordered Fock-major, a sector is a banded matrix
// of half-bandwidth < 2 d_h; the two lowest eigenvalues come from LAPACK
// dsbevx and the eigenvector from shifted inverse iteration with a banded
// Cholesky factorization. Deep in the super-radiant phase the two sectors are
// degenerate to far below double precision, and a full-space solver would
// return an arbitrary mixture; the sector split keeps the state well defined.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "su3qpt/model.hpp"

namespace su3qpt {

struct GroundSolution {
  double energy = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd vector; ///< product basis, pattern-major
  std::size_t atomic_dim = 0;
  int n_max = 0;
  double convergence_gap = std::numeric_limits<double>::quiet_NaN();
  double spectral_gap = std::numeric_limits<double>::quiet_NaN(); ///< within the parity sector
  double sector_gap = std::numeric_limits<double>::quiet_NaN();   ///< other sector minus this one
  int parity = 1;
  bool degenerate = false;
  bool failed = false;
  std::string message;
};

struct SolverOptions {
  double degeneracy_tol = 1e-12;
  double residual_tol = 1e-9;
  int max_inverse_iterations = 12;
};

namespace detail {

struct SectorSolve {
  std::vector<Eigen::Index> members; ///< product indices, Fock-major order
  double e0 = std::numeric_limits<double>::quiet_NaN();
  double e1 = std::numeric_limits<double>::infinity();
  Eigen::VectorXd vector; ///< in sector-local order
  bool ok = false;
  std::string message;
};

// Upper band storage, column-major, (kd+1) x n.
struct Band {
  lapack_int n = 0;
  lapack_int kd = 0;
  std::vector<double> ab;
  double &at(lapack_int i, lapack_int j) {
    return ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) *
                                                         static_cast<std::size_t>(kd + 1)];
  }
};

inline Band sector_band(const ProductOperator &h, const std::vector<Eigen::Index> &members,
                        const std::vector<Eigen::Index> &local) {
  Band b;
  b.n = static_cast<lapack_int>(members.size());
  for (Eigen::Index col = 0; col < h.matrix.outerSize(); ++col) {
    if (local[static_cast<std::size_t>(col)] < 0)
      continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(h.matrix, col); it; ++it) {
      const Eigen::Index lr = local[static_cast<std::size_t>(it.row())];
      if (lr < 0)
        continue;
      b.kd = std::max<lapack_int>(
          b.kd, static_cast<lapack_int>(std::abs(lr - local[static_cast<std::size_t>(col)])));
    }
  }
  b.ab.assign(static_cast<std::size_t>(b.kd + 1) * static_cast<std::size_t>(b.n), 0.0);
  for (Eigen::Index col = 0; col < h.matrix.outerSize(); ++col) {
    const Eigen::Index lc = local[static_cast<std::size_t>(col)];
    if (lc < 0)
      continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(h.matrix, col); it; ++it) {
      const Eigen::Index lr = local[static_cast<std::size_t>(it.row())];
      if (lr >= 0 && lr <= lc)
        b.at(static_cast<lapack_int>(lr), static_cast<lapack_int>(lc)) = it.value();
    }
  }
  return b;
}

inline void band_multiply(const Band &b, const Eigen::VectorXd &x, Eigen::VectorXd &y) {
  y.setZero(x.size());
  for (lapack_int j = 0; j < b.n; ++j)
    for (lapack_int i = std::max<lapack_int>(0, j - b.kd); i <= j; ++i) {
      const double a = b.ab[static_cast<std::size_t>(b.kd + i - j) +
                            static_cast<std::size_t>(j) * static_cast<std::size_t>(b.kd + 1)];
      y(i) += a * x(j);
      if (i != j)
        y(j) += a * x(i);
    }
}

inline SectorSolve solve_sector(const ProductOperator &h, int parity, const SolverOptions &opts) {
  SectorSolve s;
  const auto d = h.atomic_dim;
  std::vector<Eigen::Index> local(h.dimension(), -1);
  for (int nu = 0; nu <= h.n_max; ++nu)
    for (std::size_t k = 0; k < d; ++k)
      if (h.parity(k, nu) == parity) {
        local[static_cast<std::size_t>(h.index(k, nu))] = static_cast<Eigen::Index>(s.members.size());
        s.members.push_back(h.index(k, nu));
      }
  if (s.members.empty()) {
    s.message = "empty sector";
    return s;
  }

  const Band band = sector_band(h, s.members, local);
  const lapack_int n = band.n;

  // Two lowest eigenvalues.
  {
    std::vector<double> ab = band.ab;
    std::vector<double> q(1), w(static_cast<std::size_t>(n)), z(1);
    std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int iu = std::min<lapack_int>(2, n);
    const lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'U', n, band.kd, ab.data(),
                                           band.kd + 1, q.data(), 1, 0.0, 0.0, 1, iu,
                                           2.0 * LAPACKE_dlamch('S'), &found, w.data(), z.data(), 1,
                                           ifail.data());
    if (info != 0 || found < 1) {
      s.message = "dsbevx failed, info = " + std::to_string(info);
      return s;
    }
    s.e0 = w[0];
    if (found > 1)
      s.e1 = w[1];
  }

  // Inverse iteration with shift just below e0, where H - sigma is positive definite.
  double scale = 1.0;
  for (double a : band.ab)
    scale = std::max(scale, std::abs(a));
  double shift_gap = 1e-9 * scale;
  Eigen::VectorXd x(n), hx(n);
  for (lapack_int i = 0; i < n; ++i)
    x(i) = 1.0 + 0.25 * std::sin(0.7 * i);
  x.normalize();
  for (int attempt = 0; attempt < 6; ++attempt, shift_gap *= 10.0) {
    Band shifted = band;
    const double sigma = s.e0 - shift_gap;
    for (lapack_int j = 0; j < n; ++j)
      shifted.at(j, j) -= sigma;
    if (LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', n, shifted.kd, shifted.ab.data(), shifted.kd + 1) != 0)
      continue;
    for (int it = 0; it < opts.max_inverse_iterations; ++it) {
      if (LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'U', n, shifted.kd, 1, shifted.ab.data(),
                         shifted.kd + 1, x.data(), n) != 0)
        break;
      x.normalize();
      band_multiply(band, x, hx);
      if ((hx - s.e0 * x).norm() <= opts.residual_tol * scale) {
        s.ok = true;
        break;
      }
    }
    if (s.ok)
      break;
  }
  if (!s.ok) {
    s.message = "inverse iteration did not converge";
    return s;
  }
  s.vector = std::move(x);
  return s;
}

} // namespace detail

/// Lowest eigenpair of H. The returned vector is a parity eigenstate; among
/// two sectors with equal ground energies (within degeneracy_tol) the one
/// containing lowest weight x vacuum is chosen.
inline GroundSolution ground_state(const ProductOperator &h, const SolverOptions &opts = {}) {
  GroundSolution out;
  out.atomic_dim = h.atomic_dim;
  out.n_max = h.n_max;

  const int home = h.parity(0, 0);
  detail::SectorSolve a = detail::solve_sector(h, home, opts);
  detail::SectorSolve b = detail::solve_sector(h, -home, opts);
  if (!a.ok && !b.ok) {
    out.failed = true;
    out.message = a.message.empty() ? b.message : a.message;
    return out;
  }

  const double tie = opts.degeneracy_tol * std::max(1.0, std::abs(a.e0));
  const bool pick_home = !b.ok || (a.ok && a.e0 <= b.e0 + tie);
  detail::SectorSolve &chosen = pick_home ? a : b;
  const detail::SectorSolve &other = pick_home ? b : a;

  out.energy = chosen.e0;
  out.parity = pick_home ? home : -home;
  out.spectral_gap = chosen.e1 - chosen.e0;
  out.sector_gap = other.ok ? other.e0 - chosen.e0 : std::numeric_limits<double>::infinity();
  out.degenerate = out.spectral_gap < opts.degeneracy_tol;

  out.vector = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h.dimension()));
  for (std::size_t i = 0; i < chosen.members.size(); ++i)
    out.vector(chosen.members[i]) = chosen.vector(static_cast<Eigen::Index>(i));

  Eigen::Index big = 0;
  out.vector.cwiseAbs().maxCoeff(&big);
  if (out.vector(big) < 0.0)
    out.vector = -out.vector;
  return out;
}

/// Same quantity by dense diagonalization of the whole matrix; for small
/// cross-checks only.
inline double ground_energy_dense(const ProductOperator &h) {
  const Eigen::MatrixXd dense(h.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

struct TruncationOptions {
  int step = 20;
  double conv_tol = 1e-8;
  int max_n_max = 600;
};

struct TruncationStep {
  int n_max;
  double energy;
};

struct TruncationResult {
  GroundSolution ground;
  std::vector<TruncationStep> trail;
  bool converged = false;
};

/// Raises n_max in fixed steps until consecutive ground energies agree.
inline TruncationResult converge_truncation(const ModelParams &params, const GeneratorSet &gens,
                                            int start_n_max, const TruncationOptions &topts = {},
                                            const SolverOptions &sopts = {}) {
  if (start_n_max < 0 || topts.step <= 0)
    throw InvalidInput("truncation start must be >= 0 and step > 0");
  TruncationResult res;
  int n_max = start_n_max;
  GroundSolution prev = ground_state(build_hamiltonian(params, gens, n_max), sopts);
  res.trail.push_back({n_max, prev.energy});
  while (!prev.failed && n_max + topts.step <= topts.max_n_max) {
    n_max += topts.step;
    GroundSolution next = ground_state(build_hamiltonian(params, gens, n_max), sopts);
    res.trail.push_back({n_max, next.energy});
    if (next.failed) {
      prev = std::move(next);
      break;
    }
    next.convergence_gap = std::abs(next.energy - prev.energy);
    prev = std::move(next);
    if (prev.convergence_gap < topts.conv_tol) {
      res.converged = true;
      break;
    }
  }
  res.ground = std::move(prev);
  return res;
}

} // namespace su3qpt
