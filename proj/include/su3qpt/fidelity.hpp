#pragma once

// Fidelity F(u, v) = |<u|v>|^2 between coherent and exact ground states and
// between exact ground states at neighbouring points of a coupling grid.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "su3qpt/coherent_states.hpp"
#include "su3qpt/exact_solver.hpp"
#include "su3qpt/variational.hpp"

namespace su3qpt {

inline constexpr double kNormTol = 1e-8;

template <typename A, typename B>
double fidelity(const Eigen::MatrixBase<A> &u, const Eigen::MatrixBase<B> &v) {
  if (u.size() != v.size())
    throw InvalidInput("fidelity: vectors differ in dimension");
  if (std::abs(u.norm() - 1.0) > kNormTol || std::abs(v.norm() - 1.0) > kNormTol)
    throw InvalidInput("fidelity: vectors must be normalized");
  const cdouble overlap = u.template cast<cdouble>().dot(v.template cast<cdouble>());
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

/// Re-embeds a pattern-major product vector in a larger Fock truncation.
inline Eigen::VectorXd pad_fock(const Eigen::VectorXd &v, std::size_t atomic_dim, int from_n_max,
                                int to_n_max) {
  if (to_n_max < from_n_max)
    throw InvalidInput("pad_fock cannot shrink the Fock space");
  const auto d = static_cast<Eigen::Index>(atomic_dim);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d * (to_n_max + 1));
  for (Eigen::Index k = 0; k < d; ++k)
    out.segment(k * (to_n_max + 1), from_n_max + 1) = v.segment(k * (from_n_max + 1), from_n_max + 1);
  return out;
}

/// F between two ground states that may use different truncations.
inline double ground_fidelity(const GroundSolution &a, const GroundSolution &b) {
  if (a.atomic_dim != b.atomic_dim)
    throw InvalidInput("ground states belong to different irreps");
  const int n = std::max(a.n_max, b.n_max);
  return fidelity(pad_fock(a.vector, a.atomic_dim, a.n_max, n),
                  pad_fock(b.vector, b.atomic_dim, b.n_max, n));
}

/// Product |gamma> (x) |alpha> in the pattern-major basis, with the field
/// factor truncated at n_max and renormalized.
inline Eigen::VectorXcd embed_coherent(const Eigen::VectorXcd &atomic, cdouble alpha, int n_max,
                                       double leak_tol = kDefaultLeakTol) {
  const FieldCoherent field = field_coherent(alpha, n_max, leak_tol);
  Eigen::VectorXcd out(atomic.size() * (n_max + 1));
  for (Eigen::Index k = 0; k < atomic.size(); ++k)
    out.segment(k * (n_max + 1), n_max + 1) = atomic(k) * field.amplitudes;
  return out;
}

/// F(Coh, Q) at one model point.
inline double coherent_vs_quantum(const VariationalResult &vr, const GroundSolution &gs,
                                  double leak_tol = kDefaultLeakTol) {
  if (gs.failed)
    throw InvalidInput("coherent_vs_quantum: ground state solve failed");
  if (static_cast<std::size_t>(vr.atomic_state.size()) != gs.atomic_dim)
    throw InvalidInput("coherent_vs_quantum: irrep mismatch");
  return fidelity(embed_coherent(vr.atomic_state, vr.params_min.alpha, gs.n_max, leak_tol),
                  gs.vector);
}

enum class ScanDirection { Horizontal, Vertical };

inline std::string_view to_string(ScanDirection d) {
  return d == ScanDirection::Horizontal ? "horizontal" : "vertical";
}

/// Ground states on a regular grid; index = i2 * steps1 + i1, where axis 1
/// (first coupling, "horizontal") runs fastest.
struct GroundGrid {
  int steps1 = 0;
  int steps2 = 0;
  std::vector<GroundSolution> points;

  const GroundSolution &at(int i1, int i2) const {
    return points[static_cast<std::size_t>(i2 * steps1 + i1)];
  }
};

struct FidelityRecord {
  int i1 = 0;
  int i2 = 0;
  double f_qq = 1.0;
  bool marker = false;
  bool reliable = true; ///< false if either end is degenerate or failed
  ScanDirection direction = ScanDirection::Horizontal;
};

/// F(Q,Q) between each point and its successor along the chosen axis; a
/// QPT marker is raised where F < 1 - qpt_delta. Points on the last
/// column/row have no successor and are omitted.
inline std::vector<FidelityRecord> neighbor_fidelity_scan(const GroundGrid &grid,
                                                          ScanDirection direction,
                                                          double qpt_delta = 1e-3) {
  if (grid.points.size() != static_cast<std::size_t>(grid.steps1 * grid.steps2))
    throw InvalidInput("neighbor_fidelity_scan: grid size mismatch");
  std::vector<FidelityRecord> out;
  for (int i2 = 0; i2 < grid.steps2; ++i2)
    for (int i1 = 0; i1 < grid.steps1; ++i1) {
      const int j1 = direction == ScanDirection::Horizontal ? i1 + 1 : i1;
      const int j2 = direction == ScanDirection::Horizontal ? i2 : i2 + 1;
      if (j1 >= grid.steps1 || j2 >= grid.steps2)
        continue;
      const GroundSolution &a = grid.at(i1, i2);
      const GroundSolution &b = grid.at(j1, j2);
      FidelityRecord rec;
      rec.i1 = i1;
      rec.i2 = i2;
      rec.direction = direction;
      if (a.failed || b.failed) {
        rec.reliable = false;
        rec.f_qq = std::numeric_limits<double>::quiet_NaN();
      } else {
        rec.f_qq = ground_fidelity(a, b);
        rec.reliable = !(a.degenerate || b.degenerate);
        rec.marker = rec.f_qq < 1.0 - qpt_delta;
      }
      out.push_back(rec);
    }
  return out;
}

} // namespace su3qpt
