#pragma once

// Matrices of the su(3) generators on an irrep in the canonical GT basis.
//
// Conventions: e_ij (i < j) moves one atom from level j down to level i,
// e_ij^dagger moves one atom up from i to j. In the symmetric irrep (N,0,0)
// these coincide with the three-boson realization e_ij = b_i^dagger b_j.
// The raising operators e12^dagger and e23^dagger have nonnegative real
// elements; e13^dagger = [e23^dagger, e12^dagger].

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "json.hpp"
#include "su3qpt/gt_basis.hpp"

namespace su3qpt {

struct GeneratorSet {
  IrrepSpec irrep;
  std::vector<GTPattern> basis;

  // Lowering-type operators (move atoms to lower levels).
  Eigen::MatrixXd e12, e23, e13;
  // Raising-type adjoints.
  Eigen::MatrixXd e12_dag, e23_dag, e13_dag;
  // Diagonal population operators.
  Eigen::MatrixXd e11, e22, e33;
  Eigen::MatrixXd jz1, jz2;

  std::size_t dimension() const { return basis.size(); }
  std::size_t lowest_weight() const { return 0; }
};

namespace detail {

// GT matrix element of the standard U(3) operator E_{j,j+1} that raises
// entry k of row j (rows counted from the bottom, j = 1 or 2). Uses shifted
// labels l_{ij} = m_{ij} - i. Returns the squared element; it is zero or
// negative exactly when the target lies outside the irrep.
inline double gt_raise_squared(const GTPattern &p, int row, int k) {
  const long long l13 = p.h1 - 1, l23 = p.h2 - 2, l33 = p.h3 - 3;
  const long long l12 = p.q1 - 1, l22 = p.q2 - 2;
  const long long l11 = p.r - 1;
  if (row == 1) {
    // Raising r.
    const long long num = -(l12 - l11) * (l22 - l11);
    return static_cast<double>(num);
  }
  const long long lk = (k == 1) ? l12 : l22;
  const long long lo = (k == 1) ? l22 : l12;
  const long long num = -(l13 - lk) * (l23 - lk) * (l33 - lk) * (l11 - lk - 1);
  const long long den = (lo - lk) * (lo - lk - 1);
  return static_cast<double>(num) / static_cast<double>(den);
}

} // namespace detail

inline GeneratorSet build_generators(const IrrepSpec &irrep) {
  GeneratorSet g{irrep, enumerate_patterns(irrep), {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  const auto d = static_cast<Eigen::Index>(g.basis.size());
  const PatternIndex index(irrep);

  g.e12 = Eigen::MatrixXd::Zero(d, d);
  g.e23 = Eigen::MatrixXd::Zero(d, d);
  g.e11 = Eigen::MatrixXd::Zero(d, d);
  g.e22 = Eigen::MatrixXd::Zero(d, d);
  g.e33 = Eigen::MatrixXd::Zero(d, d);

  for (Eigen::Index col = 0; col < d; ++col) {
    const GTPattern &p = g.basis[static_cast<std::size_t>(col)];
    g.e11(col, col) = p.n1();
    g.e22(col, col) = p.n2();
    g.e33(col, col) = p.n3();

    if (const int row = index.find(p.q1, p.q2, p.r + 1); row >= 0)
      g.e12(row, col) = std::sqrt(detail::gt_raise_squared(p, 1, 1));
    if (const int row = index.find(p.q1 + 1, p.q2, p.r); row >= 0)
      g.e23(row, col) = std::sqrt(detail::gt_raise_squared(p, 2, 1));
    if (const int row = index.find(p.q1, p.q2 + 1, p.r); row >= 0)
      g.e23(row, col) = std::sqrt(detail::gt_raise_squared(p, 2, 2));
  }

  g.e13 = g.e12 * g.e23 - g.e23 * g.e12;
  g.e12_dag = g.e12.transpose();
  g.e23_dag = g.e23.transpose();
  g.e13_dag = g.e13.transpose();
  g.jz1 = 0.5 * (g.e22 - g.e11);
  g.jz2 = 0.5 * (g.e33 - g.e22);
  return g;
}

/// Quadratic Casimir sum_{i,j} e_ij e_ji - N^2/3 on the irrep.
inline Eigen::MatrixXd quadratic_casimir(const GeneratorSet &g) {
  const double n = g.irrep.atoms();
  const auto d = static_cast<Eigen::Index>(g.dimension());
  Eigen::MatrixXd c = g.e11 * g.e11 + g.e22 * g.e22 + g.e33 * g.e33;
  c += g.e12 * g.e12_dag + g.e12_dag * g.e12;
  c += g.e23 * g.e23_dag + g.e23_dag * g.e23;
  c += g.e13 * g.e13_dag + g.e13_dag * g.e13;
  c -= (n * n / 3.0) * Eigen::MatrixXd::Identity(d, d);
  return c;
}

/// Diagnostic dump: pattern list plus every dense matrix (row-major lists).
inline nlohmann::json to_json(const GeneratorSet &g) {
  auto dense = [](const Eigen::MatrixXd &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  nlohmann::json out;
  out["irrep"] = {g.irrep.h1(), g.irrep.h2(), g.irrep.h3()};
  out["dimension"] = g.dimension();
  nlohmann::json patterns = nlohmann::json::array();
  for (const auto &p : g.basis)
    patterns.push_back({{"q1", p.q1},
                        {"q2", p.q2},
                        {"r", p.r},
                        {"populations", {p.n1(), p.n2(), p.n3()}}});
  out["patterns"] = std::move(patterns);
  nlohmann::json mats;
  mats["e12"] = dense(g.e12);
  mats["e23"] = dense(g.e23);
  mats["e13"] = dense(g.e13);
  mats["e12_dag"] = dense(g.e12_dag);
  mats["e23_dag"] = dense(g.e23_dag);
  mats["e13_dag"] = dense(g.e13_dag);
  mats["e11"] = dense(g.e11);
  mats["e22"] = dense(g.e22);
  mats["e33"] = dense(g.e33);
  mats["jz1"] = dense(g.jz1);
  mats["jz2"] = dense(g.jz2);
  out["matrices"] = std::move(mats);
  return out;
}

} // namespace su3qpt
