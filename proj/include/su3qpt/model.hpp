#pragma once

// N three-level atoms in one irrep coupled to a single field mode, without
// the rotating-wave approximation:
//
//   H = w1 Jz1 + w2 Jz2 + Omega a^dag a
//       - (1/sqrt N) sum_{i<j} mu_ij (e_ij + e_ij^dag)(a + a^dag)
//
// Product-space vectors are indexed as pattern * (n_max + 1) + nu.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "su3qpt/generators.hpp"

namespace su3qpt {

/// Dipole-allowed transition topology; each forbids one coupling.
enum class Configuration { Xi, Lambda, V };

inline std::string_view to_string(Configuration c) {
  switch (c) {
  case Configuration::Xi:
    return "xi";
  case Configuration::Lambda:
    return "lambda";
  case Configuration::V:
    return "v";
  }
  return "?";
}

inline Configuration parse_configuration(std::string_view s) {
  std::string lower(s);
  for (char &c : lower)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "xi")
    return Configuration::Xi;
  if (lower == "lambda")
    return Configuration::Lambda;
  if (lower == "v")
    return Configuration::V;
  throw InvalidInput("unknown configuration '" + std::string(s) + "' (expected xi|lambda|v)");
}

/// The two couplings allowed by a configuration, as (i,j) level pairs in
/// ascending order. These are the axes of a coupling-plane sweep.
inline std::array<std::array<int, 2>, 2> allowed_couplings(Configuration c) {
  switch (c) {
  case Configuration::Xi:
    return {{{1, 2}, {2, 3}}};
  case Configuration::Lambda:
    return {{{1, 3}, {2, 3}}};
  case Configuration::V:
    return {{{1, 2}, {1, 3}}};
  }
  return {};
}

/// Z2 grading g_i of the three levels such that every allowed transition
/// flips (-1)^(sum g_i n_i). Together with photon parity this gives a
/// conserved parity of the full Hamiltonian.
inline std::array<int, 3> parity_grading(Configuration c) {
  switch (c) {
  case Configuration::Xi:
    return {0, 1, 0};
  case Configuration::Lambda:
    return {0, 0, 1};
  case Configuration::V:
    return {0, 1, 1};
  }
  return {};
}

struct Gaps {
  double omega1;
  double omega2;
};

/// Gap combinations with the energy zero at the mean of the three levels.
inline Gaps derive_gaps(double level1, double level2, double level3) {
  if (!(level1 <= level2 && level2 <= level3))
    throw InvalidInput("level energies must satisfy w1 <= w2 <= w3");
  return {-4.0 / 3.0 * level1 + 2.0 / 3.0 * level2 + 2.0 / 3.0 * level3,
          -2.0 / 3.0 * level1 - 2.0 / 3.0 * level2 + 4.0 / 3.0 * level3};
}

struct ModelParams {
  double omega1 = 4.0 / 3.0;
  double omega2 = 5.0 / 3.0;
  double field_frequency = 0.5; // Omega
  double mu12 = 0.0;
  double mu13 = 0.0;
  double mu23 = 0.0;
  Configuration config = Configuration::Xi;
  int atoms = 4;

  /// Throws if a coupling forbidden by the configuration is nonzero.
  void validate() const {
    const bool bad = (config == Configuration::Xi && mu13 != 0.0) ||
                     (config == Configuration::Lambda && mu12 != 0.0) ||
                     (config == Configuration::V && mu23 != 0.0);
    if (bad)
      throw InvalidInput("coupling forbidden by the " + std::string(to_string(config)) +
                         " configuration is nonzero");
    if (atoms <= 0)
      throw InvalidInput("atom count must be positive");
  }

  double coupling(int i, int j) const {
    if (i == 1 && j == 2)
      return mu12;
    if (i == 1 && j == 3)
      return mu13;
    if (i == 2 && j == 3)
      return mu23;
    throw InvalidInput("coupling index must be (1,2), (1,3) or (2,3)");
  }

  void set_coupling(int i, int j, double value) {
    if (i == 1 && j == 2)
      mu12 = value;
    else if (i == 1 && j == 3)
      mu13 = value;
    else if (i == 2 && j == 3)
      mu23 = value;
    else
      throw InvalidInput("coupling index must be (1,2), (1,3) or (2,3)");
  }

  /// Sets the two configuration-allowed couplings (sweep-plane coordinates).
  void set_plane_point(double first, double second) {
    const auto axes = allowed_couplings(config);
    mu12 = mu13 = mu23 = 0.0;
    set_coupling(axes[0][0], axes[0][1], first);
    set_coupling(axes[1][0], axes[1][1], second);
  }
};

/// w1 (h2-h1)/2 + w2 (h3-h2)/2: the energy of lowest weight x vacuum.
inline double decoupled_energy(const ModelParams &p, const IrrepSpec &h) {
  return p.omega1 * (h.h2() - h.h1()) / 2.0 + p.omega2 * (h.h3() - h.h2()) / 2.0;
}

struct ProductOperator {
  std::size_t atomic_dim = 0;
  int n_max = 0;
  Eigen::SparseMatrix<double> matrix;
  /// (-1)^(sum g_i n_i) per pattern, used to split the parity sectors.
  std::vector<int> atomic_parity;

  std::size_t dimension() const { return atomic_dim * static_cast<std::size_t>(n_max + 1); }
  Eigen::Index index(std::size_t pattern, int nu) const {
    return static_cast<Eigen::Index>(pattern * static_cast<std::size_t>(n_max + 1) +
                                     static_cast<std::size_t>(nu));
  }
  /// Total parity of basis state (pattern, nu): +1 or -1.
  int parity(std::size_t pattern, int nu) const {
    return atomic_parity[pattern] * ((nu % 2 == 0) ? 1 : -1);
  }
};

namespace detail {

inline std::vector<int> atomic_parities(const GeneratorSet &gens, Configuration c) {
  const auto g = parity_grading(c);
  std::vector<int> out;
  out.reserve(gens.dimension());
  for (const auto &p : gens.basis) {
    const int s = g[0] * p.n1() + g[1] * p.n2() + g[2] * p.n3();
    out.push_back(s % 2 == 0 ? 1 : -1);
  }
  return out;
}

} // namespace detail

inline ProductOperator build_hamiltonian(const ModelParams &params, const GeneratorSet &gens,
                                         int n_max) {
  params.validate();
  if (n_max < 0)
    throw InvalidInput("Fock truncation n_max must be >= 0");
  if (params.atoms != gens.irrep.atoms())
    throw InvalidInput("model atom count does not match the irrep");

  ProductOperator op{gens.dimension(), n_max, {}, detail::atomic_parities(gens, params.config)};
  const auto d = static_cast<Eigen::Index>(gens.dimension());
  const double scale = 1.0 / std::sqrt(static_cast<double>(params.atoms));

  // Atomic part of the coupling: -(1/sqrt N) sum mu_ij (e_ij + e_ij^dag).
  const Eigen::MatrixXd coupling =
      -scale * (params.mu12 * (gens.e12 + gens.e12_dag) + params.mu13 * (gens.e13 + gens.e13_dag) +
                params.mu23 * (gens.e23 + gens.e23_dag));

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(op.dimension() * static_cast<std::size_t>(1 + 2 * d));
  for (Eigen::Index k = 0; k < d; ++k) {
    const double atomic = params.omega1 * gens.jz1(k, k) + params.omega2 * gens.jz2(k, k);
    for (int nu = 0; nu <= n_max; ++nu) {
      const Eigen::Index row = op.index(static_cast<std::size_t>(k), nu);
      triplets.emplace_back(row, row, atomic + params.field_frequency * nu);
      for (Eigen::Index kp = 0; kp < d; ++kp) {
        const double c = coupling(kp, k);
        if (c == 0.0)
          continue;
        // (a + a^dag) connects nu to nu +- 1.
        if (nu + 1 <= n_max)
          triplets.emplace_back(op.index(static_cast<std::size_t>(kp), nu + 1), row,
                                c * std::sqrt(static_cast<double>(nu + 1)));
        if (nu >= 1)
          triplets.emplace_back(op.index(static_cast<std::size_t>(kp), nu - 1), row,
                                c * std::sqrt(static_cast<double>(nu)));
      }
    }
  }
  const auto dim = static_cast<Eigen::Index>(op.dimension());
  op.matrix.resize(dim, dim);
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

struct ObservableOperators {
  Eigen::SparseMatrix<double> photon_number; // a^dag a
  Eigen::SparseMatrix<double> jz1;
  Eigen::SparseMatrix<double> jz2;
};

inline ObservableOperators observable_operators(const GeneratorSet &gens, int n_max) {
  if (n_max < 0)
    throw InvalidInput("Fock truncation n_max must be >= 0");
  const auto d = static_cast<Eigen::Index>(gens.dimension());
  const Eigen::Index dim = d * (n_max + 1);
  std::vector<Eigen::Triplet<double>> n_t, j1_t, j2_t;
  for (Eigen::Index k = 0; k < d; ++k)
    for (int nu = 0; nu <= n_max; ++nu) {
      const Eigen::Index i = k * (n_max + 1) + nu;
      n_t.emplace_back(i, i, nu);
      j1_t.emplace_back(i, i, gens.jz1(k, k));
      j2_t.emplace_back(i, i, gens.jz2(k, k));
    }
  ObservableOperators ops;
  for (auto [m, t] : {std::pair{&ops.photon_number, &n_t}, std::pair{&ops.jz1, &j1_t},
                      std::pair{&ops.jz2, &j2_t}}) {
    m->resize(dim, dim);
    m->setFromTriplets(t->begin(), t->end());
  }
  return ops;
}

} // namespace su3qpt
