#pragma once

// Trial states for the variational ground state: HW(1) field coherent
// states on a truncated Fock space, and SU(3) atomic coherent states built
// either by exponentiating the raising operators or from the closed
// Gelfand-Tsetlin expansion.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "su3qpt/generators.hpp"

namespace su3qpt {

using cdouble = std::complex<double>;

/// Fock space too small to hold the requested coherent state.
class TruncationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct FieldCoherent {
  cdouble alpha;
  int n_max = 0;
  Eigen::VectorXcd amplitudes;
  /// 1 - sum |c_nu|^2 before renormalization.
  double leakage = 0.0;
};

inline constexpr double kDefaultLeakTol = 1e-8;

inline FieldCoherent field_coherent(cdouble alpha, int n_max,
                                    double leak_tol = kDefaultLeakTol) {
  if (n_max < 0)
    throw InvalidInput("Fock truncation n_max must be >= 0");
  FieldCoherent f{alpha, n_max, Eigen::VectorXcd(n_max + 1), 0.0};
  // c_nu = exp(-|a|^2/2) a^nu / sqrt(nu!), by recurrence c_{nu+1} = c_nu a / sqrt(nu+1)
  cdouble c = std::exp(-0.5 * std::norm(alpha));
  double weight = 0.0;
  for (int nu = 0; nu <= n_max; ++nu) {
    f.amplitudes(nu) = c;
    weight += std::norm(c);
    c *= alpha / std::sqrt(static_cast<double>(nu + 1));
  }
  f.leakage = std::max(0.0, 1.0 - weight);
  if (f.leakage > leak_tol)
    throw TruncationError("coherent amplitude |alpha| = " + std::to_string(std::abs(alpha)) +
                          " leaks " + std::to_string(f.leakage) + " beyond n_max = " +
                          std::to_string(n_max));
  f.amplitudes /= std::sqrt(weight);
  return f;
}

/// Three complex parameters of an SU(3) coherent state, coupled to the
/// raising operators as gamma3 e12^dag + gamma2 e13^dag + gamma1 e23^dag.
struct Gammas {
  cdouble g1, g2, g3;
};

struct AtomicCoherent {
  Gammas gammas;
  IrrepSpec irrep;
  Eigen::VectorXcd amplitudes;
};

/// Fixes the global phase so the lowest-weight amplitude is real >= 0.
inline void align_phase(Eigen::VectorXcd &v, Eigen::Index reference = 0) {
  const double mag = std::abs(v(reference));
  if (mag > 0.0)
    v *= std::conj(v(reference)) / mag;
}

/// exp(gamma3 e12^dag + gamma2 e13^dag + gamma1 e23^dag) |lowest>, without
/// normalization. The exponent is nilpotent so the series terminates.
inline Eigen::VectorXcd su3_coherent_exp_unnormalized(const Gammas &gam,
                                                      const GeneratorSet &gens) {
  const auto d = static_cast<Eigen::Index>(gens.dimension());
  const Eigen::MatrixXcd raise = gam.g3 * gens.e12_dag.cast<cdouble>() +
                                 gam.g2 * gens.e13_dag.cast<cdouble>() +
                                 gam.g1 * gens.e23_dag.cast<cdouble>();
  Eigen::VectorXcd term = Eigen::VectorXcd::Zero(d);
  term(static_cast<Eigen::Index>(gens.lowest_weight())) = 1.0;
  Eigen::VectorXcd sum = term;
  // Each application moves at least one atom up, so 2N steps exhaust it.
  const int max_order = 2 * gens.irrep.atoms();
  for (int k = 1; k <= max_order; ++k) {
    term = raise * term / static_cast<double>(k);
    if (term.squaredNorm() == 0.0)
      break;
    sum += term;
  }
  return sum;
}

inline AtomicCoherent su3_coherent_exp(const Gammas &gam, const GeneratorSet &gens) {
  Eigen::VectorXcd v = su3_coherent_exp_unnormalized(gam, gens);
  v.normalize();
  return {gam, gens.irrep, std::move(v)};
}

namespace detail {

inline double binomial(int n, int k) {
  if (k < 0 || k > n)
    return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i)
    b = b * (n - k + i) / i;
  return b;
}

inline cdouble ipow(cdouble z, int k) {
  cdouble out = 1.0;
  for (int i = 0; i < k; ++i)
    out *= z;
  return out;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i)
    f *= i;
  return f;
}

} // namespace detail

/// Scalar S_lmn(h): the component of (e13^dag)^(l+m) applied to the pattern
/// with middle row (h1, h2-n), bottom h1, on the pattern with rows
/// (h1-l, h2-n-m), bottom h1-l-m. Evaluated by explicit matrix powers.
inline double s_coefficient(int l, int m, int n, const GeneratorSet &gens) {
  const IrrepSpec &h = gens.irrep;
  const PatternIndex index(h);
  const int from = index.find(h.h1(), h.h2() - n, h.h1());
  const int to = index.find(h.h1() - l, h.h2() - n - m, h.h1() - l - m);
  if (from < 0 || to < 0)
    throw InvalidInput("S coefficient indices outside the irrep");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gens.dimension()));
  v(from) = 1.0;
  for (int k = 0; k < l + m; ++k)
    v = gens.e13_dag * v;
  return v(to);
}

/// The four-fold Gelfand-Tsetlin sum for the ordered product
/// exp(g3 e12^dag) exp(g2 e13^dag) exp(g1 e23^dag) |lowest>, unnormalized.
inline Eigen::VectorXcd su3_coherent_ordered_unnormalized(const Gammas &gam,
                                                          const GeneratorSet &gens) {
  const IrrepSpec &h = gens.irrep;
  const PatternIndex index(h);
  const int a = h.h1() - h.h2();
  const int b = h.h2() - h.h3();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(gens.dimension()));
  for (int n = 0; n <= b; ++n)
    for (int l = 0; l <= a; ++l)
      for (int m = 0; m <= b - n; ++m) {
        const double s = s_coefficient(l, m, n, gens);
        for (int j = 0; j <= a - l + n; ++j) {
          const int target = index.find(h.h1() - l, h.h2() - n - m, h.h1() - l - m - j);
          if (target < 0)
            continue;
          const double weight = std::sqrt(detail::binomial(b, n)) *
                                std::sqrt(detail::binomial(a - l + n, j)) *
                                std::sqrt(detail::binomial(m + j, j)) * s /
                                detail::factorial(l + m);
          v(target) += detail::ipow(gam.g1, n) * detail::ipow(gam.g2, l + m) *
                       detail::ipow(gam.g3, j) * weight;
        }
      }
  return v;
}

/// Same state as su3_coherent_exp, evaluated through the GT sum. The ordered
/// product differs from the single exponential by a shift of the e13^dag
/// parameter, g2 -> g2 + g1 g3 / 2, which is applied here.
inline AtomicCoherent su3_coherent_gt(const Gammas &gam, const GeneratorSet &gens) {
  const Gammas shifted{gam.g1, gam.g2 + 0.5 * gam.g1 * gam.g3, gam.g3};
  Eigen::VectorXcd v = su3_coherent_ordered_unnormalized(shifted, gens);
  v.normalize();
  return {gam, gens.irrep, std::move(v)};
}

inline nlohmann::json to_json(const AtomicCoherent &s) {
  nlohmann::json amps = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i)
    amps.push_back({s.amplitudes(i).real(), s.amplitudes(i).imag()});
  return {{"irrep", {s.irrep.h1(), s.irrep.h2(), s.irrep.h3()}},
          {"gammas",
           {{s.gammas.g1.real(), s.gammas.g1.imag()},
            {s.gammas.g2.real(), s.gammas.g2.imag()},
            {s.gammas.g3.real(), s.gammas.g3.imag()}}},
          {"amplitudes", std::move(amps)}};
}

inline nlohmann::json to_json(const FieldCoherent &f) {
  nlohmann::json amps = nlohmann::json::array();
  for (Eigen::Index i = 0; i < f.amplitudes.size(); ++i)
    amps.push_back({f.amplitudes(i).real(), f.amplitudes(i).imag()});
  return {{"alpha", {f.alpha.real(), f.alpha.imag()}},
          {"n_max", f.n_max},
          {"leakage", f.leakage},
          {"amplitudes", std::move(amps)}};
}

} // namespace su3qpt
