#pragma once

// Coherent-state energy surface and its multi-start minimization.
//
// The trial state is |alpha> (x) |gamma, h>, so field expectations are
// analytic: <a^dag a> = |alpha|^2 and <a + a^dag> = 2 Re alpha. Only the
// atomic factor is represented numerically, on the d_h-dimensional irrep.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "su3qpt/coherent_states.hpp"
#include "su3qpt/model.hpp"
#include "su3qpt/nelder_mead.hpp"

namespace su3qpt {

enum class Phase { Normal, SuperRadiant };

inline std::string_view to_string(Phase p) {
  return p == Phase::Normal ? "normal" : "superradiant";
}

enum class ParameterMode { Real, Complex };

struct CoherentParams {
  cdouble alpha;
  Gammas gammas;
};

struct MinimizeOptions {
  int n_starts = 8; ///< seeded random starts, in addition to origin and warm start
  std::uint64_t seed = 20240611;
  ParameterMode mode = ParameterMode::Real;
  double ftol = 1e-10;
  double n_tol = 1e-6;
  double e_tol = 1e-8;
  int max_evaluations = 20000; ///< per start
};

struct VariationalResult {
  CoherentParams params_min;
  double energy = 0.0;
  double photon_number = 0.0;
  double jz1 = 0.0;
  double jz2 = 0.0;
  Phase phase = Phase::Normal;
  int restarts_used = 0;
  double spread = 0.0;
  bool converged = true;
  Eigen::VectorXcd atomic_state; ///< normalized coherent vector at the minimum
};

/// Normal iff the field is empty and the energy has not dropped below E0.
inline Phase classify_phase(double photon_number, double energy, double decoupled,
                            double n_tol = 1e-6, double e_tol = 1e-8) {
  return (photon_number < n_tol && energy > decoupled - e_tol) ? Phase::Normal
                                                               : Phase::SuperRadiant;
}

/// Precomputed evaluator of <alpha, gamma| H |alpha, gamma>.
class EnergySurface {
public:
  struct Point {
    double energy;
    double photon_number;
    double jz1;
    double jz2;
  };

  EnergySurface(const ModelParams &params, const GeneratorSet &gens)
      : params_(params), gens_(gens), d_(static_cast<Eigen::Index>(gens.dimension())),
        max_order_(2 * gens.irrep.atoms()) {
    params.validate();
    if (params.atoms != gens.irrep.atoms())
      throw InvalidInput("model atom count does not match the irrep");
    coupling_ = params.mu12 * (gens.e12 + gens.e12_dag) + params.mu13 * (gens.e13 + gens.e13_dag) +
                params.mu23 * (gens.e23 + gens.e23_dag);
    diagonal_ = params.omega1 * gens.jz1.diagonal() + params.omega2 * gens.jz2.diagonal();
    scale_ = 2.0 / std::sqrt(static_cast<double>(params.atoms));
  }

  const ModelParams &params() const { return params_; }
  const GeneratorSet &generators() const { return gens_; }

  double operator()(const CoherentParams &p) const {
    if (is_real(p))
      return evaluate_impl<double>(p.alpha.real(), {p.gammas.g1.real(), p.gammas.g2.real(),
                                                    p.gammas.g3.real()})
          .energy;
    return evaluate_impl<cdouble>(p.alpha, {p.gammas.g1, p.gammas.g2, p.gammas.g3}).energy;
  }

  Point evaluate(const CoherentParams &p) const {
    return evaluate_impl<cdouble>(p.alpha, {p.gammas.g1, p.gammas.g2, p.gammas.g3});
  }

  /// Real-mode fast path: x = (alpha, gamma1, gamma2, gamma3).
  double real_energy(const Eigen::Ref<const Eigen::VectorXd> &x) const {
    return evaluate_impl<double>(x(0), {x(1), x(2), x(3)}).energy;
  }

private:
  static bool is_real(const CoherentParams &p) {
    return p.alpha.imag() == 0.0 && p.gammas.g1.imag() == 0.0 && p.gammas.g2.imag() == 0.0 &&
           p.gammas.g3.imag() == 0.0;
  }

  template <typename Scalar>
  Point evaluate_impl(cdouble alpha, std::array<Scalar, 3> g) const {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Mat raise = g[2] * gens_.e12_dag.template cast<Scalar>() +
                      g[1] * gens_.e13_dag.template cast<Scalar>() +
                      g[0] * gens_.e23_dag.template cast<Scalar>();
    Vec term = Vec::Zero(d_);
    term(0) = Scalar(1);
    Vec v = term;
    for (int k = 1; k <= max_order_; ++k) {
      term = raise * term / static_cast<double>(k);
      v += term;
    }
    const double norm2 = v.squaredNorm();
    Point out{};
    if (!std::isfinite(norm2) || norm2 <= 0.0) {
      out.energy = std::numeric_limits<double>::infinity();
      return out;
    }
    const Eigen::VectorXd weights = v.cwiseAbs2() / norm2;
    out.jz1 = weights.dot(gens_.jz1.diagonal());
    out.jz2 = weights.dot(gens_.jz2.diagonal());
    const double atomic_coupling = std::real(v.dot(coupling_.template cast<Scalar>() * v)) / norm2;
    out.photon_number = std::norm(alpha);
    out.energy = weights.dot(diagonal_) + params_.field_frequency * out.photon_number -
                 scale_ * alpha.real() * atomic_coupling;
    return out;
  }

  ModelParams params_;
  const GeneratorSet &gens_;
  Eigen::Index d_;
  int max_order_;
  Eigen::MatrixXd coupling_;
  Eigen::VectorXd diagonal_;
  double scale_ = 0.0;
};

inline double energy_surface(const CoherentParams &p, const ModelParams &params,
                             const GeneratorSet &gens) {
  return EnergySurface(params, gens)(p);
}

namespace detail {

inline Eigen::VectorXd pack(const CoherentParams &p, ParameterMode mode) {
  if (mode == ParameterMode::Real)
    return Eigen::Vector4d(p.alpha.real(), p.gammas.g1.real(), p.gammas.g2.real(),
                           p.gammas.g3.real());
  Eigen::VectorXd x(8);
  x << p.alpha.real(), p.alpha.imag(), p.gammas.g1.real(), p.gammas.g1.imag(),
      p.gammas.g2.real(), p.gammas.g2.imag(), p.gammas.g3.real(), p.gammas.g3.imag();
  return x;
}

inline CoherentParams unpack(const Eigen::VectorXd &x, ParameterMode mode) {
  if (mode == ParameterMode::Real)
    return {x(0), {x(1), x(2), x(3)}};
  return {{x(0), x(1)}, {{x(2), x(3)}, {x(4), x(5)}, {x(6), x(7)}}};
}

/// The symmetry a -> -a combined with the atomic parity leaves the energy
/// invariant; it flips the sign of gammas on transitions that change parity.
inline CoherentParams parity_partner(const CoherentParams &p, Configuration c) {
  const auto g = parity_grading(c);
  auto sign = [&](int i, int j) { return ((g[i] + g[j]) % 2 == 0) ? 1.0 : -1.0; };
  return {-p.alpha,
          {sign(1, 2) * p.gammas.g1, sign(0, 2) * p.gammas.g2, sign(0, 1) * p.gammas.g3}};
}

} // namespace detail

/// Best of several simplex searches: the origin, an optional warm start and
/// n_starts seeded random points.
inline VariationalResult minimize(const ModelParams &params, const GeneratorSet &gens,
                                  const MinimizeOptions &opts = {},
                                  const std::optional<CoherentParams> &warm_start = {}) {
  const EnergySurface surface(params, gens);
  const ParameterMode mode = opts.mode;
  const auto dims = mode == ParameterMode::Real ? 4 : 8;

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(dims));
  if (warm_start)
    starts.push_back(detail::pack(*warm_start, mode));
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> field(-3.0, 3.0), atom(-1.5, 1.5);
  for (int s = 0; s < opts.n_starts; ++s) {
    Eigen::VectorXd x(dims);
    for (Eigen::Index i = 0; i < dims; ++i) {
      const bool is_field = mode == ParameterMode::Real ? i == 0 : i < 2;
      x(i) = is_field ? field(rng) : atom(rng);
    }
    starts.push_back(std::move(x));
  }

  auto objective = [&](const Eigen::VectorXd &x) {
    if (mode == ParameterMode::Real)
      return surface.real_energy(x);
    return surface(detail::unpack(x, mode));
  };

  SimplexOptions simplex;
  simplex.ftol = opts.ftol;
  simplex.max_evaluations = opts.max_evaluations;

  VariationalResult result;
  double best = std::numeric_limits<double>::infinity();
  double worst = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  bool any_converged = false;
  for (const auto &x0 : starts) {
    const SimplexResult run = nelder_mead(objective, x0, simplex);
    if (!std::isfinite(run.value))
      continue;
    any_converged = any_converged || run.converged;
    if (run.converged)
      worst = std::max(worst, run.value);
    if (run.value < best) {
      best = run.value;
      best_x = run.x;
    }
  }
  result.restarts_used = static_cast<int>(starts.size());
  result.converged = any_converged;
  if (best_x.size() == 0) {
    result.energy = std::numeric_limits<double>::quiet_NaN();
    result.converged = false;
    return result;
  }
  result.spread = std::isfinite(worst) ? worst - best : 0.0;

  CoherentParams p = detail::unpack(best_x, mode);
  if (p.alpha.real() < 0.0)
    p = detail::parity_partner(p, params.config);
  const auto point = surface.evaluate(p);
  result.params_min = p;
  result.energy = point.energy;
  result.photon_number = point.photon_number;
  result.jz1 = point.jz1;
  result.jz2 = point.jz2;
  result.atomic_state = su3_coherent_exp(p.gammas, gens).amplitudes;
  result.phase = classify_phase(result.photon_number, result.energy,
                                decoupled_energy(params, gens.irrep), opts.n_tol, opts.e_tol);
  return result;
}

} // namespace su3qpt
