#pragma once

// Derivative-free downhill simplex with dimension-adaptive coefficients and
// automatic restarts from the best vertex. A collapsed simplex is restarted
// around its best point until a restart no longer improves the value.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace su3qpt {

struct SimplexOptions {
  double ftol = 1e-10;      ///< absolute spread of vertex values at convergence
  double initial_step = 0.5;
  int max_evaluations = 20000;
  int max_restarts = 8;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  int restarts = 0;
  bool converged = false;
};

namespace detail {

// One Nelder-Mead run from an axis-aligned simplex around x0.
template <typename F>
SimplexResult simplex_run(F &f, const Eigen::VectorXd &x0, double step, double ftol,
                          int budget) {
  const auto n = x0.size();
  const double dn = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / dn;
  const double contract = 0.75 - 0.5 / dn;
  const double shrink = 1.0 - 1.0 / dn;

  auto eval = [&](const Eigen::VectorXd &x, int &count) {
    ++count;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };

  SimplexResult res;
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> vals(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i)
    pts[static_cast<std::size_t>(i + 1)](i) += (x0(i) != 0.0 ? step * std::max(1.0, std::abs(x0(i)))
                                                              : step);
  for (std::size_t i = 0; i < pts.size(); ++i)
    vals[i] = eval(pts[i], res.evaluations);

  std::vector<std::size_t> order(pts.size());
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(),
                      second = order[order.size() - 2];
    if (vals[worst] - vals[best] <= ftol) {
      res.converged = true;
      break;
    }
    if (res.evaluations >= budget)
      break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (i != worst)
        centroid += pts[i];
    centroid /= dn;

    const Eigen::VectorXd xr = centroid + reflect * (centroid - pts[worst]);
    const double fr = eval(xr, res.evaluations);
    if (fr < vals[best]) {
      const Eigen::VectorXd xe = centroid + expand * (xr - centroid);
      const double fe = eval(xe, res.evaluations);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    // Contraction, outside or inside.
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + contract * (xr - centroid))
                                       : Eigen::VectorXd(centroid + contract * (pts[worst] - centroid));
    const double fc = eval(xc, res.evaluations);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best)
        continue;
      pts[i] = pts[best] + shrink * (pts[i] - pts[best]);
      vals[i] = eval(pts[i], res.evaluations);
    }
  }
  const auto best_it = std::min_element(vals.begin(), vals.end());
  const auto k = static_cast<std::size_t>(best_it - vals.begin());
  res.x = pts[k];
  res.value = vals[k];
  return res;
}

} // namespace detail

/// Minimizes f: R^n -> R starting at x0. Non-finite values count as +max.
template <typename F>
SimplexResult nelder_mead(F &&f, const Eigen::VectorXd &x0, const SimplexOptions &opts = {}) {
  SimplexResult best = detail::simplex_run(f, x0, opts.initial_step, opts.ftol,
                                           opts.max_evaluations);
  double step = opts.initial_step;
  for (int r = 0; r < opts.max_restarts; ++r) {
    const int budget = opts.max_evaluations - best.evaluations;
    if (budget <= 0)
      break;
    step = std::max(step * 0.5, 1e-4);
    SimplexResult next = detail::simplex_run(f, best.x, step, opts.ftol, budget);
    const double gain = best.value - next.value;
    const int used = best.evaluations + next.evaluations;
    const int restarts = best.restarts + 1;
    if (next.value < best.value) {
      best = std::move(next);
    }
    best.evaluations = used;
    best.restarts = restarts;
    if (gain <= opts.ftol) {
      best.converged = true;
      return best;
    }
  }
  return best;
}

} // namespace su3qpt
