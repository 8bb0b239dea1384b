// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only name[,name...]] [--out dir] [--config file]
//
// Without --only every criterion runs. The exit status is nonzero if any
// selected criterion fails. Sweep-based criteria share one sweep per run.

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "su3qpt/sweep.hpp"

using namespace su3qpt;
using Eigen::MatrixXd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<IrrepSpec> irreps_up_to(int n_max) {
  std::vector<IrrepSpec> out;
  for (int n = 1; n <= n_max; ++n)
    for (const auto &h : irreps_for_atoms(n))
      out.push_back(h);
  return out;
}

double max_abs(const MatrixXd &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------

Outcome algebra() {
  constexpr double tol = 1e-12;
  double worst_comm = 0.0, worst_casimir = 0.0, worst_boson = 0.0;
  int irreps = 0;
  for (const auto &h : irreps_up_to(6)) {
    ++irreps;
    const auto g = build_generators(h);
    const std::array<std::array<const MatrixXd *, 3>, 3> e{
        {{&g.e11, &g.e12, &g.e13}, {&g.e12_dag, &g.e22, &g.e23}, {&g.e13_dag, &g.e23_dag, &g.e33}}};
    const auto d = static_cast<Eigen::Index>(g.dimension());
    // [E_ij, E_kl] = delta_jk E_il - delta_il E_kj
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            MatrixXd expect = MatrixXd::Zero(d, d);
            if (j == k)
              expect += *e[i][l];
            if (i == l)
              expect -= *e[k][j];
            const MatrixXd c = *e[i][j] * *e[k][l] - *e[k][l] * *e[i][j];
            worst_comm = std::max(worst_comm, max_abs(c - expect));
          }
    // sum_ij E_ij E_ji = sum_i h_i (h_i + 4 - 2i) on the whole irrep.
    MatrixXd casimir = MatrixXd::Zero(d, d);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        casimir += *e[i][j] * *e[j][i];
    const double expected = h.h1() * (h.h1() + 2.0) + h.h2() * h.h2() + h.h3() * (h.h3() - 2.0);
    worst_casimir =
        std::max(worst_casimir, max_abs(casimir - expected * MatrixXd::Identity(d, d)));
    // Symmetric irreps: E_ij = b_i^dag b_j on three boson modes.
    if (h.h2() == 0) {
      std::map<std::array<int, 3>, Eigen::Index> where;
      for (std::size_t k = 0; k < g.dimension(); ++k)
        where[g.basis[k].populations()] = static_cast<Eigen::Index>(k);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          MatrixXd b = MatrixXd::Zero(d, d);
          for (const auto &[occ, col] : where) {
            if (occ[static_cast<std::size_t>(j)] == 0)
              continue;
            auto next = occ;
            next[static_cast<std::size_t>(j)] -= 1;
            next[static_cast<std::size_t>(i)] += 1;
            b(where.at(next), col) =
                i == j ? occ[static_cast<std::size_t>(j)]
                       : std::sqrt(static_cast<double>(occ[static_cast<std::size_t>(j)] *
                                                       (occ[static_cast<std::size_t>(i)] + 1)));
          }
          worst_boson = std::max(worst_boson, max_abs(*e[i][j] - b));
        }
    }
  }
  return {worst_comm <= tol && worst_casimir <= tol && worst_boson <= tol,
          fmt("%d irreps N<=6: max commutator err %.1e, Casimir err %.1e, boson err %.1e "
              "(tol 1e-12)",
              irreps, worst_comm, worst_casimir, worst_boson)};
}

Outcome coherent_cross_check() {
  std::mt19937_64 rng(777);
  std::normal_distribution<double> n01;
  double worst = 0.0;
  int count = 0;
  for (const auto &h : irreps_up_to(6)) {
    const auto g = build_generators(h);
    for (int k = 0; k < 100; ++k, ++count) {
      const Gammas gm{{n01(rng), n01(rng)}, {n01(rng), n01(rng)}, {n01(rng), n01(rng)}};
      worst = std::max(worst, (su3_coherent_gt(gm, g).amplitudes -
                               su3_coherent_exp(gm, g).amplitudes)
                                  .norm());
    }
  }
  return {worst <= 1e-10, fmt("%d random complex gamma: max |gt - exp| = %.2e (tol 1e-10)",
                              count, worst)};
}

Outcome decoupled() {
  const ModelParams p;
  const std::array<double, 4> expected{-8.0 / 3.0, -13.0 / 6.0, -5.0 / 3.0, -2.0 / 3.0};
  double worst = 0.0;
  std::string values;
  const auto irreps = irreps_for_atoms(4);
  for (std::size_t k = 0; k < irreps.size(); ++k) {
    const auto g = build_generators(irreps[k]);
    const double var = minimize(p, g).energy;
    const double ex = converge_truncation(p, g, 10).ground.energy;
    worst = std::max({worst, std::abs(var - expected[k]), std::abs(ex - expected[k]),
                      std::abs(decoupled_energy(p, irreps[k]) - expected[k])});
    values += fmt("%s%s: %.10f", k ? ", " : "", irreps[k].to_string().c_str(), ex);
  }
  return {worst <= 1e-10, values + fmt(" (max err %.1e, tol 1e-10)", worst)};
}

Outcome critical() {
  const ModelParams p;
  // Two-level reduction of the symmetric irrep: levels 1 and 2 are split by
  // w1 - w2/2, and the spin-coherent minimum leaves the origin at
  // mu_c = sqrt((w1 - w2/2) Omega) / 2.
  const double oracle = std::sqrt((p.omega1 - p.omega2 / 2.0) * p.field_frequency) / 2.0;
  const auto r = critical_bisect(p, IrrepSpec(4, 0, 0), 0, 0.0);
  return {std::abs(r.critical - oracle) <= 0.005,
          fmt("mu_c = %.5f, bracket width %.1e; two-level oracle sqrt((w1-w2/2) Omega)/2 = %.5f "
              "(tol 0.005)",
              r.critical, r.upper - r.lower, oracle)};
}

Outcome fidelity_plateaus() {
  const auto g = build_generators(IrrepSpec(4, 0, 0));
  auto f_at = [&](double a, double b) {
    ModelParams p;
    p.mu12 = a;
    p.mu23 = b;
    return coherent_vs_quantum(minimize(p, g), converge_truncation(p, g, 40).ground);
  };
  const double weak = f_at(0.1, 0.1), deep = f_at(1.2, 1.2);
  const bool ok_weak = weak >= 0.99, ok_deep = deep >= 0.40 && deep <= 0.60;
  return {ok_weak && ok_deep,
          fmt("F(Coh,Q)(0.1,0.1) = %.5f (need >= 0.99: %s); F(Coh,Q)(1.2,1.2) = %.5f (need "
              "[0.40,0.60]: %s)",
              weak, ok_weak ? "ok" : "NOT MET", deep, ok_deep ? "ok" : "NOT MET")};
}

Outcome qpt_markers() {
  // Declared scan grid: step 0.025 on [0, 1.5].
  constexpr double h = 0.025;
  constexpr double delta = 1e-3;
  const auto g = build_generators(IrrepSpec(4, 0, 0));
  auto solve = [&](double a, double b) {
    ModelParams p;
    p.mu12 = a;
    p.mu23 = b;
    return converge_truncation(p, g, 40).ground;
  };
  GroundGrid line{61, 1, {}};
  for (int i = 0; i < 61; ++i)
    line.points.push_back(solve(h * i, 0.1));
  int markers = 0;
  double first = -1.0;
  for (const auto &r : neighbor_fidelity_scan(line, ScanDirection::Horizontal, delta))
    if (r.marker) {
      if (markers++ == 0)
        first = h * r.i1;
    }
  GroundGrid sub{5, 5, {}};
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i)
      sub.points.push_back(solve(h * i, h * j));
  int sub_markers = 0;
  double sub_min = 1.0;
  for (auto dir : {ScanDirection::Horizontal, ScanDirection::Vertical})
    for (const auto &r : neighbor_fidelity_scan(sub, dir, delta)) {
      sub_markers += r.marker;
      sub_min = std::min(sub_min, r.f_qq);
    }
  return {markers > 0 && sub_markers == 0,
          fmt("grid step %.3f: %d markers on mu23=0.1 (first at mu12=%.3f); %d markers on "
              "sub-grid [0,0.1]^2 (min F(Q,Q) %.5f, qpt_delta 1e-3)",
              h, markers, first, sub_markers, sub_min)};
}

Outcome truncation() {
  bool ok = true;
  std::string detail;
  for (const auto &h : irreps_for_atoms(4)) {
    const auto g = build_generators(h);
    ModelParams p;
    p.mu12 = 1.5;
    p.mu23 = 1.5;
    const auto r = converge_truncation(p, g, 20);
    bool monotone = true;
    for (std::size_t k = 1; k < r.trail.size(); ++k)
      monotone = monotone && r.trail[k].energy <= r.trail[k - 1].energy + 1e-12;
    ok = ok && r.converged && monotone && r.ground.convergence_gap < 1e-8;
    detail += fmt("%s%s: n_max %d, gap %.1e%s", detail.empty() ? "" : "; ",
                  h.to_string().c_str(), r.ground.n_max, r.ground.convergence_gap,
                  monotone ? "" : " NOT monotone");
  }
  return {ok, detail};
}

// Sweep-based criteria ------------------------------------------------------

struct SweepCriteria {
  Outcome normal_ordering;
  Outcome variational_bound;
  Outcome determinism;
};

SweepCriteria sweep_criteria(const SweepConfig &cfg, const std::set<std::string> &wanted) {
  SweepCriteria out;
  const SweepResult first = run_sweep(cfg);
  write_sweep(first);
  const std::string csv = to_csv(first);

  // Normal-cell counts in the order the irreps were given.
  std::vector<int> counts;
  std::string listing;
  for (const auto &h : cfg.irreps) {
    int n = 0;
    for (const auto &r : first.records)
      n += r.irrep == h && r.var.phase == Phase::Normal;
    counts.push_back(n);
    listing += fmt("%s%s: %d", listing.empty() ? "" : " < ", h.to_string().c_str(), n);
  }
  bool increasing = true;
  for (std::size_t k = 1; k < counts.size(); ++k)
    increasing = increasing && counts[k] > counts[k - 1];
  out.normal_ordering = {increasing, fmt("%dx%d grid, normal cells ", cfg.axis1.steps,
                                         cfg.axis2.steps) +
                                         listing};

  double worst = -std::numeric_limits<double>::infinity();
  int violations = 0, missing = 0;
  for (const auto &r : first.records) {
    if (!r.exact || r.exact->failed) {
      ++missing;
      continue;
    }
    const double excess = r.exact->energy - r.var.energy;
    worst = std::max(worst, excess);
    violations += excess > 1e-9;
  }
  out.variational_bound = {violations == 0 && missing == 0,
                           fmt("%zu points: max (E_exact - E_coh) = %.2e, %d violations of 1e-9, "
                               "%d exact failures",
                               first.records.size(), worst, violations, missing)};

  if (wanted.count("determinism")) {
    const SweepResult second = run_sweep(cfg);
    const std::string again = to_csv(second);
    out.determinism = {again == csv, fmt("two runs, seed %llu: %zu bytes each, %s",
                                         static_cast<unsigned long long>(cfg.minimizer.seed),
                                         csv.size(), again == csv ? "identical" : "DIFFERENT")};
  }
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Acceptance criteria"};
  std::string only, out_dir = "acceptance_out", config_path;
  app.add_option("--only", only, "Comma-separated subset of criteria");
  app.add_option("--out", out_dir, "Directory for the acceptance sweep CSV");
  app.add_option("--config", config_path, "Acceptance sweep configuration (JSON)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::string> order{"algebra",           "coherent_cross_check",
                                       "decoupled_limit",   "critical_coupling",
                                       "normal_ordering",   "fidelity_plateaus",
                                       "qpt_markers",       "variational_bound",
                                       "truncation",        "determinism"};
  std::set<std::string> wanted;
  {
    std::stringstream ss(only);
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty())
        wanted.insert(item);
    for (const auto &w : wanted)
      if (std::find(order.begin(), order.end(), w) == order.end()) {
        std::fprintf(stderr, "unknown criterion '%s'\n", w.c_str());
        return 2;
      }
    if (wanted.empty())
      wanted.insert(order.begin(), order.end());
  }

  SweepConfig cfg;
  try {
    if (config_path.empty()) {
      cfg.irreps = irreps_for_atoms(4);
      cfg.axis1 = cfg.axis2 = GridAxis{0.0, 1.5, 21};
    } else {
      cfg = load_sweep_config(config_path);
    }
    cfg.output_dir = out_dir;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  const std::map<std::string, std::function<Outcome()>> single{
      {"algebra", algebra},
      {"coherent_cross_check", coherent_cross_check},
      {"decoupled_limit", decoupled},
      {"critical_coupling", critical},
      {"fidelity_plateaus", fidelity_plateaus},
      {"qpt_markers", qpt_markers},
      {"truncation", truncation}};
  const std::map<std::string, double> budget{{"algebra", 10.0}, {"coherent_cross_check", 30.0},
                                             {"critical_coupling", 60.0}};

  std::map<std::string, std::pair<Outcome, double>> results;
  for (const auto &name : order) {
    if (!wanted.count(name) || !single.count(name))
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = single.at(name)();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget.count(name) && dt > budget.at(name)) {
      o.pass = false;
      o.detail += fmt(" [runtime %.1f s exceeds %.0f s]", dt, budget.at(name));
    }
    results[name] = {o, dt};
  }
  if (wanted.count("normal_ordering") || wanted.count("variational_bound") ||
      wanted.count("determinism")) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepCriteria s;
    try {
      s = sweep_criteria(cfg, wanted);
    } catch (const std::exception &e) {
      s.normal_ordering = s.variational_bound = s.determinism = {false,
                                                                 std::string("exception: ") +
                                                                     e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results["normal_ordering"] = {s.normal_ordering, dt};
    results["variational_bound"] = {s.variational_bound, dt};
    results["determinism"] = {s.determinism, dt};
  }

  int failures = 0;
  for (const auto &name : order) {
    if (!wanted.count(name))
      continue;
    const auto &[o, dt] = results.at(name);
    failures += !o.pass;
    std::printf("%s %-20s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                dt);
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
