#pragma once

// Coupling-plane sweeps: variational and exact ground states on a regular
// grid, neighbour fidelities, CSV output with a JSON metadata sidecar, and
// bisection of the variational phase boundary along one axis.
//
// The plane coordinates are the two couplings allowed by the configuration
// (Xi: mu12, mu23; Lambda: mu13, mu23; V: mu12, mu13). The CSV keeps the fixed
// column names mu12, mu23 for the first and second plane coordinate; the
// sidecar names the actual couplings under "axes".

#include "json.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "su3qpt/fidelity.hpp"

namespace su3qpt {

inline constexpr const char *kVersion = "1.0.0";

struct GridAxis {
  double min = 0.0;
  double max = 1.5;
  int steps = 41;

  double at(int i) const {
    return steps == 1 ? min : min + (max - min) * static_cast<double>(i) / (steps - 1);
  }
};

struct NMaxPolicy {
  int start = 40;
  int step = 20;
  int max = 600;
  double conv_tol = 1e-8;
};

struct SweepConfig {
  ModelParams model; ///< frequencies and configuration; couplings are set per point
  std::vector<IrrepSpec> irreps;
  GridAxis axis1;
  GridAxis axis2;
  NMaxPolicy n_max;
  MinimizeOptions minimizer;
  double qpt_delta = 1e-3;
  bool exact = true;
  std::string output_dir = "out";
  std::string output_name = "sweep";
  int threads = 1;

  void validate() const {
    if (irreps.empty())
      throw InvalidInput("sweep needs at least one irrep");
    for (const auto &h : irreps)
      if (h.atoms() != irreps.front().atoms())
        throw InvalidInput("all irreps of a sweep must share the atom count");
    for (const GridAxis *a : {&axis1, &axis2}) {
      if (a->steps < 2)
        throw InvalidInput("grid steps must be >= 2");
      if (a->min < 0.0 || a->max < a->min)
        throw InvalidInput("grid range must satisfy 0 <= min <= max");
    }
    if (n_max.start < 0 || n_max.step <= 0 || n_max.max < n_max.start || n_max.conv_tol <= 0.0)
      throw InvalidInput("n_max policy needs start >= 0, step > 0, max >= start, conv_tol > 0");
    if (minimizer.n_starts < 0 || minimizer.max_evaluations <= 0)
      throw InvalidInput("minimizer needs n_starts >= 0 and max_evaluations > 0");
    if (!(qpt_delta > 0.0 && qpt_delta < 1.0))
      throw InvalidInput("qpt_delta must lie in (0, 1)");
    if (threads < 1)
      throw InvalidInput("threads must be >= 1");
    if (output_name.empty())
      throw InvalidInput("output name must be non-empty");
    model.validate();
  }
};

/// Names of the two plane couplings, e.g. {"mu12", "mu23"}.
inline std::array<std::string, 2> axis_names(Configuration c) {
  const auto ax = allowed_couplings(c);
  std::array<std::string, 2> out;
  for (int k = 0; k < 2; ++k)
    out[static_cast<std::size_t>(k)] = "mu" + std::to_string(ax[static_cast<std::size_t>(k)][0]) +
                                       std::to_string(ax[static_cast<std::size_t>(k)][1]);
  return out;
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json &j, std::initializer_list<const char *> known,
                           const std::string &where) {
  if (!j.is_object())
    throw InvalidInput(where + " must be a JSON object");
  for (const auto &item : j.items()) {
    bool ok = false;
    for (const char *k : known)
      ok = ok || item.key() == k;
    if (!ok)
      throw InvalidInput("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T> T get_or(const json &j, const char *key, T fallback) {
  if (!j.contains(key))
    return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw InvalidInput(std::string("bad value for '") + key + "': " + e.what());
  }
}

inline GridAxis parse_axis(const json &j, const std::string &where) {
  reject_unknown(j, {"min", "max", "steps"}, where);
  GridAxis a;
  a.min = get_or(j, "min", a.min);
  a.max = get_or(j, "max", a.max);
  a.steps = get_or(j, "steps", a.steps);
  return a;
}

} // namespace detail

/// Builds a SweepConfig from JSON. Keys (all optional):
///   model: {levels: [w1,w2,w3]} or {omega1, omega2}; Omega; configuration
///   irreps: ["4,0,0", ...] or atoms: N (every irrep of N atoms)
///   grid: {min, max, steps} for both axes, or {first: {...}, second: {...}}
///   n_max: {start, step, max, conv_tol}
///   minimizer: {n_starts, seed, mode: real|complex, ftol, n_tol, e_tol, max_evaluations}
///   qpt_delta, exact, output: {dir, name}, threads, seed
inline SweepConfig parse_sweep_config(const nlohmann::json &j) {
  using detail::get_or;
  detail::reject_unknown(j,
                         {"model", "irreps", "atoms", "grid", "n_max", "minimizer", "qpt_delta",
                          "exact", "output", "threads", "seed"},
                         "sweep config");
  SweepConfig c;
  if (j.contains("model")) {
    const auto &m = j.at("model");
    detail::reject_unknown(m, {"levels", "omega1", "omega2", "Omega", "configuration"}, "model");
    if (m.contains("levels") && (m.contains("omega1") || m.contains("omega2")))
      throw InvalidInput("give either model.levels or model.omega1/omega2, not both");
    if (m.contains("levels")) {
      const auto lv = get_or(m, "levels", std::vector<double>{});
      if (lv.size() != 3)
        throw InvalidInput("model.levels must hold three energies");
      const Gaps g = derive_gaps(lv[0], lv[1], lv[2]);
      c.model.omega1 = g.omega1;
      c.model.omega2 = g.omega2;
    } else {
      c.model.omega1 = get_or(m, "omega1", c.model.omega1);
      c.model.omega2 = get_or(m, "omega2", c.model.omega2);
    }
    c.model.field_frequency = get_or(m, "Omega", c.model.field_frequency);
    if (m.contains("configuration"))
      c.model.config = parse_configuration(get_or(m, "configuration", std::string{}));
  }
  if (j.contains("irreps") && j.contains("atoms"))
    throw InvalidInput("give either irreps or atoms, not both");
  if (j.contains("irreps")) {
    for (const auto &s : get_or(j, "irreps", std::vector<std::string>{}))
      c.irreps.push_back(IrrepSpec::parse(s));
  } else {
    c.irreps = irreps_for_atoms(get_or(j, "atoms", 4));
  }
  if (!c.irreps.empty())
    c.model.atoms = c.irreps.front().atoms();
  if (j.contains("grid")) {
    const auto &g = j.at("grid");
    if (g.contains("first") || g.contains("second")) {
      detail::reject_unknown(g, {"first", "second"}, "grid");
      if (g.contains("first"))
        c.axis1 = detail::parse_axis(g.at("first"), "grid.first");
      if (g.contains("second"))
        c.axis2 = detail::parse_axis(g.at("second"), "grid.second");
    } else {
      c.axis1 = c.axis2 = detail::parse_axis(g, "grid");
    }
  }
  if (j.contains("n_max")) {
    const auto &n = j.at("n_max");
    detail::reject_unknown(n, {"start", "step", "max", "conv_tol"}, "n_max");
    c.n_max.start = get_or(n, "start", c.n_max.start);
    c.n_max.step = get_or(n, "step", c.n_max.step);
    c.n_max.max = get_or(n, "max", c.n_max.max);
    c.n_max.conv_tol = get_or(n, "conv_tol", c.n_max.conv_tol);
  }
  if (j.contains("minimizer")) {
    const auto &m = j.at("minimizer");
    detail::reject_unknown(
        m, {"n_starts", "seed", "mode", "ftol", "n_tol", "e_tol", "max_evaluations"}, "minimizer");
    auto &o = c.minimizer;
    o.n_starts = get_or(m, "n_starts", o.n_starts);
    o.seed = get_or(m, "seed", o.seed);
    const auto mode = get_or(m, "mode", std::string("real"));
    if (mode == "real")
      o.mode = ParameterMode::Real;
    else if (mode == "complex")
      o.mode = ParameterMode::Complex;
    else
      throw InvalidInput("minimizer.mode must be real or complex");
    o.ftol = get_or(m, "ftol", o.ftol);
    o.n_tol = get_or(m, "n_tol", o.n_tol);
    o.e_tol = get_or(m, "e_tol", o.e_tol);
    o.max_evaluations = get_or(m, "max_evaluations", o.max_evaluations);
  }
  c.minimizer.seed = get_or(j, "seed", c.minimizer.seed);
  c.qpt_delta = get_or(j, "qpt_delta", c.qpt_delta);
  c.exact = get_or(j, "exact", c.exact);
  if (j.contains("output")) {
    const auto &o = j.at("output");
    detail::reject_unknown(o, {"dir", "name"}, "output");
    c.output_dir = get_or(o, "dir", c.output_dir);
    c.output_name = get_or(o, "name", c.output_name);
  }
  c.threads = get_or(j, "threads", c.threads);
  c.validate();
  return c;
}

inline SweepConfig load_sweep_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw InvalidInput("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw InvalidInput("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_sweep_config(j);
}

/// Everything computed at one grid point of one irrep.
struct SweepRecord {
  int i1 = 0;
  int i2 = 0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  IrrepSpec irrep{1, 0, 0};
  VariationalResult var;
  std::optional<GroundSolution> exact; ///< vector dropped after the fidelity pass
  bool truncation_converged = true;
  std::optional<double> f_coh_q;
  std::optional<double> f_qq_h;
  std::optional<double> f_qq_v;
  std::optional<bool> qpt_h;
  std::optional<bool> qpt_v;
  bool unreliable_h = false;
  bool unreliable_v = false;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRecord> records; ///< irrep-major, then i2, then i1
  double wall_seconds = 0.0;
};

namespace detail {

// One row of one irrep: warm-started minimizations along axis 1 and exact
// solves whose starting truncation follows the previous point's.
inline void sweep_row(const SweepConfig &cfg, const GeneratorSet &gens, int i2,
                      std::vector<SweepRecord> &out) {
  std::optional<CoherentParams> warm;
  int n_start = cfg.n_max.start;
  TruncationOptions topts{cfg.n_max.step, cfg.n_max.conv_tol, cfg.n_max.max};
  for (int i1 = 0; i1 < cfg.axis1.steps; ++i1) {
    SweepRecord &rec = out[static_cast<std::size_t>(i2 * cfg.axis1.steps + i1)];
    rec.i1 = i1;
    rec.i2 = i2;
    rec.mu1 = cfg.axis1.at(i1);
    rec.mu2 = cfg.axis2.at(i2);
    rec.irrep = gens.irrep;
    ModelParams p = cfg.model;
    p.set_plane_point(rec.mu1, rec.mu2);
    rec.var = minimize(p, gens, cfg.minimizer, warm);
    if (std::isfinite(rec.var.energy))
      warm = rec.var.params_min;
    if (!cfg.exact)
      continue;
    TruncationResult t = converge_truncation(p, gens, n_start, topts);
    rec.truncation_converged = t.converged;
    if (!t.ground.failed) {
      n_start = std::max(cfg.n_max.start, t.ground.n_max - cfg.n_max.step);
      if (std::isfinite(rec.var.energy) && rec.var.atomic_state.size() > 0) {
        try {
          rec.f_coh_q = coherent_vs_quantum(rec.var, t.ground);
        } catch (const TruncationError &) {
          // coherent field does not fit the converged truncation; left empty
        }
      }
    }
    rec.exact = std::move(t.ground);
  }
}

inline void fidelity_pass(const SweepConfig &cfg, std::vector<SweepRecord> &recs) {
  GroundGrid grid{cfg.axis1.steps, cfg.axis2.steps, {}};
  grid.points.reserve(recs.size());
  for (auto &r : recs) {
    GroundSolution g = r.exact ? std::move(*r.exact) : GroundSolution{};
    if (!r.exact)
      g.failed = true;
    grid.points.push_back(std::move(g));
  }
  for (auto dir : {ScanDirection::Horizontal, ScanDirection::Vertical})
    for (const FidelityRecord &f : neighbor_fidelity_scan(grid, dir, cfg.qpt_delta)) {
      SweepRecord &r = recs[static_cast<std::size_t>(f.i2 * cfg.axis1.steps + f.i1)];
      if (std::isnan(f.f_qq))
        continue;
      if (dir == ScanDirection::Horizontal) {
        r.f_qq_h = f.f_qq;
        r.qpt_h = f.marker;
        r.unreliable_h = !f.reliable;
      } else {
        r.f_qq_v = f.f_qq;
        r.qpt_v = f.marker;
        r.unreliable_v = !f.reliable;
      }
    }
  // Keep scalar results only; the vectors are no longer needed.
  for (std::size_t k = 0; k < recs.size(); ++k) {
    if (!recs[k].exact)
      continue;
    GroundSolution &g = grid.points[k];
    g.vector.resize(0);
    recs[k].exact = std::move(g);
  }
}

} // namespace detail

/// Runs the full sweep in memory. Rows are distributed over cfg.threads
/// workers; every row is computed independently, so the records do not
/// depend on the thread count.
inline SweepResult run_sweep(const SweepConfig &cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SweepResult res{cfg, {}, 0.0};
  for (const auto &h : cfg.irreps) {
    const GeneratorSet gens = build_generators(h);
    std::vector<SweepRecord> recs(static_cast<std::size_t>(cfg.axis1.steps * cfg.axis2.steps));
    std::atomic<int> next_row{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
      for (int i2 = next_row++; i2 < cfg.axis2.steps; i2 = next_row++) {
        try {
          detail::sweep_row(cfg, gens, i2, recs);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error)
            error = std::current_exception();
          next_row = cfg.axis2.steps;
        }
      }
    };
    const int n_threads = std::min(cfg.threads, cfg.axis2.steps);
    if (n_threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < n_threads; ++t)
        pool.emplace_back(worker);
      for (auto &t : pool)
        t.join();
    }
    if (error)
      std::rethrow_exception(error);
    if (cfg.exact)
      detail::fidelity_pass(cfg, recs);
    for (auto &r : recs)
      res.records.push_back(std::move(r));
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline const char *kCsvHeader = "mu12,mu23,irrep,config,var_energy,var_nphot,var_jz1,var_jz2,phase,"
                                "exact_energy,n_max,f_coh_q,f_qq_h,f_qq_v,qpt_h,qpt_v,spread";

namespace detail {

inline std::string fmt(double v) {
  if (std::isnan(v))
    return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v); // no "-0"
  return buf;
}

inline std::string fmt(const std::optional<double> &v) { return v ? fmt(*v) : std::string(); }
inline std::string fmt(const std::optional<bool> &v) {
  return v ? std::string(*v ? "1" : "0") : std::string();
}

} // namespace detail

/// CSV text for a sweep; the byte stream depends only on the records.
inline std::string to_csv(const SweepResult &res) {
  using detail::fmt;
  std::ostringstream os;
  os << kCsvHeader << '\n';
  const std::string config(to_string(res.config.model.config));
  for (const auto &r : res.records) {
    const bool has_exact = r.exact && !r.exact->failed;
    os << fmt(r.mu1) << ',' << fmt(r.mu2) << ",\"" << r.irrep.to_string() << "\"," << config << ','
       << fmt(r.var.energy) << ',' << fmt(r.var.photon_number) << ',' << fmt(r.var.jz1) << ','
       << fmt(r.var.jz2) << ',' << to_string(r.var.phase) << ','
       << (has_exact ? fmt(r.exact->energy) : "") << ','
       << (has_exact ? std::to_string(r.exact->n_max) : "") << ',' << fmt(r.f_coh_q) << ','
       << fmt(r.f_qq_h) << ',' << fmt(r.f_qq_v) << ',' << fmt(r.qpt_h) << ',' << fmt(r.qpt_v)
       << ',' << fmt(r.var.spread) << '\n';
  }
  return os.str();
}

inline nlohmann::json metadata(const SweepResult &res) {
  using nlohmann::json;
  const SweepConfig &c = res.config;
  const auto names = axis_names(c.model.config);
  json m;
  m["version"] = kVersion;
  m["seed"] = c.minimizer.seed;
  m["wall_seconds"] = res.wall_seconds;
  m["threads"] = c.threads;
  m["model"] = {{"omega1", c.model.omega1},
                {"omega2", c.model.omega2},
                {"Omega", c.model.field_frequency},
                {"atoms", c.model.atoms},
                {"configuration", std::string(to_string(c.model.config))}};
  m["axes"] = {{"mu12", names[0]}, {"mu23", names[1]}};
  m["grid"] = {{"first", {{"min", c.axis1.min}, {"max", c.axis1.max}, {"steps", c.axis1.steps}}},
               {"second", {{"min", c.axis2.min}, {"max", c.axis2.max}, {"steps", c.axis2.steps}}}};
  json irreps = json::array();
  for (const auto &h : c.irreps)
    irreps.push_back(h.to_string());
  m["irreps"] = irreps;
  m["tolerances"] = {{"simplex_ftol", c.minimizer.ftol},
                     {"n_tol", c.minimizer.n_tol},
                     {"e_tol", c.minimizer.e_tol},
                     {"max_evaluations", c.minimizer.max_evaluations},
                     {"n_starts", c.minimizer.n_starts},
                     {"mode", c.minimizer.mode == ParameterMode::Real ? "real" : "complex"},
                     {"qpt_delta", c.qpt_delta},
                     {"truncation_conv_tol", c.n_max.conv_tol},
                     {"degeneracy_tol", SolverOptions{}.degeneracy_tol}};
  m["n_max_policy"] = {{"start", c.n_max.start}, {"step", c.n_max.step}, {"max", c.n_max.max}};
  m["exact"] = c.exact;

  json degenerate = json::array(), unconverged = json::array(), failed = json::array(),
       unreliable = json::array(), minimizer_flags = json::array();
  json normal_cells = json::object();
  auto where = [](const SweepRecord &r) {
    return json{{"irrep", r.irrep.to_string()}, {"mu12", r.mu1}, {"mu23", r.mu2}};
  };
  for (const auto &r : res.records) {
    auto &count = normal_cells[r.irrep.to_string()];
    if (count.is_null())
      count = 0;
    if (r.var.phase == Phase::Normal)
      count = count.get<int>() + 1;
    if (!r.var.converged)
      minimizer_flags.push_back(where(r));
    if (!c.exact)
      continue;
    if (!r.exact || r.exact->failed) {
      json w = where(r);
      w["message"] = r.exact ? r.exact->message : "";
      failed.push_back(w);
      continue;
    }
    if (r.exact->degenerate)
      degenerate.push_back(where(r));
    if (!r.truncation_converged)
      unconverged.push_back(where(r));
    if (r.unreliable_h || r.unreliable_v)
      unreliable.push_back(where(r));
  }
  m["normal_cells"] = normal_cells;
  m["degenerate_points"] = degenerate;
  m["unreliable_fidelity_points"] = unreliable;
  m["truncation_unconverged_points"] = unconverged;
  m["exact_failed_points"] = failed;
  m["minimizer_unconverged_points"] = minimizer_flags;
  m["records"] = res.records.size();
  return m;
}

class OutputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Checks the output location before any work is done.
inline void prepare_output(const SweepConfig &c) {
  std::error_code ec;
  std::filesystem::create_directories(c.output_dir, ec);
  if (ec)
    throw OutputError("cannot create output directory " + c.output_dir + ": " + ec.message());
  const auto probe = std::filesystem::path(c.output_dir) / (c.output_name + ".csv");
  std::ofstream out(probe, std::ios::app);
  if (!out)
    throw OutputError("cannot write " + probe.string());
}

/// Writes <dir>/<name>.csv and <dir>/<name>.meta.json; returns the CSV path.
inline std::filesystem::path write_sweep(const SweepResult &res) {
  prepare_output(res.config);
  const auto dir = std::filesystem::path(res.config.output_dir);
  const auto csv = dir / (res.config.output_name + ".csv");
  const auto meta = dir / (res.config.output_name + ".meta.json");
  {
    std::ofstream out(csv, std::ios::binary | std::ios::trunc);
    out << to_csv(res);
    if (!out)
      throw OutputError("failed writing " + csv.string());
  }
  {
    std::ofstream out(meta, std::ios::trunc);
    out << metadata(res).dump(2) << '\n';
    if (!out)
      throw OutputError("failed writing " + meta.string());
  }
  return csv;
}

struct BisectResult {
  double critical = 0.0;
  double lower = 0.0; ///< bracket end on the normal side
  double upper = 0.0; ///< bracket end on the super-radiant side
  int iterations = 0;
};

/// Bisects the variational phase label along plane axis 0 or 1 with the
/// other coordinate held at `fixed`, down to a bracket of width `width`.
/// The phases at lo and hi must differ.
inline BisectResult critical_bisect(const ModelParams &model, const IrrepSpec &irrep, int axis,
                                    double fixed, const MinimizeOptions &opts = {},
                                    double lo = 0.0, double hi = 1.5, double width = 1e-4) {
  if (axis != 0 && axis != 1)
    throw InvalidInput("bisection axis must be 0 or 1");
  if (!(hi > lo) || !(width > 0.0))
    throw InvalidInput("bisection needs lo < hi and width > 0");
  const GeneratorSet gens = build_generators(irrep);
  ModelParams p = model;
  p.atoms = irrep.atoms();
  auto phase_at = [&](double mu) {
    if (axis == 0)
      p.set_plane_point(mu, fixed);
    else
      p.set_plane_point(fixed, mu);
    return minimize(p, gens, opts).phase;
  };
  const Phase at_lo = phase_at(lo), at_hi = phase_at(hi);
  if (at_lo == at_hi)
    throw InvalidInput("bisection bracket has the same phase (" + std::string(to_string(at_lo)) +
                       ") at both ends");
  BisectResult r;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    (phase_at(mid) == at_lo ? lo : hi) = mid;
    ++r.iterations;
  }
  r.critical = 0.5 * (lo + hi);
  r.lower = at_lo == Phase::Normal ? lo : hi;
  r.upper = at_lo == Phase::Normal ? hi : lo;
  return r;
}

} // namespace su3qpt
