// su3qpt: command-line driver for coupling-plane sweeps, phase-boundary
// bisection and small inspection dumps.
//
//   su3qpt sweep --config <file> [--irrep h1,h2,h3] [--configuration xi|lambda|v]
//                [--out <dir>] [--threads k] [--seed s]
//   su3qpt bisect --axis mu12|mu13|mu23 --fixed <v> [--config <file>] [--irrep h]
//                 [--configuration c] [--lo a] [--hi b]
//   su3qpt generators --irrep h1,h2,h3
//   su3qpt coherent --irrep h1,h2,h3 --gamma g1,g2,g3 [--method exp|gt]
//
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include "su3qpt/sweep.hpp"

using namespace su3qpt;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::vector<double> parse_triple(const std::string &s, const char *what) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size())
        throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw InvalidInput(std::string(what) + " must be three comma-separated numbers");
    }
  }
  if (out.size() != 3)
    throw InvalidInput(std::string(what) + " must be three comma-separated numbers");
  return out;
}

SweepConfig config_from(const std::string &path) {
  return path.empty() ? parse_sweep_config(nlohmann::json::object()) : load_sweep_config(path);
}

// Applies command-line overrides; the result is re-validated.
void apply_overrides(SweepConfig &c, const std::string &irrep, const std::string &configuration) {
  if (!irrep.empty()) {
    c.irreps = {IrrepSpec::parse(irrep)};
    c.model.atoms = c.irreps.front().atoms();
  }
  if (!configuration.empty())
    c.model.config = parse_configuration(configuration);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Super-radiant phase diagrams of three-level atoms in a cavity"};
  app.require_subcommand(1);

  std::string config_path, irrep, configuration, out_dir, axis = "mu12", method = "exp",
                                                          gamma;
  int threads = 0;
  std::uint64_t seed = 0;
  double fixed = 0.0, lo = 0.0, hi = 1.5;

  auto *sweep = app.add_subcommand("sweep", "Grid sweep; writes <out>/<name>.csv and .meta.json");
  sweep->add_option("--config", config_path, "JSON sweep configuration")->required();
  sweep->add_option("--irrep", irrep, "Restrict to one irrep h1,h2,h3");
  sweep->add_option("--configuration", configuration, "xi | lambda | v");
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--threads", threads, "Worker threads");
  sweep->add_option("--seed", seed, "Minimizer seed");

  auto *bisect = app.add_subcommand("bisect", "Locate the variational phase boundary on an axis");
  bisect->add_option("--axis", axis, "Coupling varied: mu12, mu13 or mu23")->required();
  bisect->add_option("--fixed", fixed, "Value of the other plane coupling")->required();
  bisect->add_option("--config", config_path, "JSON configuration for model and minimizer");
  bisect->add_option("--irrep", irrep, "Irrep h1,h2,h3 (default: first of the config)");
  bisect->add_option("--configuration", configuration, "xi | lambda | v");
  bisect->add_option("--lo", lo, "Bracket start");
  bisect->add_option("--hi", hi, "Bracket end");

  auto *gens = app.add_subcommand("generators", "Dump the generator matrices of an irrep as JSON");
  gens->add_option("--irrep", irrep, "Irrep h1,h2,h3")->required();

  auto *coh = app.add_subcommand("coherent", "Dump SU(3) coherent-state amplitudes as JSON");
  coh->add_option("--irrep", irrep, "Irrep h1,h2,h3")->required();
  coh->add_option("--gamma", gamma, "Real gamma1,gamma2,gamma3")->required();
  coh->add_option("--method", method, "exp (exponential series) or gt (closed form)")
      ->check(CLI::IsMember({"exp", "gt"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  SweepConfig cfg;
  try {
    if (*sweep || *bisect) {
      cfg = config_from(config_path);
      apply_overrides(cfg, irrep, configuration);
      if (!out_dir.empty())
        cfg.output_dir = out_dir;
      if (threads != 0)
        cfg.threads = threads;
      if (sweep->count("--seed") > 0)
        cfg.minimizer.seed = seed;
      cfg.validate();
    }
  } catch (const InvalidInput &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*sweep) {
      prepare_output(cfg);
      const SweepResult res = run_sweep(cfg);
      const auto csv = write_sweep(res);
      std::cout << "wrote " << res.records.size() << " records to " << csv.string() << " in "
                << res.wall_seconds << " s\n";
      return 0;
    }
    if (*bisect) {
      const auto names = axis_names(cfg.model.config);
      int index = -1;
      for (int k = 0; k < 2; ++k)
        if (names[static_cast<std::size_t>(k)] == axis)
          index = k;
      if (index < 0) {
        std::cerr << "config error: axis " << axis << " is not a plane coupling of the "
                  << to_string(cfg.model.config) << " configuration (" << names[0] << ", "
                  << names[1] << ")\n";
        return kExitConfig;
      }
      BisectResult r;
      try {
        r = critical_bisect(cfg.model, cfg.irreps.front(), index, fixed, cfg.minimizer, lo, hi);
      } catch (const InvalidInput &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
      }
      nlohmann::json j{{"irrep", cfg.irreps.front().to_string()},
                       {"configuration", std::string(to_string(cfg.model.config))},
                       {"axis", axis},
                       {"fixed", fixed},
                       {"critical", r.critical},
                       {"normal_side", r.lower},
                       {"superradiant_side", r.upper},
                       {"iterations", r.iterations}};
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (*gens) {
      std::cout << to_json(build_generators(IrrepSpec::parse(irrep))).dump(2) << '\n';
      return 0;
    }
    if (*coh) {
      const auto g = build_generators(IrrepSpec::parse(irrep));
      const auto v = parse_triple(gamma, "--gamma");
      const Gammas gm{v[0], v[1], v[2]};
      if (method == "gt")
        std::cout << to_json(su3_coherent_gt(gm, g)).dump(2) << '\n';
      else
        std::cout << to_json(su3_coherent_exp(gm, g)).dump(2) << '\n';
      return 0;
    }
  } catch (const InvalidInput &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
