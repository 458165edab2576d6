#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dgpr/exponents.hpp"
#include "dgpr/io.hpp"
#include "dgpr/nondeg.hpp"
#include "dgpr/pipeline.hpp"
#include "dgpr/problem.hpp"
#include "dgpr/solver.hpp"
#include "dgpr/spectral.hpp"
#include "dgpr/version.hpp"

namespace {

using dgpr::ExperimentConfig;
using json = nlohmann::json;

constexpr const char* kUsage = R"(usage: dgpr <command> [--config FILE] [--set key=value]...

commands:
  exponents   closed-form parameter ledger for (alpha, d, c); c = -1 picks c_star
  nondeg      estimate the non-degeneracy exponent of a builtin problem
  solve       run one viscous solve and dump the trajectory
  spectral    dyadic regularity analysis of a trajectory dump (input_trajectory)
  pipeline    nondeg -> exponents -> solve -> average -> spectral -> verdict

options:
  --config FILE    JSON experiment description (flat keys)
  --set key=value  override one config key; repeatable, wins over the file
  --help           this text

exit codes: 0 success (pipeline: verdict PASS), 1 error, 2 verdict FAIL
)";

json num_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_exponents(const ExperimentConfig& cfg) {
  const std::optional<double> c =
      cfg.c < 0.0 ? std::nullopt : std::optional<double>(cfg.c);
  const auto set = dgpr::proof_parameters<double>(cfg.alpha, cfg.d, c);
  print_json({{"alpha", set.alpha},
              {"d", set.d},
              {"c", set.c},
              {"q_star", set.q_star},
              {"s_star", set.s_star},
              {"theta_star", set.theta_star},
              {"c_star", set.c_star},
              {"r", set.r},
              {"epsilon", set.epsilon},
              {"eta", set.eta},
              {"omega", set.omega},
              {"gamma", set.gamma}});
  return 0;
}

int cmd_nondeg(const ExperimentConfig& cfg) {
  const auto spec = dgpr::problem_from_config(cfg);
  const auto rep = dgpr::estimate_alpha(spec, dgpr::nondeg_options_from_config(cfg));
  print_json({{"problem", spec.name},
              {"alpha_hat", num_or_null(rep.alpha_hat)},
              {"elliptic", rep.elliptic},
              {"r_squared", rep.r_squared},
              {"delta", rep.delta},
              {"sup_measure", rep.sup_measure},
              {"n_zero_measures", rep.n_zero_measures},
              {"n_sphere", rep.n_sphere},
              {"n_lambda", rep.n_lambda},
              {"lambda_cell", rep.lambda_cell},
              {"seed", rep.seed}});
  return 0;
}

int cmd_solve(const ExperimentConfig& cfg) {
  const auto spec = dgpr::problem_from_config(cfg);
  const auto grid = dgpr::grid_from_config(cfg, spec.d_x);
  const auto u0 = dgpr::initial_from_config(cfg, grid, spec);
  const auto traj = dgpr::solve(spec, grid, u0, dgpr::solve_options_from_config(cfg));

  std::filesystem::create_directories(cfg.output_dir);
  const auto dump = std::filesystem::path(cfg.output_dir) / "trajectory.dgpr";
  dgpr::write_trajectory(dump.string(), traj);

  const auto first = traj.frame_field(0);
  const auto last = traj.frame_field(traj.frames.size() - 1);
  print_json({{"problem", spec.name},
              {"epsilon", traj.epsilon},
              {"steps", traj.steps_taken},
              {"dt", traj.dt},
              {"t_end", traj.times.back()},
              {"mass_initial", dgpr::mass(first)},
              {"mass_final", dgpr::mass(last)},
              {"u_min", last.values.minCoeff()},
              {"u_max", last.values.maxCoeff()},
              {"trajectory", dump.string()}});
  return 0;
}

int cmd_spectral(const ExperimentConfig& cfg) {
  if (cfg.input_trajectory.empty())
    throw dgpr::config_error("spectral needs input_trajectory (a .dgpr dump path)");
  const auto traj = dgpr::read_trajectory(cfg.input_trajectory);
  dgpr::Field field = traj.frame_field(traj.frames.size() - 1);
  if (cfg.window == "raised_cosine")
    field = dgpr::apply_raised_cosine_window(field);
  else if (cfg.window != "none")
    throw dgpr::config_error("unknown window '" + cfg.window + "' (known: raised_cosine, none)");

  const int j_max = cfg.j_max > 0 ? cfg.j_max : dgpr::max_feasible_j(traj.grid);
  const auto spectrum =
      dgpr::block_norms(field, dgpr::build_partition(traj.grid.d_x, j_max), cfg.q);
  const auto est = dgpr::sobolev_estimate(spectrum);

  std::filesystem::create_directories(cfg.output_dir);
  const auto csv = std::filesystem::path(cfg.output_dir) / "spectrum_log2norm_vs_K.csv";
  dgpr::write_spectrum_csv(csv.string(), spectrum);

  std::vector<double> norms(spectrum.norms.data(), spectrum.norms.data() + spectrum.norms.size());
  print_json({{"input", cfg.input_trajectory},
              {"time", traj.times.back()},
              {"window", cfg.window},
              {"j_max", j_max},
              {"blocks", spectrum.blocks},
              {"norms", norms},
              {"q", spectrum.q},
              {"s_hat", num_or_null(est.s_hat)},
              {"summability", num_or_null(est.summability)},
              {"super_algebraic", est.super_algebraic},
              {"informative", est.informative},
              {"r_squared", spectrum.r_squared},
              {"spectrum_csv", csv.string()}});
  return 0;
}

int cmd_pipeline(const ExperimentConfig& cfg) {
  const auto rep = dgpr::run_pipeline(cfg);
  dgpr::write_report_bundle(rep);
  const auto report_path = std::filesystem::path(cfg.output_dir) / "report.json";

  if (rep.status != "ok") {
    std::cerr << "error: stage '" << rep.failed_stage << "' failed: " << rep.error << "\n";
    std::cerr << "partial report: " << report_path.string() << "\n";
    return 1;
  }
  std::printf("alpha_hat = %s\n",
              rep.elliptic ? "inf (elliptic)" : std::to_string(rep.nondeg.alpha_hat).c_str());
  std::printf("s_star    = %.6g%s\n", rep.s_star, rep.elliptic ? " (large-alpha limit)" : "");
  if (std::isfinite(rep.s_hat))
    std::printf("s_hat     = %.6g\n", rep.s_hat);
  else
    std::printf("s_hat     = inf (super-algebraic decay)\n");
  if (std::isfinite(rep.margin)) std::printf("margin    = %.6g\n", rep.margin);
  std::printf("report    = %s\n", report_path.string().c_str());
  std::printf("verdict: %s\n", rep.pass ? "PASS" : "FAIL");
  return rep.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return 1;
  }
  const std::string command = argv[1];
  if (command == "--help" || command == "-h" || command == "help") {
    std::cout << kUsage;
    return 0;
  }
  if (command == "--version" || command == "version") {
    std::cout << "dgpr " << dgpr::version_string << "\n";
    return 0;
  }

  try {
    std::optional<std::string> config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    for (int i = 2; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config") {
        if (i + 1 >= argc) throw dgpr::config_error("--config needs a file path");
        if (config_path) throw dgpr::config_error("--config given twice");
        config_path = argv[++i];
      } else if (arg == "--set") {
        if (i + 1 >= argc) throw dgpr::config_error("--set needs key=value");
        const std::string kv = argv[++i];
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
          throw dgpr::config_error("--set expects key=value, got '" + kv + "'");
        overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
      } else if (arg == "--help" || arg == "-h") {
        std::cout << kUsage;
        return 0;
      } else {
        throw dgpr::config_error("unknown option '" + arg + "'");
      }
    }

    ExperimentConfig cfg;
    if (config_path) cfg = dgpr::load_config_file(*config_path);
    for (const auto& [key, value] : overrides) dgpr::apply_override(cfg, key, value);

    if (command == "exponents") return cmd_exponents(cfg);
    if (command == "nondeg") return cmd_nondeg(cfg);
    if (command == "solve") return cmd_solve(cfg);
    if (command == "spectral") return cmd_spectral(cfg);
    if (command == "pipeline") return cmd_pipeline(cfg);
    throw dgpr::config_error("unknown command '" + command +
                             "' (known: exponents, nondeg, solve, spectral, pipeline)");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
