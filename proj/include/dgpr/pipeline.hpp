#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dgpr/exponents.hpp"
#include "dgpr/grid.hpp"
#include "dgpr/nondeg.hpp"
#include "dgpr/problem.hpp"
#include "dgpr/solver.hpp"
#include "dgpr/spectral.hpp"

namespace dgpr {

/// Flat experiment description. Every key can come from a JSON config file
/// or a key=value override; unknown keys are rejected by name. param_*
/// keys are forwarded to the builtin problem library.
struct ExperimentConfig {
  int version = 1;
  std::string problem = "tt_example";
  std::map<std::string, double> problem_params;

  int cells_x = 128, cells_y = 128;
  double box_lo_x = -1.0, box_hi_x = 1.0;
  double box_lo_y = -1.0, box_hi_y = 1.0;
  double safety = 0.4;

  double t_end = 0.5;
  std::vector<double> save_times;                     // empty means {t_end}
  double epsilon = 0.0;                               // single-run solve
  std::vector<double> viscosities = {0.04, 0.02, 0.01};

  int n_lambda = 2000;
  std::string rho = "indicator";

  double delta_min = 1e-4, delta_max = 1e-1;
  int n_delta = 12, n_sphere = 4096, n_lambda_measure = 100000;

  int j_max = -1;  // -1: widest partition the grid supports
  double q = 2.0;
  std::string window = "raised_cosine";  // or "none"

  std::string output_dir = "out";
  long long seed = -1;  // required wherever sampling happens
  std::string input_trajectory;

  // exponents command inputs; c = -1 selects c_star
  double alpha = 1.0;
  int d = 2;
  double c = -1.0;

  // initial datum; "default" keeps the problem's own profile
  std::string initial_profile = "default";
  double initial_value = 0.0;
  double initial_left = 1.0, initial_right = 0.0, initial_jump = 0.0;
  double initial_center_x = 0.0, initial_center_y = 0.0;
  double initial_width = 1.0, initial_amplitude = 1.0, initial_baseline = 0.0;
  double initial_t0 = 0.25, initial_mass = 1.0;
};

/// Parse a JSON object into a config; missing keys keep their defaults,
/// unknown keys raise config_error naming the key.
ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

/// Apply one key=value override (the --set grammar). Lists are
/// comma-separated; an empty value clears a list.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Deterministic JSON rendering (sorted keys, round-trip doubles).
std::string config_to_json_text(const ExperimentConfig& cfg);

// Construction helpers shared by the commands.
ProblemSpec problem_from_config(const ExperimentConfig& cfg);
Grid grid_from_config(const ExperimentConfig& cfg, int d_x);
Field initial_from_config(const ExperimentConfig& cfg, const Grid& grid,
                          const ProblemSpec& spec);
NondegOptions nondeg_options_from_config(const ExperimentConfig& cfg);
SolveOptions solve_options_from_config(const ExperimentConfig& cfg);

struct RunMeta {
  double epsilon = 0.0;
  long steps = 0;
  double dt = 0.0;
  double mass_initial = 0.0, mass_final = 0.0;
  double u_min = 0.0, u_max = 0.0;
  double entropy_drift = 0.0;  // max increase of any Kruzkov functional; <= roundoff
};

/// Everything one experiment produced. On a stage failure the report keeps
/// the stages that completed; status is "failed:<stage>" and error holds
/// the message.
struct PipelineReport {
  ExperimentConfig config;
  std::string status = "ok";
  std::string failed_stage;
  std::string error;
  std::string generator_version;
  std::string timestamp;  // UTC, the only line excluded from determinism

  bool have_nondeg = false;
  NondegReport nondeg;

  bool have_exponents = false;
  bool elliptic = false;  // symbol never vanished: alpha_hat is +inf
  ExponentSet<double> exponents;

  bool have_runs = false;
  std::vector<RunMeta> runs;
  bool have_compactness = false;
  CompactnessReport compactness;
  bool have_dissipation = false;
  std::vector<double> dissipation_final;  // per-axis ‖B_k‖ at the final time

  bool have_average = false;
  double average_l1 = 0.0, average_l2 = 0.0;

  bool have_spectrum = false;
  int j_max_used = 0;
  DyadicSpectrum spectrum;
  SobolevEstimate estimate;

  bool verdict_present = false;
  bool pass = false;
  double s_hat = 0.0;
  double s_star = 0.0;  // target, with the alpha -> inf limit 1/3 when elliptic
  double margin = 0.0;  // s_hat - (s_star - tolerance)
  std::string verdict_note;
};

/// Verdict tolerance: the empirical exponent must reach s_star - this.
inline constexpr double kVerdictTolerance = 1e-3;

/// Runs the six stages (nondeg, exponents, solve, average, spectral,
/// verdict), writing bulk artifacts (trajectory dumps, average field) into
/// cfg.output_dir as each stage completes. Configuration problems throw
/// config_error before any stage runs; stage failures are captured in the
/// report instead.
PipelineReport run_pipeline(const ExperimentConfig& cfg);

/// Deterministic JSON text of the report; the timestamp occupies its own
/// line so byte comparisons can drop it.
std::string report_to_json_text(const PipelineReport& rep);
PipelineReport report_from_json_text(const std::string& text);

/// Writes report.json, the per-stage CSV tables and manifest.csv into
/// rep.config.output_dir. Manifest rows are file,kind,status where status
/// tracks whether the producing stage completed, failed or never ran.
void write_report_bundle(const PipelineReport& rep);

}  // namespace dgpr
