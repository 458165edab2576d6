// Acceptance gate: nine end-to-end criteria, one verdict line each.
// Exit code 0 only when every criterion passes at its stated tolerance.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "dgpr/exponents.hpp"
#include "dgpr/grid.hpp"
#include "dgpr/io.hpp"
#include "dgpr/nondeg.hpp"
#include "dgpr/pipeline.hpp"
#include "dgpr/problem.hpp"
#include "dgpr/rational.hpp"
#include "dgpr/solver.hpp"
#include "dgpr/spectral.hpp"
#include "dgpr/util.hpp"

using namespace dgpr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

Rational rq(long num, long den) { return Rational(num) / Rational(den); }

// ---------------------------------------------------------------------- 1 --

Outcome criterion_exponent_oracles() {
  bool ok = true;
  ok &= q_star<Rational>(1, 2) == rq(11, 6);
  ok &= s_star<Rational>(1, 2) == rq(5, 407);
  ok &= c_star<Rational>(1, 2) == rq(10, 407);
  ok &= theta_star<Rational>(1, 2) == rq(1, 11);
  ok &= q_star<Rational>(rq(1, 2), 3) == rq(25, 13);
  ok &= s_star<Rational>(rq(1, 2), 3) == rq(9, 2983);

  const auto set = proof_parameters<Rational>(1, 2);
  ok &= set.r == rq(175, 407);
  ok &= set.epsilon == rq(230, 407);
  ok &= set.eta == rq(2, 11);
  ok &= set.omega == rq(70, 407);
  ok &= set.gamma == rq(55, 407);

  double drift = 0.0;
  const std::pair<double, int> pts[] = {{1.0, 2}, {0.5, 3}, {2.0, 5}, {0.25, 4}};
  for (const auto& [a, d] : pts) {
    const Rational ar = rq(static_cast<long>(a * 4), 4);
    drift = std::max(drift, std::abs(q_star<double>(a, d) - to_double(q_star<Rational>(ar, d))));
    drift = std::max(drift, std::abs(s_star<double>(a, d) - to_double(s_star<Rational>(ar, d))));
    drift = std::max(drift, std::abs(c_star<double>(a, d) - to_double(c_star<Rational>(ar, d))));
  }
  ok &= drift <= 1e-15;
  return {ok, fmt("11 rational oracles exact, double drift %.1e (tol 1e-15)", drift)};
}

// ---------------------------------------------------------------------- 2 --

Outcome criterion_identity_suite() {
  const auto rep = validate_exponent_identities(1000, 2024, 1e-12);
  const double worst = std::max({rep.residual_r_plus_epsilon, rep.residual_s_star_chain,
                                 rep.residual_q_theta});
  const bool ok = rep.all_pass && worst <= 1e-12 && rep.min_omega_gap > 0.0;
  return {ok, fmt("1000 draws: worst identity residual %.1e (tol 1e-12), min omega gap %.3e > 0",
                  worst, rep.min_omega_gap)};
}

// ---------------------------------------------------------------------- 3 --

Outcome criterion_alpha_bands() {
  const auto t0 = std::chrono::steady_clock::now();
  NondegOptions opt;
  opt.seed = 7;
  struct Case {
    double l, n, lo, hi, hat;
  } cases[] = {{1, 1, 0.45, 0.55, 0}, {2, 1, 0.20, 0.30, 0}, {1, 4, 0.20, 0.30, 0}};
  bool ok = true;
  for (auto& c : cases) {
    const auto spec = builtin_problem("tt_example", {{"l", c.l}, {"n", c.n}});
    c.hat = estimate_alpha(spec, opt).alpha_hat;
    ok &= c.hat >= c.lo && c.hat <= c.hi;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ok &= secs < 180.0;
  return {ok, fmt("alpha_hat = %.4f in [0.45,0.55], %.4f and %.4f in [0.20,0.30]; %.1f s < 180 s",
                  cases[0].hat, cases[1].hat, cases[2].hat, secs)};
}

// ---------------------------------------------------------------------- 4 --

Outcome criterion_diffusion_slope() {
  NondegOptions opt;
  opt.seed = 7;
  bool ok = true;
  std::string vals;
  for (int n : {1, 2, 4}) {
    ProblemSpec spec;
    spec.name = "diffusion_only";
    spec.d_x = 1;
    spec.m = -1.0;
    spec.M = 1.0;
    spec.flux = FluxModel::zero_flux(1, -1.0, 1.0);
    Eigen::ArrayXd coef(1), power(1);
    coef[0] = 1.0;
    power[0] = static_cast<double>(n);
    spec.diffusion = DiffusionModel::diagonal_power(coef, power, -1.0, 1.0);
    const double hat = estimate_alpha(spec, opt).alpha_hat;
    ok &= std::abs(hat - 1.0 / n) <= 0.03;
    vals += fmt("%sn=%d: %.4f vs %.4f", vals.empty() ? "" : ", ", n, hat, 1.0 / n);
  }
  return {ok, vals + " (tol 0.03)"};
}

// ---------------------------------------------------------------------- 5 --

Outcome criterion_solver_benchmarks() {
  bool ok = true;
  std::string parts;
  double worst_range = 0.0, worst_mass = 0.0;

  auto track = [&](const Trajectory& traj, const Field& u0) {
    const auto& u = traj.frames.back();
    worst_range = std::max(worst_range, u0.values.minCoeff() - u.minCoeff());
    worst_range = std::max(worst_range, u.maxCoeff() - u0.values.maxCoeff());
    Field last(u0.grid);
    last.values = u;
    worst_mass = std::max(worst_mass,
                          std::abs(mass(last) - mass(u0)) / traj.times.back());
  };

  {  // shock position, 1024 cells at t = 0.5
    const auto spec = builtin_problem("burgers_1d");
    const auto grid = Grid::make_1d(1024, -2.0, 2.0);
    const auto u0 = make_initial_data(grid, spec.initial, spec);
    SolveOptions opt;
    opt.t_end = 0.5;
    const auto traj = solve(spec, grid, u0, opt);
    track(traj, u0);
    const auto& u = traj.frames.back();
    double x_shock = -10.0;
    for (int i = 0; i + 1 < 1024; ++i) {
      if (grid.coord(0, i) < 0.0) continue;
      if (u[i] >= 0.5 && u[i + 1] < 0.5) {
        x_shock = grid.coord(0, i) + (0.5 - u[i]) / (u[i + 1] - u[i]) * grid.dx(0);
        break;
      }
    }
    const double err = std::abs(x_shock - 0.25);
    ok &= err <= 2.0 * grid.dx(0);
    parts += fmt("shock |x-t/2| = %.1e (tol %.1e)", err, 2.0 * grid.dx(0));
  }
  {  // heat kernel, 512 cells at t = 0.1
    const auto spec = builtin_problem("heat");
    const auto grid = Grid::make_1d(512, -8.0, 8.0);
    const auto u0 = make_initial_data(grid, spec.initial, spec);
    SolveOptions opt;
    opt.t_end = 0.1;
    const auto traj = solve(spec, grid, u0, opt);
    track(traj, u0);
    Field diff(grid);
    for (int i = 0; i < 512; ++i) {
      const double x = grid.coord(0, i);
      double v = 0.0;
      const double s2 = 0.25 + 2.0 * 0.1;
      for (int im = -1; im <= 1; ++im) {
        const double y = x + im * 16.0;
        v += std::sqrt(0.25 / s2) * std::exp(-0.5 * y * y / s2);
      }
      diff.values[i] = traj.frames.back()[i] - v;
    }
    const double err = l2_norm(diff);
    ok &= err <= 5e-3;
    parts += fmt("; heat L2 = %.1e (tol 5e-3)", err);
  }
  {  // porous medium m = 2, 1024 cells, profile advanced to t = 1
    const auto spec = builtin_problem("porous_medium");
    const auto grid = Grid::make_1d(1024, -4.0, 4.0);
    const auto u0 = make_initial_data(grid, spec.initial, spec);
    SolveOptions opt;
    opt.t_end = 0.75;  // initial profile sits at t0 = 0.25
    const auto traj = solve(spec, grid, u0, opt);
    track(traj, u0);
    double err = 0.0;
    for (int i = 0; i < 1024; ++i)
      err += std::abs(traj.frames.back()[i] - barenblatt_value(2.0, 1.0, 1.0, grid.coord(0, i)));
    err *= grid.dx(0);
    ok &= err <= 2e-2;
    parts += fmt("; porous medium L1 = %.1e (tol 2e-2)", err);
  }
  ok &= worst_range <= 1e-12;
  ok &= worst_mass <= 1e-10;
  parts += fmt("; range excess %.1e (tol 1e-12); mass drift %.1e /unit time (tol 1e-10)",
               worst_range, worst_mass);
  return {ok, parts};
}

// ---------------------------------------------------------------------- 6 --

Outcome criterion_kinetic_identity() {
  const double m = -1.2, M = 0.8;
  const auto grid = Grid::make_1d(64, 0.0, 1.0);
  const Eigen::ArrayXd lambda_grid = Eigen::ArrayXd::LinSpaced(1000, m, M);
  const Eigen::ArrayXd rho = Eigen::ArrayXd::Ones(1000);
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int f = 0; f < 20; ++f) {
    Field u(grid);
    for (int i = 0; i < 64; ++i) u.values[i] = uniform(rng, m, M);
    const Field quad = velocity_average(u, lambda_grid, rho);
    const Field closed = kinetic_average_closed_form(u, m, M);
    worst = std::max(worst, (quad.values - closed.values).abs().maxCoeff());
  }
  return {worst <= 1e-9,
          fmt("20 fields, 1000 nodes: worst |quadrature - closed form| = %.1e (tol 1e-9)",
              worst)};
}

// ---------------------------------------------------------------------- 7 --

Outcome criterion_spectral_estimator() {
  bool ok = true;
  std::string parts;

  {  // partition of unity on a dense radial grid
    double worst = 0.0;
    for (int d : {1, 2}) {
      const auto p = build_partition(d, d == 1 ? 8 : 6);
      const double top = std::ldexp(1.0, p.j_max - 1);
      for (int i = 1; i <= 10000; ++i) {
        const double r = top * i / 10000.0;
        double sum = p.cap(r);
        for (int J = 1; J <= p.j_max; ++J) sum += p.band(J, r);
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
    ok &= worst <= 1e-12;
    parts += fmt("partition residual %.1e (tol 1e-12)", worst);
  }
  {  // Plancherel on random fields
    std::mt19937_64 rng(14);
    double worst = 0.0;
    for (int dim = 1; dim <= 2; ++dim) {
      const auto grid = dim == 1 ? Grid::make_1d(256, -2.0, 2.0)
                                 : Grid::make_2d(32, 32, 0.0, 1.0, 0.0, 1.0);
      Field g(grid);
      for (Eigen::Index i = 0; i < g.values.size(); ++i) g.values[i] = uniform(rng, -1.0, 1.0);
      const auto ghat = fourier_transform(g);
      const double lhs = l2_norm(g) * l2_norm(g);
      const double rhs = ghat.abs2().sum() * grid.cell_volume() / grid.total_cells();
      worst = std::max(worst, std::abs(lhs - rhs) / lhs);
    }
    ok &= worst <= 1e-10;
    parts += fmt("; Plancherel %.1e (tol 1e-10)", worst);
  }
  {  // orthogonality of separated blocks
    std::mt19937_64 rng(16);
    const auto grid = Grid::make_1d(512, 0.0, 1.0);
    Field g(grid);
    for (int i = 0; i < 512; ++i) g.values[i] = uniform(rng, -1.0, 1.0);
    const auto p = build_partition(1, 8);
    const Eigen::ArrayXd norms = frequency_norm(grid);
    auto banded = [&](int K) {
      Eigen::ArrayXcd psi(512);
      for (int k = 0; k < 512; ++k) psi[k] = p.band(K, norms[k]);
      return apply_multiplier(g, psi);
    };
    double worst = 0.0;
    const int pairs[][2] = {{2, 4}, {2, 5}, {3, 6}, {5, 7}};
    for (const auto& pr : pairs) {
      const auto a = banded(pr[0]), b = banded(pr[1]);
      worst = std::max(worst,
                       std::abs((a.values * b.values).sum() * grid.cell_volume()));
    }
    ok &= worst <= 1e-10;
    parts += fmt("; block overlap %.1e (tol 1e-10)", worst);
  }
  {  // indicator exponent 1/2
    const auto grid = Grid::make_1d(4096, -4.0, 4.0);
    Field g(grid);
    for (int i = 0; i < 4096; ++i) {
      const double x = grid.coord(0, i);
      g.values[i] = (x > 0.0 && x < 1.0) ? 1.0 : 0.0;
    }
    const auto spec = block_norms(g, build_partition(1, 8), 2.0);
    ok &= std::abs(spec.s_hat - 0.5) <= 0.05;
    parts += fmt("; indicator s_hat = %.4f (target 0.5 +- 0.05)", spec.s_hat);
  }
  {  // synthetic power spectra
    const auto grid = Grid::make_1d(4096, 0.0, 1.0);
    Eigen::FFT<double> fft;
    double worst = 0.0;
    for (double beta : {1.0, 1.5, 2.0}) {
      std::mt19937_64 rng(900 + static_cast<int>(10 * beta));
      std::vector<std::complex<double>> ghat(4096, {0.0, 0.0});
      for (int k = 1; k < 2048; ++k) {
        const double mag = std::pow(static_cast<double>(k), -beta);
        ghat[k] = std::polar(mag, uniform(rng, 0.0, 2.0 * M_PI));
        ghat[4096 - k] = std::conj(ghat[k]);
      }
      std::vector<std::complex<double>> out(4096);
      fft.inv(out, ghat);
      Field g(grid);
      for (int i = 0; i < 4096; ++i) g.values[i] = out[i].real();
      const auto spec = block_norms(g, build_partition(1, 9), 2.0);
      worst = std::max(worst, std::abs(spec.s_hat - (beta - 0.5)));
    }
    ok &= worst <= 0.05;
    parts += fmt("; synthetic beta error %.1e (tol 0.05)", worst);
  }
  {  // multiplier L2 bound on random symbols
    std::mt19937_64 rng(13);
    const auto grid = Grid::make_1d(64, 0.0, 1.0);
    double excess = -1.0;
    for (int trial = 0; trial < 100; ++trial) {
      Field g(grid);
      for (int i = 0; i < 64; ++i) g.values[i] = uniform(rng, -1.0, 1.0);
      Eigen::ArrayXcd psi(64), sym(64);
      for (int k = 0; k < 64; ++k)
        psi[k] = std::complex<double>(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0));
      for (int k = 0; k < 64; ++k) sym[k] = 0.5 * (psi[k] + std::conj(psi[(64 - k) % 64]));
      const auto outf = apply_multiplier(g, sym);
      excess = std::max(excess,
                        l2_norm(outf) - sym.abs().maxCoeff() * l2_norm(g));
    }
    ok &= excess <= 1e-10;
    parts += fmt("; 100-symbol bound excess %.1e (tol 1e-10)", excess);
  }
  return {ok, parts};
}

// ---------------------------------------------------------------------- 8 --

Outcome criterion_pipeline_closure() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir1 = fs::temp_directory_path() / "dgpr_acceptance_run1";
  const fs::path dir2 = fs::temp_directory_path() / "dgpr_acceptance_run2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);

  ExperimentConfig cfg;  // defaults: tt_example, 128x128, three viscosities
  cfg.seed = 7;
  cfg.output_dir = dir1.string();
  const PipelineReport rep = run_pipeline(cfg);
  write_report_bundle(rep);

  auto cfg2 = cfg;
  cfg2.output_dir = dir2.string();
  const PipelineReport rep2 = run_pipeline(cfg2);
  write_report_bundle(rep2);

  auto slurp = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
  };
  auto scrub = [](const std::string& text, const std::string& dir) {
    std::istringstream is(text);
    std::string line, out;
    while (std::getline(is, line))
      if (line.find("\"timestamp\"") == std::string::npos &&
          line.find(dir) == std::string::npos)
        out += line + '\n';
    return out;
  };

  bool identical = scrub(slurp(dir1 / "report.json"), dir1.string()) ==
                   scrub(slurp(dir2 / "report.json"), dir2.string());
  for (const char* name :
       {"manifest.csv", "nondeg_measure_vs_delta.csv", "exponents.csv", "runs.csv",
        "compactness.csv", "average.csv", "spectrum_log2norm_vs_K.csv", "trajectory_0.dgpr",
        "trajectory_1.dgpr", "trajectory_2.dgpr"})
    identical &= slurp(dir1 / name) == slurp(dir2 / name);

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool ok = rep.status == "ok" && rep.pass && !rep.elliptic;
  ok &= rep.nondeg.alpha_hat >= 0.45 && rep.nondeg.alpha_hat <= 0.55;
  ok &= rep.exponents.d == 3;
  ok &= rep.s_star == s_star<double>(rep.nondeg.alpha_hat, 3);
  ok &= rep.s_hat >= rep.s_star - 1e-3;
  ok &= rep.verdict_note.find("lower bound") != std::string::npos;
  ok &= identical;
  ok &= secs < 600.0;
  return {ok, fmt("alpha_hat %.4f, s_hat %.3f >= s_star %.5f - 1e-3, two runs %s, %.0f s < 600 s",
                  rep.nondeg.alpha_hat, rep.s_hat, rep.s_star,
                  identical ? "byte-identical (sans timestamp)" : "DIFFER", secs)};
}

// ---------------------------------------------------------------------- 9 --

Outcome criterion_condition_implication() {
  const auto tt = builtin_problem("tt_example", {{"l", 1.0}, {"n", 1.0}});
  NondegOptions opt;
  opt.seed = 7;
  const auto deltas = geometric_sequence(1e-3, 1e-1, 8);
  const auto rep = check_condition_implication(tt, {1, 2, 4, 8}, 0.5, deltas, opt);
  const bool ok = rep.holds && rep.alpha_stand >= rep.alpha_tt / 2.0 - 0.05;
  return {ok, fmt("alpha_stand = %.4f >= alpha_tt/2 - 0.05 = %.4f", rep.alpha_stand,
                  rep.alpha_tt / 2.0 - 0.05)};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  const Entry entries[] = {
      {"closed-form exponent oracles", criterion_exponent_oracles},
      {"parameter identity suite", criterion_identity_suite},
      {"non-degeneracy exponent bands", criterion_alpha_bands},
      {"pure-diffusion slope recovery", criterion_diffusion_slope},
      {"solver benchmarks", criterion_solver_benchmarks},
      {"kinetic averaging identity", criterion_kinetic_identity},
      {"dyadic regularity estimator", criterion_spectral_estimator},
      {"pipeline closure and determinism", criterion_pipeline_closure},
      {"scaled condition implication", criterion_condition_implication},
  };

  bool all = true;
  int idx = 0;
  for (const auto& entry : entries) {
    ++idx;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = entry.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d (%s): %s  [%.1f s]\n", out.pass ? "PASS" : "FAIL", idx,
                entry.name, out.detail.c_str(), secs);
    std::fflush(stdout);
    all &= out.pass;
  }
  std::printf("acceptance: %s\n", all ? "all 9 criteria passed" : "FAILURES above");
  return all ? 0 : 1;
}
