#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dgpr/problem.hpp"

namespace dgpr {

/// Sampling controls for the non-degeneracy estimator. The seed is part of
/// the contract: identical options give bit-identical reports.
struct NondegOptions {
  double delta_min = 1e-4;
  double delta_max = 1e-1;
  int n_delta = 12;
  int n_sphere = 4096;    // >= 1000 unit directions
  int n_lambda = 100000;  // >= 1000 midpoint cells on [m, M]
  std::uint64_t seed = 1;
};

struct NondegReport {
  std::vector<double> delta;                 // ascending
  std::vector<double> sup_measure;           // sup over sampled directions
  std::vector<Eigen::VectorXd> argmax_xi;    // attaining direction per delta
  double alpha_hat = 0.0;                    // +inf when elliptic
  double r_squared = 1.0;
  bool elliptic = false;                     // every sampled measure vanished
  int n_zero_measures = 0;                   // deltas excluded from the fit
  int n_sphere = 0;
  int n_lambda = 0;
  double lambda_cell = 0.0;                  // measure quantum |I| / n_lambda
  std::uint64_t seed = 0;
};

struct ImplicationReport {
  std::vector<int> J;                   // dyadic magnitudes
  std::vector<double> slope_tt;         // per-J decay rate of the scaled condition
  double alpha_tt = 0.0;                // aggregated (median) TT exponent
  double alpha_stand = 0.0;             // standard estimator on the same problem
  double beta = 0.0;
  double tolerance = 0.05;
  bool tt_elliptic = false;
  bool holds = false;                   // alpha_stand >= alpha_tt / 2 - tolerance
};

/// Symbol |ξ0 + ⟨f(λ)|ξ_spatial⟩|² + ⟨a(λ)ξ_spatial|ξ_spatial⟩ at a unit
/// frequency direction ξ ∈ R^{d_x+1}. ‖ξ‖ must equal 1 within 1e-12.
double symbol_value(const ProblemSpec& spec, const Eigen::VectorXd& xi, double lambda);

/// meas{λ ∈ [m, M] : symbol ≤ δ} by midpoint counting on n_lambda cells.
/// Deterministic; n_lambda >= 1000 and δ > 0 are enforced.
double level_set_measure(const ProblemSpec& spec, const Eigen::VectorXd& xi, double delta,
                         int n_lambda);

/// Deterministic unit directions covering one hemisphere (the symbol is even
/// in ξ): exact coordinate axes, coordinate-plane rings and a seeded
/// low-discrepancy bulk. d ∈ {2, 3}.
std::vector<Eigen::VectorXd> sphere_directions(int d, int n, std::uint64_t seed);

/// Fit sup-measure(δ) ~ δ^α over a geometric δ-sequence.
NondegReport estimate_alpha(const ProblemSpec& spec, const NondegOptions& opt);

/// Evaluate the scaled variant of the condition (measure of
/// {|⟨f|ξ⟩|² + ⟨aξ|ξ⟩² ≤ δ²} over |ξ| ~ J) and verify that the standard
/// estimator retains at least half its exponent, within tolerance.
ImplicationReport check_condition_implication(const ProblemSpec& spec, const std::vector<int>& J,
                                              double beta, const std::vector<double>& deltas,
                                              const NondegOptions& opt, double tolerance = 0.05);

}  // namespace dgpr
