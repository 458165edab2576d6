#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dgpr/grid.hpp"
#include "dgpr/problem.hpp"

namespace dgpr {

/// Raised when a run cannot be configured as requested (for example the
/// stability constraint would force more steps than the time budget allows).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  double t_end = 1.0;
  std::vector<double> save_times;  // ascending, in (0, t_end]; empty means {t_end}
  double epsilon = 0.0;            // artificial viscosity coefficient
};

/// Explicit conservative march: local Lax-Friedrichs flux plus centered
/// second differences of A(u) and of the artificial viscosity term, on the
/// periodic box. The step obeys
///   dt * sum_ax(Lf/dx + 2(La + eps)/dx^2) <= safety,
/// with Lipschitz bounds taken over the initial-datum range, so the scheme
/// is monotone and the discrete extremum principle holds to roundoff.
Trajectory solve(const ProblemSpec& spec, const Grid& grid, const Field& u0,
                 const SolveOptions& opt);

/// h(x, λ) = sign(u(x) - λ) with sign(0) = 0; rows follow the flat cell
/// order, one column per λ node.
Eigen::ArrayXXd kinetic_function(const Field& u, const Eigen::ArrayXd& lambda_grid);

/// ∫ ρ(λ) h(x, λ) dλ with ρ given by samples on lambda_grid. This overload
/// integrates exactly against the piecewise-linear interpolant of ρ,
/// splitting the cell containing the sign change, so indicator weights
/// reproduce the closed form to roundoff.
Field velocity_average(const Field& u, const Eigen::ArrayXd& lambda_grid,
                       const Eigen::ArrayXd& rho);

/// Plain trapezoid contraction of a precomputed kinetic array.
Field velocity_average(const Eigen::ArrayXXd& h, const Grid& grid,
                       const Eigen::ArrayXd& lambda_grid, const Eigen::ArrayXd& rho);

/// 2u - m - M, the closed form of the indicator-weight velocity average.
Field kinetic_average_closed_form(const Field& u, double m, double M);

/// Indicator-weight average: quadrature on n_lambda >= 1000 nodes,
/// cross-checked against the closed form within 1e-9, which is returned.
Field velocity_average_indicator(const Field& u, double m, double M, int n_lambda);

/// One solve per viscosity; epsilons must be strictly decreasing and >= 0.
std::vector<Trajectory> viscosity_sweep(const ProblemSpec& spec, const Grid& grid, const Field& u0,
                                        const std::vector<double>& epsilons,
                                        const SolveOptions& opt);

struct CompactnessReport {
  std::vector<double> times;
  std::vector<double> epsilons;
  Eigen::ArrayXXd pair_l1;  // n_times x (n_eps - 1): L1 gap of consecutive velocity averages
};

/// L1 distances between indicator velocity averages of consecutive
/// viscosity levels, per save time.
CompactnessReport compactness_diagnostic(const ProblemSpec& spec,
                                         const std::vector<Trajectory>& sweep);

struct DissipationReport {
  std::vector<double> times;
  Eigen::ArrayXXd b_norms;  // n_times x d_x: ‖B_k(t, ·)‖_{L²}
};

/// B_k = Σ_s ∂_{x_s} ∫₀^u σ_{sk}(w) dw by centered differences on each
/// saved frame.
DissipationReport dissipation_diagnostic(const ProblemSpec& spec, const Trajectory& traj);

}  // namespace dgpr
