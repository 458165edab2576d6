#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <map>

#include <Eigen/Dense>

namespace dgpr {

enum class FluxKind { zero, polynomial_power, tabulated, piecewise_in_x };
enum class DiffusionKind { zero, diagonal_power, constant_matrix, tabulated };

/// Convective flux 𝔣 : [lambda_min, lambda_max] -> R^{d_x} with derivative f.
/// polynomial_power stores f_i = coef_i * λ^{power_i}, so that
/// 𝔣_i = coef_i * λ^{power_i+1} / (power_i+1).
struct FluxModel {
  FluxKind kind = FluxKind::zero;
  int d_x = 1;
  double lambda_min = -1.0;
  double lambda_max = 1.0;

  Eigen::ArrayXd coef;   // polynomial_power: per-axis coefficient of f
  Eigen::ArrayXi power;  // polynomial_power: per-axis integer exponent of f (>= 0)

  Eigen::ArrayXd lambda_nodes;  // tabulated: ascending sample grid
  Eigen::ArrayXXd values;       // tabulated: n_nodes x d_x samples of 𝔣

  std::shared_ptr<FluxModel> left, right;  // piecewise_in_x (1D only)
  double x_jump = 0.0;

  static FluxModel zero_flux(int d_x, double m, double M);
  static FluxModel power_law(const Eigen::ArrayXd& coef, const Eigen::ArrayXi& power, double m,
                             double M);
  static FluxModel tabulated(const Eigen::ArrayXd& lambda_nodes, const Eigen::ArrayXXd& values);
  static FluxModel piecewise(const FluxModel& left, const FluxModel& right, double x_jump);
};

/// Diffusion matrix a : [lambda_min, lambda_max] -> Sym_+(d_x) together with
/// its primitive A (A' = a, A(0) = 0) and PSD square root sigma.
struct DiffusionModel {
  DiffusionKind kind = DiffusionKind::zero;
  int d_x = 1;
  double lambda_min = -1.0;
  double lambda_max = 1.0;

  Eigen::ArrayXd coef;   // diagonal_power: a_ii = coef_i * |λ|^{power_i}
  Eigen::ArrayXd power;  // diagonal_power: real exponents >= 0

  Eigen::MatrixXd constant;  // constant_matrix: symmetric PSD

  Eigen::ArrayXd lambda_nodes;   // tabulated (diagonal): ascending sample grid
  Eigen::ArrayXXd diag_values;   // tabulated: n_nodes x d_x samples of diag(a)

  static DiffusionModel zero_diffusion(int d_x, double m, double M);
  static DiffusionModel diagonal_power(const Eigen::ArrayXd& coef, const Eigen::ArrayXd& power,
                                       double m, double M);
  static DiffusionModel constant_matrix(const Eigen::MatrixXd& a, double m, double M);
  static DiffusionModel tabulated(const Eigen::ArrayXd& lambda_nodes,
                                  const Eigen::ArrayXXd& diag_values);
};

/// Named initial-datum descriptor; interpretation happens on a concrete grid.
struct InitialData {
  std::string profile = "constant";  // constant|riemann|gaussian|bump|sine|barenblatt
  double value = 0.0;                                // constant
  double left = 1.0, right = 0.0, jump = 0.0;        // riemann
  double center_x = 0.0, center_y = 0.0;             // gaussian, bump
  double width = 1.0, amplitude = 1.0, baseline = 0.0;
  double t0 = 0.25, mass = 1.0;  // barenblatt (uses the owning problem's m_pm)
};

/// A degenerate convection-diffusion problem on a periodic box:
///   ∂t u + div 𝔣(u) = D²:A(u), with state interval [m, M].
struct ProblemSpec {
  std::string name = "custom";
  int d_x = 1;
  double m = -1.0;
  double M = 1.0;
  FluxModel flux;
  DiffusionModel diffusion;
  InitialData initial;
  bool max_principle_flag = false;  // 𝔣(m) = 𝔣(M) = 0 within 1e-12

  // builtin parameters, kept for reporting
  int l = 0;
  int n = 0;
  double m_pm = 0.0;

  int symbol_dimension() const { return d_x + 1; }
  bool heterogeneous() const { return flux.kind == FluxKind::piecewise_in_x; }
};

/// f(x, λ) ∈ R^{d_x}. x is required for piecewise models and ignored
/// otherwise. λ outside [lambda_min, lambda_max] (beyond a 1e-9 relative
/// slop, which is clamped) raises std::domain_error.
Eigen::VectorXd eval_flux_derivative(const FluxModel& model, double lambda,
                                     std::optional<double> x = std::nullopt);

/// 𝔣(x, λ) ∈ R^{d_x} under the same conventions.
Eigen::VectorXd eval_flux(const FluxModel& model, double lambda,
                          std::optional<double> x = std::nullopt);

/// a(λ), A(λ), sqrt(a(λ)) and ∫₀^u sqrt(a(w)) dw, all d_x × d_x.
Eigen::MatrixXd eval_diffusion(const DiffusionModel& model, double lambda);
Eigen::MatrixXd eval_diffusion_primitive(const DiffusionModel& model, double lambda);
Eigen::MatrixXd eval_sigma(const DiffusionModel& model, double lambda);
Eigen::MatrixXd eval_sigma_primitive(const DiffusionModel& model, double u);

/// Symmetric PSD square root. Eigenvalues in [-1e-10, 0) are clamped to 0;
/// an eigenvalue below -1e-10 raises std::invalid_argument naming it.
/// Postcondition ‖sqrt(a)² - a‖_max ≤ 1e-10 is verified.
Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& a);

/// Full flux vector in symbol coordinates (time slot first): (1, f(λ)).
/// Heterogeneous models are rejected (their symbol depends on x).
Eigen::VectorXd symbol_flux(const ProblemSpec& spec, double lambda);

/// Diffusion matrix in symbol coordinates: zero time row/column, spatial
/// block a(λ).
Eigen::MatrixXd symbol_diffusion(const ProblemSpec& spec, double lambda);

/// Closed-form source-type solution profile of ∂t u = (u^m)_xx in 1D,
/// self-similar with the given total mass.
double barenblatt_value(double m_pm, double mass, double t, double x);

/// Builtin problem library. Names: tt_example (l, n), burgers_1d,
/// heat (d_x), porous_medium (m_pm), heterogeneous_flux_1d.
/// Unknown names or out-of-range parameters raise std::invalid_argument.
ProblemSpec builtin_problem(const std::string& name,
                            const std::map<std::string, double>& params = {});

}  // namespace dgpr
