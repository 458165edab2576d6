#include "dgpr/problem.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dgpr/util.hpp"

namespace dgpr {

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

double clamp_lambda(double lambda, double lo, double hi, const char* what) {
  const double tol = 1e-9 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
  if (lambda < lo - tol || lambda > hi + tol) {
    std::ostringstream msg;
    msg << what << ": state value " << lambda << " outside [" << lo << ", " << hi << "]";
    throw std::domain_error(msg.str());
  }
  return std::clamp(lambda, lo, hi);
}

/// Piecewise-linear interpolation on an ascending node grid.
double interp(const Eigen::ArrayXd& nodes, const Eigen::Ref<const Eigen::ArrayXd>& vals,
              double lambda) {
  const Eigen::Index n = nodes.size();
  if (lambda <= nodes[0]) return vals[0];
  if (lambda >= nodes[n - 1]) return vals[n - 1];
  const double* begin = nodes.data();
  const Eigen::Index j = std::upper_bound(begin, begin + n, lambda) - begin - 1;
  const double t = (lambda - nodes[j]) / (nodes[j + 1] - nodes[j]);
  return (1.0 - t) * vals[j] + t * vals[j + 1];
}

double interp_slope(const Eigen::ArrayXd& nodes, const Eigen::Ref<const Eigen::ArrayXd>& vals,
                    double lambda) {
  const Eigen::Index n = nodes.size();
  Eigen::Index j = std::upper_bound(nodes.data(), nodes.data() + n, lambda) - nodes.data() - 1;
  j = std::clamp<Eigen::Index>(j, 0, n - 2);
  return (vals[j + 1] - vals[j]) / (nodes[j + 1] - nodes[j]);
}

void check_nodes(const Eigen::ArrayXd& nodes, Eigen::Index rows) {
  if (nodes.size() < 2) throw std::invalid_argument("tabulated model: need at least 2 nodes");
  if (nodes.size() != rows) throw std::invalid_argument("tabulated model: node/value size mismatch");
  for (Eigen::Index i = 0; i + 1 < nodes.size(); ++i)
    if (!(nodes[i] < nodes[i + 1]))
      throw std::invalid_argument("tabulated model: nodes must be strictly ascending");
}

}  // namespace

// --- FluxModel ------------------------------------------------------------

FluxModel FluxModel::zero_flux(int d_x, double m, double M) {
  FluxModel f;
  f.kind = FluxKind::zero;
  f.d_x = d_x;
  f.lambda_min = m;
  f.lambda_max = M;
  return f;
}

FluxModel FluxModel::power_law(const Eigen::ArrayXd& coef, const Eigen::ArrayXi& power, double m,
                               double M) {
  if (coef.size() != power.size() || coef.size() < 1 || coef.size() > 2)
    throw std::invalid_argument("power_law flux: need matching coef/power of size 1 or 2");
  if ((power < 0).any()) throw std::invalid_argument("power_law flux: exponents must be >= 0");
  FluxModel f;
  f.kind = FluxKind::polynomial_power;
  f.d_x = static_cast<int>(coef.size());
  f.coef = coef;
  f.power = power;
  f.lambda_min = m;
  f.lambda_max = M;
  return f;
}

FluxModel FluxModel::tabulated(const Eigen::ArrayXd& lambda_nodes, const Eigen::ArrayXXd& values) {
  check_nodes(lambda_nodes, values.rows());
  FluxModel f;
  f.kind = FluxKind::tabulated;
  f.d_x = static_cast<int>(values.cols());
  f.lambda_nodes = lambda_nodes;
  f.values = values;
  f.lambda_min = lambda_nodes[0];
  f.lambda_max = lambda_nodes[lambda_nodes.size() - 1];
  return f;
}

FluxModel FluxModel::piecewise(const FluxModel& left, const FluxModel& right, double x_jump) {
  if (left.d_x != 1 || right.d_x != 1)
    throw std::invalid_argument("piecewise flux: only 1D pieces are supported");
  FluxModel f;
  f.kind = FluxKind::piecewise_in_x;
  f.d_x = 1;
  f.left = std::make_shared<FluxModel>(left);
  f.right = std::make_shared<FluxModel>(right);
  f.x_jump = x_jump;
  f.lambda_min = std::max(left.lambda_min, right.lambda_min);
  f.lambda_max = std::min(right.lambda_max, left.lambda_max);
  return f;
}

Eigen::VectorXd eval_flux_derivative(const FluxModel& model, double lambda,
                                     std::optional<double> x) {
  switch (model.kind) {
    case FluxKind::zero:
      return Eigen::VectorXd::Zero(model.d_x);
    case FluxKind::polynomial_power: {
      const double lam = clamp_lambda(lambda, model.lambda_min, model.lambda_max, "flux");
      Eigen::VectorXd out(model.d_x);
      for (int i = 0; i < model.d_x; ++i) out[i] = model.coef[i] * ipow(lam, model.power[i]);
      return out;
    }
    case FluxKind::tabulated: {
      const double lam = clamp_lambda(lambda, model.lambda_min, model.lambda_max, "flux");
      Eigen::VectorXd out(model.d_x);
      for (int i = 0; i < model.d_x; ++i)
        out[i] = interp_slope(model.lambda_nodes, model.values.col(i), lam);
      return out;
    }
    case FluxKind::piecewise_in_x: {
      if (!x) throw std::invalid_argument("piecewise flux: position x required");
      const FluxModel& piece = (*x < model.x_jump) ? *model.left : *model.right;
      return eval_flux_derivative(piece, lambda);
    }
  }
  throw std::logic_error("unreachable flux kind");
}

Eigen::VectorXd eval_flux(const FluxModel& model, double lambda, std::optional<double> x) {
  switch (model.kind) {
    case FluxKind::zero:
      return Eigen::VectorXd::Zero(model.d_x);
    case FluxKind::polynomial_power: {
      const double lam = clamp_lambda(lambda, model.lambda_min, model.lambda_max, "flux");
      Eigen::VectorXd out(model.d_x);
      for (int i = 0; i < model.d_x; ++i)
        out[i] = model.coef[i] * ipow(lam, model.power[i] + 1) / (model.power[i] + 1);
      return out;
    }
    case FluxKind::tabulated: {
      const double lam = clamp_lambda(lambda, model.lambda_min, model.lambda_max, "flux");
      Eigen::VectorXd out(model.d_x);
      for (int i = 0; i < model.d_x; ++i)
        out[i] = interp(model.lambda_nodes, model.values.col(i), lam);
      return out;
    }
    case FluxKind::piecewise_in_x: {
      if (!x) throw std::invalid_argument("piecewise flux: position x required");
      const FluxModel& piece = (*x < model.x_jump) ? *model.left : *model.right;
      return eval_flux(piece, lambda);
    }
  }
  throw std::logic_error("unreachable flux kind");
}

// --- DiffusionModel --------------------------------------------------------

DiffusionModel DiffusionModel::zero_diffusion(int d_x, double m, double M) {
  DiffusionModel a;
  a.kind = DiffusionKind::zero;
  a.d_x = d_x;
  a.lambda_min = m;
  a.lambda_max = M;
  return a;
}

DiffusionModel DiffusionModel::diagonal_power(const Eigen::ArrayXd& coef,
                                              const Eigen::ArrayXd& power, double m, double M) {
  if (coef.size() != power.size() || coef.size() < 1 || coef.size() > 2)
    throw std::invalid_argument("diagonal_power diffusion: coef/power size mismatch");
  if ((coef < 0).any()) throw std::invalid_argument("diagonal_power diffusion: coef must be >= 0");
  if ((power < 0).any())
    throw std::invalid_argument("diagonal_power diffusion: exponents must be >= 0");
  DiffusionModel a;
  a.kind = DiffusionKind::diagonal_power;
  a.d_x = static_cast<int>(coef.size());
  a.coef = coef;
  a.power = power;
  a.lambda_min = m;
  a.lambda_max = M;
  return a;
}

DiffusionModel DiffusionModel::constant_matrix(const Eigen::MatrixXd& mat, double m, double M) {
  if (mat.rows() != mat.cols() || mat.rows() < 1 || mat.rows() > 2)
    throw std::invalid_argument("constant_matrix diffusion: need square 1x1 or 2x2 matrix");
  matrix_sqrt(mat);  // validates symmetry and positive semi-definiteness
  DiffusionModel a;
  a.kind = DiffusionKind::constant_matrix;
  a.d_x = static_cast<int>(mat.rows());
  a.constant = 0.5 * (mat + mat.transpose());
  a.lambda_min = m;
  a.lambda_max = M;
  return a;
}

DiffusionModel DiffusionModel::tabulated(const Eigen::ArrayXd& lambda_nodes,
                                         const Eigen::ArrayXXd& diag_values) {
  check_nodes(lambda_nodes, diag_values.rows());
  if ((diag_values < 0.0).any())
    throw std::invalid_argument("tabulated diffusion: diagonal samples must be >= 0");
  DiffusionModel a;
  a.kind = DiffusionKind::tabulated;
  a.d_x = static_cast<int>(diag_values.cols());
  a.lambda_nodes = lambda_nodes;
  a.diag_values = diag_values;
  a.lambda_min = lambda_nodes[0];
  a.lambda_max = lambda_nodes[lambda_nodes.size() - 1];
  return a;
}

namespace {
double power_primitive(double coef, double p, double u) {
  // ∫₀^u coef |w|^p dw
  return coef * ((u >= 0.0) ? 1.0 : -1.0) * std::pow(std::abs(u), p + 1.0) / (p + 1.0);
}
}  // namespace

Eigen::MatrixXd eval_diffusion(const DiffusionModel& model, double lambda) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(model.d_x, model.d_x);
  switch (model.kind) {
    case DiffusionKind::zero:
      return a;
    case DiffusionKind::diagonal_power: {
      const double lam = clamp_lambda(lambda, model.lambda_min, model.lambda_max, "diffusion");
      for (int i = 0; i < model.d_x; ++i)
        a(i, i) = model.coef[i] * std::pow(std::abs(lam), model.power[i]);
      return a;
    }
    case DiffusionKind::constant_matrix:
      return model.constant;
    case DiffusionKind::tabulated: {
      const double lam = clamp_lambda(lambda, model.lambda_min, model.lambda_max, "diffusion");
      for (int i = 0; i < model.d_x; ++i)
        a(i, i) = interp(model.lambda_nodes, model.diag_values.col(i), lam);
      return a;
    }
  }
  throw std::logic_error("unreachable diffusion kind");
}

Eigen::MatrixXd eval_diffusion_primitive(const DiffusionModel& model, double lambda) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(model.d_x, model.d_x);
  switch (model.kind) {
    case DiffusionKind::zero:
      return A;
    case DiffusionKind::diagonal_power: {
      const double lam = clamp_lambda(lambda, model.lambda_min, model.lambda_max, "diffusion");
      for (int i = 0; i < model.d_x; ++i) A(i, i) = power_primitive(model.coef[i], model.power[i], lam);
      return A;
    }
    case DiffusionKind::constant_matrix:
      return lambda * model.constant;
    case DiffusionKind::tabulated: {
      const double lam = clamp_lambda(lambda, model.lambda_min, model.lambda_max, "diffusion");
      // anchor at 0, clamped into the tabulated range
      const double a0 = std::clamp(0.0, model.lambda_min, model.lambda_max);
      for (int i = 0; i < model.d_x; ++i) {
        const auto col = model.diag_values.col(i);
        A(i, i) = adaptive_quadrature(
            [&](double w) { return interp(model.lambda_nodes, col, w); }, a0, lam, 1e-12);
      }
      return A;
    }
  }
  throw std::logic_error("unreachable diffusion kind");
}

Eigen::MatrixXd eval_sigma(const DiffusionModel& model, double lambda) {
  switch (model.kind) {
    case DiffusionKind::zero:
      return Eigen::MatrixXd::Zero(model.d_x, model.d_x);
    case DiffusionKind::diagonal_power: {
      const double lam = clamp_lambda(lambda, model.lambda_min, model.lambda_max, "diffusion");
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(model.d_x, model.d_x);
      for (int i = 0; i < model.d_x; ++i)
        s(i, i) = std::sqrt(model.coef[i]) * std::pow(std::abs(lam), 0.5 * model.power[i]);
      return s;
    }
    case DiffusionKind::constant_matrix:
      return matrix_sqrt(model.constant);
    case DiffusionKind::tabulated: {
      const double lam = clamp_lambda(lambda, model.lambda_min, model.lambda_max, "diffusion");
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(model.d_x, model.d_x);
      for (int i = 0; i < model.d_x; ++i)
        s(i, i) = std::sqrt(interp(model.lambda_nodes, model.diag_values.col(i), lam));
      return s;
    }
  }
  throw std::logic_error("unreachable diffusion kind");
}

Eigen::MatrixXd eval_sigma_primitive(const DiffusionModel& model, double u) {
  switch (model.kind) {
    case DiffusionKind::zero:
      return Eigen::MatrixXd::Zero(model.d_x, model.d_x);
    case DiffusionKind::diagonal_power: {
      const double lam = clamp_lambda(u, model.lambda_min, model.lambda_max, "diffusion");
      Eigen::MatrixXd S = Eigen::MatrixXd::Zero(model.d_x, model.d_x);
      for (int i = 0; i < model.d_x; ++i)
        S(i, i) = power_primitive(std::sqrt(model.coef[i]), 0.5 * model.power[i], lam);
      return S;
    }
    case DiffusionKind::constant_matrix:
      return u * matrix_sqrt(model.constant);
    case DiffusionKind::tabulated: {
      const double lam = clamp_lambda(u, model.lambda_min, model.lambda_max, "diffusion");
      const double a0 = std::clamp(0.0, model.lambda_min, model.lambda_max);
      Eigen::MatrixXd S = Eigen::MatrixXd::Zero(model.d_x, model.d_x);
      for (int i = 0; i < model.d_x; ++i) {
        const auto col = model.diag_values.col(i);
        S(i, i) = adaptive_quadrature(
            [&](double w) { return std::sqrt(std::max(0.0, interp(model.lambda_nodes, col, w))); },
            a0, lam, 1e-10);
      }
      return S;
    }
  }
  throw std::logic_error("unreachable diffusion kind");
}

Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix_sqrt: matrix must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("matrix_sqrt: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw std::runtime_error("matrix_sqrt: eigensolver failed");
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-10) {
      std::ostringstream msg;
      msg << "matrix_sqrt: matrix is not positive semi-definite (eigenvalue " << ev[i] << ")";
      throw std::invalid_argument(msg.str());
    }
    ev[i] = std::sqrt(std::max(0.0, ev[i]));
  }
  Eigen::MatrixXd s = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  s = 0.5 * (s + s.transpose());
  if ((s * s - a).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::runtime_error("matrix_sqrt: reconstruction tolerance violated");
  return s;
}

// --- symbol coordinates -----------------------------------------------------

Eigen::VectorXd symbol_flux(const ProblemSpec& spec, double lambda) {
  if (spec.heterogeneous())
    throw std::invalid_argument("symbol_flux: heterogeneous problems have x-dependent symbols");
  Eigen::VectorXd f(spec.d_x + 1);
  f[0] = 1.0;
  f.tail(spec.d_x) = eval_flux_derivative(spec.flux, lambda);
  return f;
}

Eigen::MatrixXd symbol_diffusion(const ProblemSpec& spec, double lambda) {
  const int d = spec.d_x + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  a.bottomRightCorner(spec.d_x, spec.d_x) = eval_diffusion(spec.diffusion, lambda);
  return a;
}

// --- Barenblatt profile ------------------------------------------------------

double barenblatt_value(double m_pm, double mass, double t, double x) {
  if (!(m_pm > 1.0)) throw std::invalid_argument("barenblatt_value: m_pm must exceed 1");
  if (!(t > 0.0) || !(mass > 0.0)) throw std::invalid_argument("barenblatt_value: need t, mass > 0");
  const double k = 1.0 / (m_pm + 1.0);
  const double p = 1.0 / (m_pm - 1.0);
  const double b = k * (m_pm - 1.0) / (2.0 * m_pm);
  const double C = std::pow(mass * std::sqrt(b) / std::beta(0.5, p + 1.0), 1.0 / (p + 0.5));
  const double y = x * std::pow(t, -k);
  const double arg = C - b * y * y;
  return (arg <= 0.0) ? 0.0 : std::pow(t, -k) * std::pow(arg, p);
}

// --- builtin library ----------------------------------------------------------

namespace {

class ParamReader {
 public:
  ParamReader(const std::string& who, const std::map<std::string, double>& params)
      : who_(who), params_(params) {}

  double get(const std::string& key, double fallback) {
    seen_.insert(key);
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  void finish() const {
    for (const auto& [key, value] : params_) {
      (void)value;
      if (!seen_.count(key))
        throw std::invalid_argument(who_ + ": unknown parameter '" + key + "'");
    }
  }

 private:
  std::string who_;
  const std::map<std::string, double>& params_;
  std::set<std::string> seen_;
};

int require_positive_int(double v, const std::string& who, const std::string& key) {
  if (!(v >= 1.0) || std::floor(v) != v)
    throw std::invalid_argument(who + ": parameter '" + key + "' must be a positive integer");
  return static_cast<int>(v);
}

bool flux_vanishes_at_endpoints(const ProblemSpec& spec) {
  auto norm_at = [&](double lam) {
    if (spec.heterogeneous())
      return std::max(eval_flux(*spec.flux.left, lam).cwiseAbs().maxCoeff(),
                      eval_flux(*spec.flux.right, lam).cwiseAbs().maxCoeff());
    return eval_flux(spec.flux, lam).cwiseAbs().maxCoeff();
  };
  return norm_at(spec.m) <= 1e-12 && norm_at(spec.M) <= 1e-12;
}

}  // namespace

ProblemSpec builtin_problem(const std::string& name, const std::map<std::string, double>& params) {
  ProblemSpec spec;
  ParamReader reader(name, params);
  if (name == "tt_example") {
    const int l = require_positive_int(reader.get("l", 1.0), name, "l");
    const int n = require_positive_int(reader.get("n", 1.0), name, "n");
    spec.name = name;
    spec.d_x = 2;
    spec.m = -1.0;
    spec.M = 1.0;
    spec.l = l;
    spec.n = n;
    spec.flux = FluxModel::power_law((Eigen::ArrayXd(2) << 1.0, 0.0).finished(),
                                     (Eigen::ArrayXi(2) << l, 0).finished(), spec.m, spec.M);
    spec.diffusion = DiffusionModel::diagonal_power(
        (Eigen::ArrayXd(2) << 0.0, 1.0).finished(),
        (Eigen::ArrayXd(2) << 0.0, static_cast<double>(n)).finished(), spec.m, spec.M);
    spec.initial.profile = "bump";
    spec.initial.width = 1.0;
    spec.initial.amplitude = 1.0;
  } else if (name == "burgers_1d") {
    spec.name = name;
    spec.d_x = 1;
    spec.m = 0.0;
    spec.M = 1.0;
    spec.flux = FluxModel::power_law(Eigen::ArrayXd::Ones(1),
                                     (Eigen::ArrayXi(1) << 1).finished(), spec.m, spec.M);
    spec.diffusion = DiffusionModel::zero_diffusion(1, spec.m, spec.M);
    spec.initial.profile = "riemann";
    spec.initial.left = 1.0;
    spec.initial.right = 0.0;
    spec.initial.jump = 0.0;
  } else if (name == "heat") {
    const int d_x = require_positive_int(reader.get("d_x", 1.0), name, "d_x");
    if (d_x > 2) throw std::invalid_argument("heat: parameter 'd_x' must be 1 or 2");
    spec.name = name;
    spec.d_x = d_x;
    spec.m = 0.0;
    spec.M = 1.0;
    spec.flux = FluxModel::zero_flux(d_x, spec.m, spec.M);
    spec.diffusion =
        DiffusionModel::constant_matrix(Eigen::MatrixXd::Identity(d_x, d_x), spec.m, spec.M);
    spec.initial.profile = "gaussian";
    spec.initial.width = 0.5;
    spec.initial.amplitude = 1.0;
  } else if (name == "porous_medium") {
    const double m_pm = reader.get("m_pm", 2.0);
    if (!(m_pm > 1.0)) throw std::invalid_argument("porous_medium: parameter 'm_pm' must exceed 1");
    spec.name = name;
    spec.d_x = 1;
    spec.m = 0.0;
    spec.M = 2.0;
    spec.m_pm = m_pm;
    spec.flux = FluxModel::zero_flux(1, spec.m, spec.M);
    spec.diffusion = DiffusionModel::diagonal_power(
        (Eigen::ArrayXd(1) << m_pm).finished(), (Eigen::ArrayXd(1) << m_pm - 1.0).finished(),
        spec.m, spec.M);
    spec.initial.profile = "barenblatt";
    spec.initial.t0 = 0.25;
    spec.initial.mass = 1.0;
  } else if (name == "heterogeneous_flux_1d") {
    const double k_left = reader.get("k_left", 1.0);
    const double k_right = reader.get("k_right", 2.0);
    const double x_jump = reader.get("x_jump", 0.0);
    spec.name = name;
    spec.d_x = 1;
    spec.m = 0.0;
    spec.M = 1.0;
    const auto piece = [&](double k) {
      return FluxModel::power_law((Eigen::ArrayXd(1) << k).finished(),
                                  (Eigen::ArrayXi(1) << 1).finished(), spec.m, spec.M);
    };
    spec.flux = FluxModel::piecewise(piece(k_left), piece(k_right), x_jump);
    spec.diffusion = DiffusionModel::zero_diffusion(1, spec.m, spec.M);
    spec.initial.profile = "bump";
    spec.initial.center_x = -0.5;
    spec.initial.width = 0.4;
    spec.initial.amplitude = 1.0;
  } else {
    throw std::invalid_argument(
        "builtin_problem: unknown name '" + name +
        "' (known: tt_example, burgers_1d, heat, porous_medium, heterogeneous_flux_1d)");
  }
  reader.finish();
  spec.max_principle_flag = flux_vanishes_at_endpoints(spec);
  return spec;
}

}  // namespace dgpr
