#include "dgpr/nondeg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dgpr/util.hpp"

namespace dgpr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int worker_count() {
  const char* env = std::getenv("DGPR_WORKERS");
  if (!env) return 1;
  const int w = std::atoi(env);
  return std::clamp(w, 1, 64);
}

/// Coefficient samples on the lambda midpoint grid; one build serves every
/// direction and every delta.
struct SymbolTable {
  Eigen::ArrayXd lambda;
  double dl = 0.0;
  std::vector<Eigen::ArrayXd> f;       // d_x components of the flux derivative
  std::vector<Eigen::ArrayXd> a_diag;  // diagonal of the diffusion matrix
  Eigen::ArrayXd a_off;                // (0,1) entry when d_x == 2
  bool has_off = false;
  int d_x = 1;
};

SymbolTable build_table(const ProblemSpec& spec, int n_lambda) {
  SymbolTable t;
  t.d_x = spec.d_x;
  t.dl = (spec.M - spec.m) / n_lambda;
  t.lambda = spec.m + t.dl * (Eigen::ArrayXd::LinSpaced(n_lambda, 0, n_lambda - 1) + 0.5);
  t.f.assign(spec.d_x, Eigen::ArrayXd(n_lambda));
  t.a_diag.assign(spec.d_x, Eigen::ArrayXd(n_lambda));
  if (spec.d_x == 2) t.a_off = Eigen::ArrayXd::Zero(n_lambda);
  for (int k = 0; k < n_lambda; ++k) {
    const double lam = t.lambda[k];
    const Eigen::VectorXd fd = eval_flux_derivative(spec.flux, lam);
    const Eigen::MatrixXd a = eval_diffusion(spec.diffusion, lam);
    for (int i = 0; i < spec.d_x; ++i) {
      t.f[i][k] = fd[i];
      t.a_diag[i][k] = a(i, i);
    }
    if (spec.d_x == 2 && a(0, 1) != 0.0) {
      t.a_off[k] = a(0, 1);
      t.has_off = true;
    }
  }
  return t;
}

/// symbol(λ_k; ξ) for every table row; xi = (xi0, spatial...), |xi| = 1.
void symbol_rows(const SymbolTable& t, const Eigen::VectorXd& xi, Eigen::ArrayXd& out) {
  const double xi0 = xi[0];
  if (t.d_x == 1) {
    const double x0 = xi[1];
    out = (xi0 + t.f[0] * x0).square() + t.a_diag[0] * (x0 * x0);
  } else {
    const double x0 = xi[1], x1 = xi[2];
    out = (xi0 + t.f[0] * x0 + t.f[1] * x1).square() + t.a_diag[0] * (x0 * x0) +
          t.a_diag[1] * (x1 * x1);
    if (t.has_off) out += 2.0 * x0 * x1 * t.a_off;
  }
}

/// Scaled-condition values |⟨f|ξ⟩|² + ⟨aξ|ξ⟩² at ξ = J * unit direction.
void scaled_symbol_rows(const SymbolTable& t, const Eigen::VectorXd& xi, double J,
                        Eigen::ArrayXd& out) {
  const double xi0 = xi[0];
  Eigen::ArrayXd quad;
  if (t.d_x == 1) {
    const double x0 = xi[1];
    out = (xi0 + t.f[0] * x0).square() * (J * J);
    quad = t.a_diag[0] * (x0 * x0);
  } else {
    const double x0 = xi[1], x1 = xi[2];
    out = (xi0 + t.f[0] * x0 + t.f[1] * x1).square() * (J * J);
    quad = t.a_diag[0] * (x0 * x0) + t.a_diag[1] * (x1 * x1);
    if (t.has_off) quad += 2.0 * x0 * x1 * t.a_off;
  }
  out += (quad * (J * J)).square();
}

void require_unit(const Eigen::VectorXd& xi, int d) {
  if (xi.size() != d) {
    std::ostringstream msg;
    msg << "symbol: direction has dimension " << xi.size() << ", expected " << d;
    throw std::invalid_argument(msg.str());
  }
  if (std::abs(xi.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("symbol: direction must be normalized to |xi| = 1 within 1e-12");
}

void require_homogeneous(const ProblemSpec& spec, const char* what) {
  if (spec.heterogeneous())
    throw std::invalid_argument(std::string(what) +
                                ": heterogeneous problems have x-dependent symbols");
}

struct FitData {
  std::vector<double> log_delta, log_measure;
  int n_zero = 0;
};

FitData fit_data(const std::vector<double>& deltas, const std::vector<double>& measures) {
  FitData f;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (measures[i] > 0.0) {
      f.log_delta.push_back(std::log(deltas[i]));
      f.log_measure.push_back(std::log(measures[i]));
    } else {
      ++f.n_zero;
    }
  }
  return f;
}

}  // namespace

double symbol_value(const ProblemSpec& spec, const Eigen::VectorXd& xi, double lambda) {
  require_homogeneous(spec, "symbol_value");
  require_unit(xi, spec.symbol_dimension());
  const double tol = 1e-9 * (1.0 + std::max(std::abs(spec.m), std::abs(spec.M)));
  if (lambda < spec.m - tol || lambda > spec.M + tol)
    throw std::domain_error("symbol_value: lambda outside the state interval");
  const Eigen::VectorXd f = eval_flux_derivative(spec.flux, lambda);
  const Eigen::MatrixXd a = eval_diffusion(spec.diffusion, lambda);
  const auto xs = xi.tail(spec.d_x);
  const double conv = xi[0] + f.dot(xs);
  return conv * conv + xs.dot(a * xs);
}

double level_set_measure(const ProblemSpec& spec, const Eigen::VectorXd& xi, double delta,
                         int n_lambda) {
  require_homogeneous(spec, "level_set_measure");
  require_unit(xi, spec.symbol_dimension());
  if (!(delta > 0.0)) throw std::invalid_argument("level_set_measure: delta must be positive");
  if (n_lambda < 1000)
    throw std::invalid_argument("level_set_measure: need at least 1000 lambda cells");
  const SymbolTable t = build_table(spec, n_lambda);
  Eigen::ArrayXd sym;
  symbol_rows(t, xi, sym);
  return static_cast<double>((sym <= delta).count()) * t.dl;
}

std::vector<Eigen::VectorXd> sphere_directions(int d, int n, std::uint64_t seed) {
  if (d != 2 && d != 3) throw std::invalid_argument("sphere_directions: d must be 2 or 3");
  if (n < 2 * d) throw std::invalid_argument("sphere_directions: too few directions");
  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(n);
  for (int i = 0; i < d; ++i) dirs.push_back(Eigen::VectorXd::Unit(d, i));
  if (d == 2) {
    const double rot = uniform01(rng);
    const int m = n - 2;
    for (int k = 0; k < m; ++k) {
      const double th = M_PI * (k + rot) / m;
      dirs.push_back((Eigen::VectorXd(2) << std::cos(th), std::sin(th)).finished());
    }
    return dirs;
  }
  // d == 3: coordinate-plane rings catch symbols whose degeneracy sits on a
  // coordinate circle; the low-discrepancy bulk covers everything else.
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  int m_ring = std::max(16, n / 8);
  m_ring = std::min(m_ring, (n - 3) / 4);
  for (const auto& pr : pairs) {
    const double rot = uniform01(rng);
    for (int k = 0; k < m_ring; ++k) {
      const double th = M_PI * (k + rot) / m_ring;
      Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
      v[pr[0]] = std::cos(th);
      v[pr[1]] = std::sin(th);
      dirs.push_back(v);
    }
  }
  const int bulk = n - static_cast<int>(dirs.size());
  const double rot1 = uniform01(rng), rot2 = uniform01(rng);
  // additive recurrence driven by the plastic constant (2D Kronecker set)
  const double g = 1.32471795724474602596;
  const double a1 = 1.0 / g, a2 = 1.0 / (g * g);
  for (int k = 0; k < bulk; ++k) {
    const double u1 = std::fmod(0.5 + a1 * (k + 1) + rot1, 1.0);
    const double u2 = std::fmod(0.5 + a2 * (k + 1) + rot2, 1.0);
    const double z = u1;  // area-uniform on the upper hemisphere
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * M_PI * u2;
    dirs.push_back(
        (Eigen::VectorXd(3) << rho * std::cos(phi), rho * std::sin(phi), z).finished());
  }
  for (auto& v : dirs) v.normalize();
  return dirs;
}

namespace {

struct SupAccumulator {
  std::vector<double> sup;
  std::vector<int> arg;
  explicit SupAccumulator(std::size_t n) : sup(n, -1.0), arg(n, -1) {}
  void absorb(const SupAccumulator& other) {
    for (std::size_t i = 0; i < sup.size(); ++i) {
      if (other.sup[i] > sup[i]) {
        sup[i] = other.sup[i];
        arg[i] = other.arg[i];
      }
    }
  }
};

/// sup over directions of the per-delta measures; thresholds must ascend.
/// Work is chunked so multi-worker runs merge in deterministic order.
template <class Rows>
SupAccumulator sup_measures(const SymbolTable& table, const std::vector<Eigen::VectorXd>& dirs,
                            const std::vector<double>& thresholds, Rows&& rows) {
  const int n_dirs = static_cast<int>(dirs.size());
  const int workers = std::min(worker_count(), n_dirs);
  const int chunk = 64;
  const int n_chunks = (n_dirs + chunk - 1) / chunk;
  std::vector<SupAccumulator> partial(n_chunks, SupAccumulator(thresholds.size()));

  auto run_chunk = [&](int ck) {
    Eigen::ArrayXd sym(table.lambda.size());
    SupAccumulator& acc = partial[ck];
    const int lo = ck * chunk, hi = std::min(n_dirs, lo + chunk);
    for (int di = lo; di < hi; ++di) {
      rows(table, dirs[di], sym);
      for (std::size_t q = 0; q < thresholds.size(); ++q) {
        const double measure = static_cast<double>((sym <= thresholds[q]).count()) * table.dl;
        if (measure > acc.sup[q]) {
          acc.sup[q] = measure;
          acc.arg[q] = di;
        }
      }
    }
  };

  if (workers <= 1) {
    for (int ck = 0; ck < n_chunks; ++ck) run_chunk(ck);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int ck = w; ck < n_chunks; ck += workers) run_chunk(ck);
      });
    for (auto& th : pool) th.join();
  }

  SupAccumulator total(thresholds.size());
  for (const auto& acc : partial) total.absorb(acc);
  return total;
}

}  // namespace

NondegReport estimate_alpha(const ProblemSpec& spec, const NondegOptions& opt) {
  require_homogeneous(spec, "estimate_alpha");
  if (opt.n_sphere < 1000)
    throw std::invalid_argument("estimate_alpha: need at least 1000 sphere directions");
  if (opt.n_lambda < 1000)
    throw std::invalid_argument("estimate_alpha: need at least 1000 lambda cells");
  if (!(opt.delta_min > 0.0) || !(opt.delta_max > opt.delta_min))
    throw std::invalid_argument("estimate_alpha: need 0 < delta_min < delta_max");
  if (opt.n_delta < 2) throw std::invalid_argument("estimate_alpha: need at least 2 deltas");

  NondegReport rep;
  rep.delta = geometric_sequence(opt.delta_min, opt.delta_max, opt.n_delta);
  rep.n_sphere = opt.n_sphere;
  rep.n_lambda = opt.n_lambda;
  rep.seed = opt.seed;
  rep.lambda_cell = (spec.M - spec.m) / opt.n_lambda;

  const auto dirs = sphere_directions(spec.symbol_dimension(), opt.n_sphere, opt.seed);
  const SymbolTable table = build_table(spec, opt.n_lambda);
  const auto acc = sup_measures(table, dirs, rep.delta,
                                [](const SymbolTable& t, const Eigen::VectorXd& xi,
                                   Eigen::ArrayXd& out) { symbol_rows(t, xi, out); });

  rep.sup_measure = acc.sup;
  for (std::size_t q = 0; q < rep.delta.size(); ++q)
    rep.argmax_xi.push_back(acc.arg[q] >= 0 ? dirs[acc.arg[q]] : Eigen::VectorXd::Zero(spec.symbol_dimension()));

  const FitData fd = fit_data(rep.delta, rep.sup_measure);
  rep.n_zero_measures = fd.n_zero;
  if (fd.log_delta.empty()) {
    rep.elliptic = true;
    rep.alpha_hat = kInf;
    rep.r_squared = 0.0;
    return rep;
  }
  if (fd.log_delta.size() < 2)
    throw std::runtime_error("estimate_alpha: fewer than 2 nonzero measures; widen the delta range");
  const LinearFit fit = fit_line(fd.log_delta, fd.log_measure);
  rep.alpha_hat = fit.slope;
  rep.r_squared = fit.r_squared;
  return rep;
}

ImplicationReport check_condition_implication(const ProblemSpec& spec, const std::vector<int>& J,
                                              double beta, const std::vector<double>& deltas,
                                              const NondegOptions& opt, double tolerance) {
  require_homogeneous(spec, "check_condition_implication");
  if (J.empty()) throw std::invalid_argument("check_condition_implication: empty J list");
  for (int j : J)
    if (j < 1 || (j & (j - 1)) != 0)
      throw std::invalid_argument("check_condition_implication: J entries must be dyadic (1, 2, 4, ...)");
  if (deltas.size() < 2)
    throw std::invalid_argument("check_condition_implication: need at least 2 deltas");
  for (std::size_t i = 0; i < deltas.size(); ++i)
    if (!(deltas[i] > 0.0) || (i > 0 && !(deltas[i] > deltas[i - 1])))
      throw std::invalid_argument("check_condition_implication: deltas must be positive ascending");
  if (!(beta >= 0.0)) throw std::invalid_argument("check_condition_implication: beta must be >= 0");

  ImplicationReport rep;
  rep.J = J;
  rep.beta = beta;
  rep.tolerance = tolerance;

  const auto dirs = sphere_directions(spec.symbol_dimension(), opt.n_sphere, opt.seed);
  const SymbolTable table = build_table(spec, opt.n_lambda);
  std::vector<double> thresholds(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) thresholds[i] = deltas[i] * deltas[i];

  std::vector<double> finite_slopes;
  for (int j : J) {
    const double Jd = static_cast<double>(j);
    const auto acc =
        sup_measures(table, dirs, thresholds,
                     [Jd](const SymbolTable& t, const Eigen::VectorXd& xi, Eigen::ArrayXd& out) {
                       scaled_symbol_rows(t, xi, Jd, out);
                     });
    const FitData fd = fit_data(deltas, acc.sup);
    if (fd.log_delta.size() < 2) {
      rep.slope_tt.push_back(kInf);
    } else {
      const LinearFit fit = fit_line(fd.log_delta, fd.log_measure);
      rep.slope_tt.push_back(fit.slope);
      finite_slopes.push_back(fit.slope);
    }
  }

  if (finite_slopes.empty()) {
    rep.alpha_tt = kInf;
    rep.tt_elliptic = true;
  } else {
    std::sort(finite_slopes.begin(), finite_slopes.end());
    rep.alpha_tt = finite_slopes[finite_slopes.size() / 2];
  }

  rep.alpha_stand = estimate_alpha(spec, opt).alpha_hat;
  if (std::isinf(rep.alpha_stand)) {
    rep.holds = true;
  } else if (std::isinf(rep.alpha_tt)) {
    rep.holds = false;
  } else {
    rep.holds = rep.alpha_stand >= 0.5 * rep.alpha_tt - tolerance;
  }
  return rep;
}

}  // namespace dgpr
