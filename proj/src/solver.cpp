#include "dgpr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "dgpr/util.hpp"

namespace dgpr {

namespace {

// x^n elementwise for small integer n >= 0, avoiding std::pow in the hot loop
Eigen::ArrayXd ipow_arr(const Eigen::ArrayXd& x, int n) {
  Eigen::ArrayXd r = Eigen::ArrayXd::Ones(x.size());
  Eigen::ArrayXd base = x;
  while (n > 0) {
    if (n & 1) r *= base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return r;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

// out(i, j) = v(i + off, j) along ax 0 or v(i, j + off) along ax 1, periodic
void shifted(const Eigen::ArrayXd& v, const Grid& g, int ax, int off, Eigen::ArrayXd& out) {
  const int nx = g.cells[0], ny = g.cells[1];
  out.resize(v.size());
  if (ax == 0) {
    for (int j = 0; j < ny; ++j) {
      const int base = nx * j;
      if (off == 1) {
        out.segment(base, nx - 1) = v.segment(base + 1, nx - 1);
        out[base + nx - 1] = v[base];
      } else {
        out.segment(base + 1, nx - 1) = v.segment(base, nx - 1);
        out[base] = v[base + nx - 1];
      }
    }
  } else {
    const int bulk = nx * (ny - 1);
    if (off == 1) {
      out.segment(0, bulk) = v.segment(nx, bulk);
      out.segment(bulk, nx) = v.segment(0, nx);
    } else {
      out.segment(nx, bulk) = v.segment(0, bulk);
      out.segment(0, nx) = v.segment(bulk, nx);
    }
  }
}

int segment_of(const Eigen::ArrayXd& nodes, double x) {
  const double* beg = nodes.data();
  const double* end = beg + nodes.size();
  int j = static_cast<int>(std::upper_bound(beg, end, x) - beg) - 1;
  return std::clamp(j, 0, static_cast<int>(nodes.size()) - 2);
}

/// One axis of the convective flux, prepared for whole-field evaluation.
struct FluxAxisCtx {
  bool active = false;
  FluxKind kind = FluxKind::zero;

  double coef = 0.0;  // polynomial: f = coef λ^pw, 𝔣 = coef λ^{pw+1}/(pw+1)
  int pw = 0;

  Eigen::ArrayXd nodes, fvals, slopes;  // tabulated: 𝔣 samples, f = segment slope

  std::unique_ptr<FluxAxisCtx> lo_side, hi_side;       // piecewise in x
  Eigen::Array<bool, Eigen::Dynamic, 1> mask;          // piecewise: x < x_jump
  double speed_bound = 0.0;                            // sup |f| over the data range

  void eval_big_f(const Eigen::ArrayXd& u, Eigen::ArrayXd& out) const {
    switch (kind) {
      case FluxKind::zero:
        out.setZero(u.size());
        return;
      case FluxKind::polynomial_power:
        out = (coef / (pw + 1)) * ipow_arr(u, pw + 1);
        return;
      case FluxKind::tabulated: {
        out.resize(u.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) {
          const int j = segment_of(nodes, u[i]);
          out[i] = fvals[j] + slopes[j] * (u[i] - nodes[j]);
        }
        return;
      }
      case FluxKind::piecewise_in_x: {
        Eigen::ArrayXd lo_v, hi_v;
        lo_side->eval_big_f(u, lo_v);
        hi_side->eval_big_f(u, hi_v);
        out = mask.select(lo_v, hi_v);
        return;
      }
    }
  }

  void eval_speed(const Eigen::ArrayXd& u, Eigen::ArrayXd& out) const {
    switch (kind) {
      case FluxKind::zero:
        out.setZero(u.size());
        return;
      case FluxKind::polynomial_power:
        out = std::abs(coef) * ipow_arr(u.abs(), pw);
        return;
      case FluxKind::tabulated: {
        out.resize(u.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = std::abs(slopes[segment_of(nodes, u[i])]);
        return;
      }
      case FluxKind::piecewise_in_x: {
        Eigen::ArrayXd lo_v, hi_v;
        lo_side->eval_speed(u, lo_v);
        hi_side->eval_speed(u, hi_v);
        out = mask.select(lo_v, hi_v);
        return;
      }
    }
  }
};

FluxAxisCtx build_flux_axis(const FluxModel& fm, int ax, const Grid& grid, double lo_u,
                            double hi_u, bool allow_piecewise) {
  FluxAxisCtx ctx;
  ctx.kind = fm.kind;
  switch (fm.kind) {
    case FluxKind::zero:
      break;
    case FluxKind::polynomial_power:
      ctx.coef = fm.coef[ax];
      ctx.pw = fm.power[ax];
      ctx.active = ctx.coef != 0.0;
      ctx.speed_bound = std::abs(ctx.coef) * ipow(std::max(std::abs(lo_u), std::abs(hi_u)), ctx.pw);
      break;
    case FluxKind::tabulated: {
      ctx.nodes = fm.lambda_nodes;
      ctx.fvals = fm.values.col(ax);
      const Eigen::Index ns = ctx.nodes.size() - 1;
      ctx.slopes.resize(ns);
      for (Eigen::Index k = 0; k < ns; ++k)
        ctx.slopes[k] = (ctx.fvals[k + 1] - ctx.fvals[k]) / (ctx.nodes[k + 1] - ctx.nodes[k]);
      ctx.active = true;
      ctx.speed_bound = ctx.slopes.abs().maxCoeff();
      break;
    }
    case FluxKind::piecewise_in_x: {
      if (!allow_piecewise)
        throw std::invalid_argument("nested piecewise flux models are not supported by solve");
      ctx.lo_side = std::make_unique<FluxAxisCtx>(
          build_flux_axis(*fm.left, ax, grid, lo_u, hi_u, false));
      ctx.hi_side = std::make_unique<FluxAxisCtx>(
          build_flux_axis(*fm.right, ax, grid, lo_u, hi_u, false));
      ctx.mask.resize(grid.total_cells());
      for (int j = 0; j < grid.cells[1]; ++j)
        for (int i = 0; i < grid.cells[0]; ++i)
          ctx.mask[grid.index(i, j)] = grid.coord(0, i) < fm.x_jump;
      ctx.active = ctx.lo_side->active || ctx.hi_side->active;
      ctx.speed_bound = std::max(ctx.lo_side->speed_bound, ctx.hi_side->speed_bound);
      break;
    }
  }
  return ctx;
}

/// One diagonal entry of the diffusion, prepared for whole-field evaluation
/// of the primitive A (A' = a, A(0) = 0).
struct DiffAxisCtx {
  bool active = false;
  DiffusionKind kind = DiffusionKind::zero;

  double coef = 0.0, power = 0.0;  // diagonal power model
  bool int_power = false;
  int pw1 = 0;  // power + 1 when integral

  double lin = 0.0;  // constant matrix: a_kk, so A = a_kk λ

  Eigen::ArrayXd nodes, avals, slopes, a_nodes;  // tabulated, a_nodes = A at the nodes
  double a_bound = 0.0;                          // sup a over the data range

  void eval_primitive(const Eigen::ArrayXd& u, Eigen::ArrayXd& out) const {
    switch (kind) {
      case DiffusionKind::zero:
        out.setZero(u.size());
        return;
      case DiffusionKind::diagonal_power:
        if (int_power)
          out = (coef / pw1) * u.sign() * ipow_arr(u.abs(), pw1);
        else
          out = (coef / (power + 1.0)) * u.sign() * u.abs().pow(power + 1.0);
        return;
      case DiffusionKind::constant_matrix:
        out = lin * u;
        return;
      case DiffusionKind::tabulated: {
        out.resize(u.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) {
          const int j = segment_of(nodes, u[i]);
          const double dl = u[i] - nodes[j];
          const double a_u = avals[j] + slopes[j] * dl;
          out[i] = a_nodes[j] + 0.5 * dl * (avals[j] + a_u);
        }
        return;
      }
    }
  }
};

DiffAxisCtx build_diff_axis(const DiffusionModel& dm, int ax, double lo_u, double hi_u) {
  DiffAxisCtx ctx;
  ctx.kind = dm.kind;
  switch (dm.kind) {
    case DiffusionKind::zero:
      break;
    case DiffusionKind::diagonal_power: {
      ctx.coef = dm.coef[ax];
      ctx.power = dm.power[ax];
      ctx.int_power = ctx.power == std::floor(ctx.power) && ctx.power < 30.0;
      ctx.pw1 = static_cast<int>(ctx.power) + 1;
      ctx.active = ctx.coef != 0.0;
      ctx.a_bound =
          ctx.coef * std::pow(std::max(std::abs(lo_u), std::abs(hi_u)), ctx.power);
      break;
    }
    case DiffusionKind::constant_matrix:
      ctx.lin = dm.constant(ax, ax);
      ctx.active = ctx.lin != 0.0;
      ctx.a_bound = ctx.lin;
      break;
    case DiffusionKind::tabulated: {
      ctx.nodes = dm.lambda_nodes;
      ctx.avals = dm.diag_values.col(ax);
      const Eigen::Index ns = ctx.nodes.size() - 1;
      ctx.slopes.resize(ns);
      Eigen::ArrayXd cum(ctx.nodes.size());
      cum[0] = 0.0;
      for (Eigen::Index k = 0; k < ns; ++k) {
        ctx.slopes[k] = (ctx.avals[k + 1] - ctx.avals[k]) / (ctx.nodes[k + 1] - ctx.nodes[k]);
        cum[k + 1] = cum[k] + 0.5 * (ctx.nodes[k + 1] - ctx.nodes[k]) * (ctx.avals[k] + ctx.avals[k + 1]);
      }
      // anchor the primitive at clamp(0, node range), matching the scalar path
      const double anchor = std::clamp(0.0, ctx.nodes[0], ctx.nodes[ctx.nodes.size() - 1]);
      const int ja = segment_of(ctx.nodes, anchor);
      const double dl = anchor - ctx.nodes[ja];
      const double a_anchor = ctx.avals[ja] + ctx.slopes[ja] * dl;
      const double cum_anchor = cum[ja] + 0.5 * dl * (ctx.avals[ja] + a_anchor);
      ctx.a_nodes = cum - cum_anchor;
      ctx.active = (ctx.avals != 0.0).any();
      ctx.a_bound = ctx.avals.maxCoeff();
      break;
    }
  }
  return ctx;
}

}  // namespace

Trajectory solve(const ProblemSpec& spec, const Grid& grid, const Field& u0,
                 const SolveOptions& opt) {
  if (grid.d_x != spec.d_x) throw std::invalid_argument("grid dimension does not match problem");
  if (!u0.grid.same_layout(grid)) throw std::invalid_argument("initial datum lives on a different grid");
  if (opt.epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  if (!(opt.t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (u0.values.hasNaN()) throw std::runtime_error("NaN detected at step 0");

  const double range_slop = 1e-9 * (1.0 + std::max(std::abs(spec.m), std::abs(spec.M)));
  if (u0.values.minCoeff() < spec.m - range_slop || u0.values.maxCoeff() > spec.M + range_slop)
    throw std::invalid_argument("initial datum leaves the state interval");

  std::vector<double> targets = opt.save_times;
  if (targets.empty()) targets.push_back(opt.t_end);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (!(targets[k] > 0.0) || targets[k] > opt.t_end * (1.0 + 1e-12))
      throw std::invalid_argument("save times must lie in (0, t_end]");
    if (k > 0 && targets[k] <= targets[k - 1])
      throw std::invalid_argument("save times must be strictly ascending");
  }

  if (spec.diffusion.kind == DiffusionKind::constant_matrix && grid.d_x == 2) {
    const double scale = spec.diffusion.constant.cwiseAbs().maxCoeff();
    if (std::abs(spec.diffusion.constant(0, 1)) > 1e-14 * (1.0 + scale))
      throw std::invalid_argument("off-diagonal diffusion is not supported by the split scheme");
  }

  const double lo_u = u0.values.minCoeff(), hi_u = u0.values.maxCoeff();

  std::vector<FluxAxisCtx> flux_ax;
  std::vector<DiffAxisCtx> diff_ax;
  double rate = 0.0;
  for (int ax = 0; ax < grid.d_x; ++ax) {
    flux_ax.push_back(build_flux_axis(spec.flux, ax, grid, lo_u, hi_u, true));
    diff_ax.push_back(build_diff_axis(spec.diffusion, ax, lo_u, hi_u));
    rate += flux_ax[ax].speed_bound / grid.dx(ax);
    rate += 2.0 * (diff_ax[ax].a_bound + opt.epsilon) / (grid.dx(ax) * grid.dx(ax));
  }

  const double dt = rate > 0.0 ? grid.safety / rate : opt.t_end;
  if (dt < 1e-12 * opt.t_end) {
    std::ostringstream msg;
    msg << "stable step " << dt << " is below 1e-12 * t_end = " << 1e-12 * opt.t_end
        << "; configuration infeasible";
    throw config_error(msg.str());
  }

  Trajectory traj;
  traj.grid = grid;
  traj.epsilon = opt.epsilon;
  traj.m = spec.m;
  traj.M = spec.M;
  traj.problem_name = spec.name;
  traj.dt = dt;
  traj.times.push_back(0.0);
  traj.frames.push_back(u0.values);

  const Eigen::Index n = grid.total_cells();
  Eigen::ArrayXd u = u0.values, unew(n);
  Eigen::ArrayXd up(n), um(n), fc(n), fp(n), fh(n), fm_(n), sc(n), sp(n), ac(n), ap(n), am(n);

  double t = 0.0;
  long steps = 0;
  for (double target : targets) {
    while (t < target - 1e-14 * opt.t_end) {
      const double step = std::min(dt, target - t);
      unew = u;
      for (int ax = 0; ax < grid.d_x; ++ax) {
        const double rdx = step / grid.dx(ax);
        const double rdx2 = rdx / grid.dx(ax);
        if (flux_ax[ax].active || opt.epsilon > 0.0) {
          shifted(u, grid, ax, +1, up);
          shifted(u, grid, ax, -1, um);
        }
        if (flux_ax[ax].active) {
          flux_ax[ax].eval_big_f(u, fc);
          flux_ax[ax].eval_speed(u, sc);
          shifted(fc, grid, ax, +1, fp);
          shifted(sc, grid, ax, +1, sp);
          fh = 0.5 * (fc + fp) - 0.5 * sc.max(sp) * (up - u);
          shifted(fh, grid, ax, -1, fm_);
          unew -= rdx * (fh - fm_);
        }
        if (diff_ax[ax].active) {
          diff_ax[ax].eval_primitive(u, ac);
          shifted(ac, grid, ax, +1, ap);
          shifted(ac, grid, ax, -1, am);
          unew += rdx2 * (ap - 2.0 * ac + am);
        }
        if (opt.epsilon > 0.0) unew += (opt.epsilon * rdx2) * (up - 2.0 * u + um);
      }
      u.swap(unew);
      ++steps;
      if (u.hasNaN()) throw std::runtime_error("NaN detected at step " + std::to_string(steps));
      t += step;
    }
    t = target;
    traj.times.push_back(target);
    traj.frames.push_back(u);
  }
  traj.steps_taken = steps;
  return traj;
}

Eigen::ArrayXXd kinetic_function(const Field& u, const Eigen::ArrayXd& lambda_grid) {
  if (lambda_grid.size() < 1) throw std::invalid_argument("lambda grid must be non-empty");
  Eigen::ArrayXXd h(u.values.size(), lambda_grid.size());
  for (Eigen::Index k = 0; k < lambda_grid.size(); ++k)
    h.col(k) = (u.values > lambda_grid[k]).cast<double>() - (u.values < lambda_grid[k]).cast<double>();
  return h;
}

Field velocity_average(const Field& u, const Eigen::ArrayXd& lambda_grid,
                       const Eigen::ArrayXd& rho) {
  const Eigen::Index nk = lambda_grid.size();
  if (nk < 2) throw std::invalid_argument("lambda grid needs at least two nodes");
  if (rho.size() != nk) throw std::invalid_argument("rho samples must match the lambda grid");
  for (Eigen::Index k = 0; k + 1 < nk; ++k)
    if (!(lambda_grid[k + 1] > lambda_grid[k]))
      throw std::invalid_argument("lambda grid must be strictly ascending");

  // suffix[k] = ∫_{λ_k}^{λ_end} of the piecewise-linear interpolant of rho
  Eigen::ArrayXd suffix(nk);
  suffix[nk - 1] = 0.0;
  for (Eigen::Index k = nk - 2; k >= 0; --k)
    suffix[k] = suffix[k + 1] + 0.5 * (lambda_grid[k + 1] - lambda_grid[k]) * (rho[k] + rho[k + 1]);
  const double total = suffix[0];

  Field out(u.grid);
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    const double v = u.values[i];
    double above;  // ∫_{v}^{λ_end}, where h = -1
    if (v <= lambda_grid[0]) {
      above = total;
    } else if (v >= lambda_grid[nk - 1]) {
      above = 0.0;
    } else {
      const int j = segment_of(lambda_grid, v);
      const double len = lambda_grid[j + 1] - lambda_grid[j];
      const double rho_v = rho[j] + (rho[j + 1] - rho[j]) * (v - lambda_grid[j]) / len;
      above = suffix[j + 1] + 0.5 * (lambda_grid[j + 1] - v) * (rho_v + rho[j + 1]);
    }
    out.values[i] = total - 2.0 * above;
  }
  return out;
}

Field velocity_average(const Eigen::ArrayXXd& h, const Grid& grid,
                       const Eigen::ArrayXd& lambda_grid, const Eigen::ArrayXd& rho) {
  if (h.rows() != grid.total_cells()) throw std::invalid_argument("kinetic array does not match the grid");
  if (h.cols() != lambda_grid.size() || rho.size() != lambda_grid.size())
    throw std::invalid_argument("kinetic array, lambda grid and rho must agree in size");
  const Eigen::ArrayXd w = trapezoid_weights(lambda_grid) * rho;
  Field out(grid);
  out.values = (h.matrix() * w.matrix()).array();
  return out;
}

Field kinetic_average_closed_form(const Field& u, double m, double M) {
  if (!(M > m)) throw std::invalid_argument("state interval must be nondegenerate");
  Field out(u.grid);
  out.values = 2.0 * u.values - m - M;
  return out;
}

Field velocity_average_indicator(const Field& u, double m, double M, int n_lambda) {
  if (n_lambda < 1000) throw std::invalid_argument("indicator average needs at least 1000 lambda nodes");
  const Eigen::ArrayXd lambda_grid = Eigen::ArrayXd::LinSpaced(n_lambda, m, M);
  const Field quad = velocity_average(u, lambda_grid, Eigen::ArrayXd::Ones(n_lambda));
  Field closed = kinetic_average_closed_form(u, m, M);
  const double gap = (quad.values - closed.values).abs().maxCoeff();
  if (gap > 1e-9) {
    std::ostringstream msg;
    msg << "kinetic identity violated: quadrature deviates from 2u - m - M by " << gap;
    throw std::runtime_error(msg.str());
  }
  return closed;
}

std::vector<Trajectory> viscosity_sweep(const ProblemSpec& spec, const Grid& grid, const Field& u0,
                                        const std::vector<double>& epsilons,
                                        const SolveOptions& opt) {
  if (epsilons.empty()) throw std::invalid_argument("viscosity sweep needs at least one epsilon");
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    if (epsilons[k] < 0.0) throw std::invalid_argument("viscosities must be >= 0");
    if (k > 0 && epsilons[k] >= epsilons[k - 1])
      throw std::invalid_argument("viscosities must be strictly decreasing");
  }
  std::vector<Trajectory> sweep;
  sweep.reserve(epsilons.size());
  for (double eps : epsilons) {
    SolveOptions run = opt;
    run.epsilon = eps;
    sweep.push_back(solve(spec, grid, u0, run));
  }
  return sweep;
}

CompactnessReport compactness_diagnostic(const ProblemSpec& spec,
                                         const std::vector<Trajectory>& sweep) {
  if (sweep.size() < 2) throw std::invalid_argument("compactness diagnostic needs at least two runs");
  const std::size_t nt = sweep[0].times.size();
  for (const Trajectory& traj : sweep) {
    if (!traj.grid.same_layout(sweep[0].grid) || traj.times != sweep[0].times)
      throw std::invalid_argument("sweep trajectories must share grid and save times");
  }
  CompactnessReport report;
  report.times = sweep[0].times;
  for (const Trajectory& traj : sweep) report.epsilons.push_back(traj.epsilon);
  report.pair_l1.resize(nt, sweep.size() - 1);
  for (std::size_t k = 0; k + 1 < sweep.size(); ++k) {
    for (std::size_t s = 0; s < nt; ++s) {
      const Field va = kinetic_average_closed_form(sweep[k].frame_field(s), spec.m, spec.M);
      const Field vb = kinetic_average_closed_form(sweep[k + 1].frame_field(s), spec.m, spec.M);
      Field diff(va.grid);
      diff.values = va.values - vb.values;
      report.pair_l1(s, k) = l1_norm(diff);
    }
  }
  return report;
}

DissipationReport dissipation_diagnostic(const ProblemSpec& spec, const Trajectory& traj) {
  const Grid& grid = traj.grid;
  const int d = grid.d_x;
  DissipationReport report;
  report.times = traj.times;
  report.b_norms.resize(traj.times.size(), d);

  Eigen::ArrayXd wp, wm;
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    const Eigen::ArrayXd& u = traj.frames[s];
    // S(i; r, k) = ∫₀^{u_i} sigma_{rk}, assembled per component
    std::vector<Eigen::ArrayXd> scomp(static_cast<std::size_t>(d) * d,
                                      Eigen::ArrayXd::Zero(u.size()));
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const Eigen::MatrixXd sp = eval_sigma_primitive(spec.diffusion, u[i]);
      for (int r = 0; r < d; ++r)
        for (int k = 0; k < d; ++k) scomp[static_cast<std::size_t>(r) * d + k][i] = sp(r, k);
    }
    for (int k = 0; k < d; ++k) {
      Eigen::ArrayXd b = Eigen::ArrayXd::Zero(u.size());
      for (int r = 0; r < d; ++r) {
        const Eigen::ArrayXd& w = scomp[static_cast<std::size_t>(r) * d + k];
        shifted(w, grid, r, +1, wp);
        shifted(w, grid, r, -1, wm);
        b += (wp - wm) / (2.0 * grid.dx(r));
      }
      Field bf(grid);
      bf.values = b;
      report.b_norms(static_cast<Eigen::Index>(s), k) = l2_norm(bf);
    }
  }
  return report;
}

}  // namespace dgpr
