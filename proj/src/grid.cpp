#include "dgpr/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace dgpr {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_axis(int n, double lo, double hi) {
  if (!power_of_two(n) || n < 16)
    throw std::invalid_argument("Grid: cell count must be a power of two >= 16");
  if (!(hi > lo)) throw std::invalid_argument("Grid: box must have positive extent");
}

void validate_safety(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("Grid: CFL safety must lie in (0, 1)");
}

}  // namespace

Grid Grid::make_1d(int n, double lo, double hi, double safety) {
  validate_axis(n, lo, hi);
  validate_safety(safety);
  Grid g;
  g.d_x = 1;
  g.cells = {n, 1};
  g.lo = {lo, 0.0};
  g.hi = {hi, 1.0};
  g.safety = safety;
  return g;
}

Grid Grid::make_2d(int nx, int ny, double lo_x, double hi_x, double lo_y, double hi_y,
                   double safety) {
  validate_axis(nx, lo_x, hi_x);
  validate_axis(ny, lo_y, hi_y);
  validate_safety(safety);
  Grid g;
  g.d_x = 2;
  g.cells = {nx, ny};
  g.lo = {lo_x, lo_y};
  g.hi = {hi_x, hi_y};
  g.safety = safety;
  return g;
}

double l1_norm(const Field& f) { return f.values.abs().sum() * f.grid.cell_volume(); }

double l2_norm(const Field& f) {
  return std::sqrt(f.values.square().sum() * f.grid.cell_volume());
}

double linf_norm(const Field& f) { return f.values.abs().maxCoeff(); }

double mass(const Field& f) { return f.values.sum() * f.grid.cell_volume(); }

Field make_initial_data(const Grid& grid, const InitialData& init, const ProblemSpec& spec) {
  Field f(grid);
  auto radius2 = [&](int i, int j) {
    const double dx = grid.coord(0, i) - init.center_x;
    if (grid.d_x == 1) return dx * dx;
    const double dy = grid.coord(1, j) - init.center_y;
    return dx * dx + dy * dy;
  };
  for (int j = 0; j < grid.cells[1]; ++j) {
    for (int i = 0; i < grid.cells[0]; ++i) {
      double v = 0.0;
      if (init.profile == "constant") {
        v = init.value;
      } else if (init.profile == "riemann") {
        v = (grid.coord(0, i) < init.jump) ? init.left : init.right;
      } else if (init.profile == "gaussian") {
        v = init.baseline +
            init.amplitude * std::exp(-0.5 * radius2(i, j) / (init.width * init.width));
      } else if (init.profile == "bump") {
        const double r2 = radius2(i, j) / (init.width * init.width);
        v = init.baseline + ((r2 < 1.0) ? init.amplitude * std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0);
      } else if (init.profile == "sine") {
        double s = 0.5 + 0.5 * std::sin(2.0 * M_PI * (grid.coord(0, i) - grid.lo[0]) / grid.extent(0));
        if (grid.d_x == 2)
          s *= 0.5 + 0.5 * std::sin(2.0 * M_PI * (grid.coord(1, j) - grid.lo[1]) / grid.extent(1));
        v = init.baseline + init.amplitude * s;
      } else if (init.profile == "barenblatt") {
        if (grid.d_x != 1)
          throw std::invalid_argument("make_initial_data: barenblatt profile is 1D only");
        v = barenblatt_value(spec.m_pm, init.mass, init.t0, grid.coord(0, i));
      } else {
        throw std::invalid_argument("make_initial_data: unknown profile '" + init.profile + "'");
      }
      f(i, j) = v;
    }
  }
  const double tol = 1e-9 * (1.0 + std::max(std::abs(spec.m), std::abs(spec.M)));
  if (f.values.minCoeff() < spec.m - tol || f.values.maxCoeff() > spec.M + tol)
    throw std::invalid_argument("make_initial_data: datum leaves the state interval [m, M]");
  return f;
}

}  // namespace dgpr
