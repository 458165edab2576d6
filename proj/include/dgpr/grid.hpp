#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "dgpr/problem.hpp"

namespace dgpr {

/// Uniform cell-centered periodic box. Cell counts are powers of two and
/// at least 16 per axis so fields can be handed to the dyadic analysis
/// without resampling.
struct Grid {
  int d_x = 1;
  std::array<int, 2> cells = {16, 1};
  std::array<double, 2> lo = {0.0, 0.0};
  std::array<double, 2> hi = {1.0, 1.0};
  double safety = 0.4;  // CFL safety factor in (0, 1)

  static Grid make_1d(int n, double lo, double hi, double safety = 0.4);
  static Grid make_2d(int nx, int ny, double lo_x, double hi_x, double lo_y, double hi_y,
                      double safety = 0.4);

  int total_cells() const { return cells[0] * cells[1]; }
  double extent(int ax) const { return hi[ax] - lo[ax]; }
  double dx(int ax) const { return extent(ax) / cells[ax]; }
  double cell_volume() const {
    double v = dx(0);
    if (d_x == 2) v *= dx(1);
    return v;
  }
  /// Cell-center coordinate along an axis.
  double coord(int ax, int i) const { return lo[ax] + (i + 0.5) * dx(ax); }
  int index(int i, int j = 0) const { return i + cells[0] * j; }

  bool same_layout(const Grid& other) const {
    return d_x == other.d_x && cells == other.cells && lo == other.lo && hi == other.hi;
  }
};

/// Scalar field sampled at cell centers, stored flat (x fastest).
struct Field {
  Grid grid;
  Eigen::ArrayXd values;

  Field() = default;
  explicit Field(const Grid& g) : grid(g), values(Eigen::ArrayXd::Zero(g.total_cells())) {}

  double& operator()(int i, int j = 0) { return values[grid.index(i, j)]; }
  double operator()(int i, int j = 0) const { return values[grid.index(i, j)]; }
};

/// Saved states of one evolution run.
struct Trajectory {
  Grid grid;
  double epsilon = 0.0;  // artificial viscosity used for the run
  double m = 0.0, M = 0.0;
  std::string problem_name;
  std::vector<double> times;
  std::vector<Eigen::ArrayXd> frames;
  long steps_taken = 0;
  double dt = 0.0;

  Field frame_field(std::size_t k) const {
    Field f(grid);
    f.values = frames.at(k);
    return f;
  }
};

double l1_norm(const Field& f);
double l2_norm(const Field& f);
double linf_norm(const Field& f);
double mass(const Field& f);

/// Realize a named initial-datum descriptor on a grid. The barenblatt
/// profile needs the owning problem for its exponent.
Field make_initial_data(const Grid& grid, const InitialData& init, const ProblemSpec& spec);

}  // namespace dgpr
