#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "dgpr/grid.hpp"
#include "dgpr/spectral.hpp"
#include "dgpr/util.hpp"

using namespace dgpr;

namespace {

Field random_field(const Grid& grid, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  Field f(grid);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = uniform(rng, lo, hi);
  return f;
}

// real 1D field on the unit box with |ghat(k)| = |k|^{-beta} and seeded phases
Field synthetic_power_field(const Grid& grid, double beta, std::uint64_t seed) {
  const int n = grid.cells[0];
  std::mt19937_64 rng(seed);
  std::vector<std::complex<double>> ghat(n, {0.0, 0.0});
  for (int k = 1; k < n / 2; ++k) {
    const double mag = std::pow(static_cast<double>(k) / grid.extent(0), -beta);
    const double phase = uniform(rng, 0.0, 2.0 * M_PI);
    ghat[k] = std::polar(mag, phase);
    ghat[n - k] = std::conj(ghat[k]);
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out(n);
  fft.inv(out, ghat);
  Field f(grid);
  for (int i = 0; i < n; ++i) f.values[i] = out[i].real();
  return f;
}

double l2_inner(const Field& a, const Field& b) {
  return (a.values * b.values).sum() * a.grid.cell_volume();
}

}  // namespace

TEST_CASE("dyadic partition of unity") {
  const auto p = build_partition(2, 6);
  CHECK(p.order == 3);

  SUBCASE("identity on a dense radial grid") {
    double worst = 0.0;
    for (int i = 1; i <= 10000; ++i) {
      const double r = 32.0 * i / 10000.0;  // up to 2^{j_max - 1}
      double sum = p.cap(r);
      for (int J = 1; J <= p.j_max; ++J) sum += p.band(J, r);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    CHECK(worst <= 1e-12);
  }
  SUBCASE("support and range") {
    CHECK(p.cap(0.5) == 1.0);
    CHECK(p.cap(1.0) == 1.0);
    CHECK(p.cap(2.0) == 0.0);
    CHECK(p.annulus(0.5) == 0.0);
    CHECK(p.annulus(2.0) == 0.0);
    CHECK(p.annulus(1.0) == 1.0);
    CHECK(p.annulus(0.4) == 0.0);
    CHECK(p.annulus(2.3) == 0.0);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
      const double r = uniform(rng, 0.0, 64.0);
      int nonzero = p.cap(r) > 0.0 ? 1 : 0;
      for (int J = 1; J <= p.j_max; ++J) {
        const double v = p.band(J, r);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        if (v > 0.0) ++nonzero;
      }
      CHECK(nonzero <= 3);
    }
  }
  SUBCASE("dyadic radii hit single annuli") {
    for (int J = 2; J <= 5; ++J) {
      const double r = std::ldexp(1.0, J);
      CHECK(p.band(J, r) == 1.0);
      CHECK(p.band(J + 1, r) == 0.0);
      CHECK(p.band(J - 1, r) == 0.0);
    }
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(build_partition(2, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_partition(0, 5), std::invalid_argument);
  }
}

TEST_CASE("identity symbol leaves fields untouched") {
  std::mt19937_64 rng(11);
  const auto grid = Grid::make_1d(128, 0.0, 1.0);
  const auto g = random_field(grid, rng);
  const auto out = apply_multiplier(g, Eigen::ArrayXcd::Ones(128));
  CHECK((out.values - g.values).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("shift symbol moves the field by one cell") {
  std::mt19937_64 rng(12);
  for (int dim = 1; dim <= 2; ++dim) {
    const auto grid = dim == 1 ? Grid::make_1d(64, -1.0, 3.0)
                               : Grid::make_2d(32, 16, 0.0, 1.0, 0.0, 2.0);
    const auto g = random_field(grid, rng);
    const Eigen::ArrayXd fx = frequency_component(grid, 0);
    Eigen::ArrayXcd psi(grid.total_cells());
    const std::complex<double> mi(0.0, -2.0 * M_PI * grid.dx(0));
    for (Eigen::Index k = 0; k < psi.size(); ++k) psi[k] = std::exp(mi * fx[k]);
    const auto out = apply_multiplier(g, psi);
    double worst = 0.0;
    for (int j = 0; j < grid.cells[1]; ++j)
      for (int i = 0; i < grid.cells[0]; ++i) {
        const int prev = (i - 1 + grid.cells[0]) % grid.cells[0];
        worst = std::max(worst, std::abs(out(i, j) - g(prev, j)));
      }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("multiplier norm bound on random symbols") {
  std::mt19937_64 rng(13);
  const auto grid = Grid::make_1d(64, 0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_field(grid, rng);
    // random complex symbol, Hermitian-symmetrized to admit real output
    Eigen::ArrayXcd psi(64);
    for (int k = 0; k < 64; ++k)
      psi[k] = std::complex<double>(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0));
    Eigen::ArrayXcd sym(64);
    for (int k = 0; k < 64; ++k) {
      const int c = (64 - k) % 64;
      sym[k] = 0.5 * (psi[k] + std::conj(psi[c]));
    }
    const auto out = apply_multiplier(g, sym);
    const double bound = sym.abs().maxCoeff();
    Field gf{g};
    CHECK(l2_norm(out) <= bound * l2_norm(gf) + 1e-10);
  }
}

TEST_CASE("non-Hermitian symbols are rejected") {
  const auto grid = Grid::make_1d(32, 0.0, 1.0);
  Field g(grid);
  g.values.setConstant(1.0);
  Eigen::ArrayXcd psi = Eigen::ArrayXcd::Constant(32, std::complex<double>(0.0, 1.0));
  CHECK_THROWS_WITH_AS(apply_multiplier(g, psi), doctest::Contains("Hermitian"),
                       std::invalid_argument);
  Eigen::ArrayXcd nan_psi = Eigen::ArrayXcd::Ones(32);
  nan_psi[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(apply_multiplier(g, nan_psi), std::invalid_argument);
  CHECK_THROWS_AS(apply_multiplier(g, Eigen::ArrayXcd::Ones(16)), std::invalid_argument);
}

TEST_CASE("plancherel identity") {
  std::mt19937_64 rng(14);
  for (int dim = 1; dim <= 2; ++dim) {
    const auto grid = dim == 1 ? Grid::make_1d(256, -2.0, 2.0)
                               : Grid::make_2d(32, 32, 0.0, 1.0, 0.0, 1.0);
    const auto g = random_field(grid, rng);
    const auto ghat = fourier_transform(g);
    const double n = grid.total_cells();
    const double lhs = l2_norm(g) * l2_norm(g);
    const double rhs = (ghat.abs2().sum()) * grid.cell_volume() / n;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("partition reconstruction of band-limited fields") {
  std::mt19937_64 rng(15);
  const auto grid = Grid::make_1d(256, 0.0, 1.0);
  const auto g = random_field(grid, rng);
  const auto p = build_partition(1, 7);  // covers |xi| <= 128 = max grid frequency
  const Eigen::ArrayXd norms = frequency_norm(grid);
  Field sum(grid);
  for (int K = 0; K <= p.j_max; ++K) {
    Eigen::ArrayXcd psi(256);
    for (int k = 0; k < 256; ++k) psi[k] = p.band(K, norms[k]);
    sum.values += apply_multiplier(g, psi).values;
  }
  CHECK((sum.values - g.values).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("block orthogonality for separated annuli") {
  std::mt19937_64 rng(16);
  const auto grid = Grid::make_1d(512, 0.0, 1.0);
  const auto g = random_field(grid, rng);
  const auto p = build_partition(1, 8);
  const Eigen::ArrayXd norms = frequency_norm(grid);
  auto banded = [&](int K) {
    Eigen::ArrayXcd psi(512);
    for (int k = 0; k < 512; ++k) psi[k] = p.band(K, norms[k]);
    return apply_multiplier(g, psi);
  };
  const auto h2 = banded(2), h4 = banded(4), h5 = banded(5), h7 = banded(7);
  CHECK(std::abs(l2_inner(h2, h4)) <= 1e-10);
  CHECK(std::abs(l2_inner(h2, h5)) <= 1e-10);
  CHECK(std::abs(l2_inner(h5, h7)) <= 1e-10);
  // adjacent annuli genuinely overlap, keeping the check honest
  CHECK(std::abs(l2_inner(h4, h5)) > 1e-10);
}

TEST_CASE("riesz potential") {
  const auto grid = Grid::make_1d(128, 0.0, 1.0);

  SUBCASE("single mode is an eigenfunction") {
    for (int k : {1, 3, 8}) {
      Field g(grid);
      for (int i = 0; i < 128; ++i) g.values[i] = std::cos(2.0 * M_PI * k * grid.coord(0, i));
      const auto out = riesz_potential(g, 0.75);
      const double scale = std::pow(static_cast<double>(k), -0.75);
      CHECK((out.values - scale * g.values).abs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("vanishing exponent recovers the field") {
    std::mt19937_64 rng(17);
    auto g = random_field(grid, rng);
    g.values -= g.values.mean();
    const auto out = riesz_potential(g, 1e-12);
    CHECK((out.values - g.values).abs().maxCoeff() <= 1e-10);
  }
  SUBCASE("contraction on integer-frequency boxes") {
    std::mt19937_64 rng(18);
    auto g = random_field(grid, rng);
    g.values -= g.values.mean();
    Field gf{g};
    CHECK(l2_norm(riesz_potential(g, 1e-300)) <= l2_norm(gf) + 1e-12);
    const auto smooth = riesz_potential(g, 0.9);
    CHECK(l2_norm(smooth) <= l2_norm(gf) + 1e-12);
  }
  SUBCASE("zero mode is annihilated") {
    Field g(grid);
    g.values.setConstant(3.0);
    CHECK(riesz_potential(g, 0.5).values.abs().maxCoeff() <= 1e-14);
  }
  SUBCASE("exponent domain") {
    Field g(grid);
    g.values.setZero();
    CHECK_THROWS_AS(riesz_potential(g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(riesz_potential(g, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(riesz_potential(g, -0.5), std::invalid_argument);
  }
}

TEST_CASE("marcinkiewicz bounds") {
  SUBCASE("constant symbol") {
    const auto r = marcinkiewicz_check([](const Eigen::VectorXd&) { return 1.0; }, 2);
    CHECK(!r.violation);
    CHECK(r.bound == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("degree-zero homogeneous symbol") {
    const auto r = marcinkiewicz_check(
        [](const Eigen::VectorXd& xi) { return xi[0] * xi[1] / xi.squaredNorm(); }, 2);
    CHECK(!r.violation);
    CHECK(r.bound > 0.0);
    CHECK(r.bound < 10.0);
  }
  SUBCASE("unbounded symbol is flagged") {
    const auto r = marcinkiewicz_check(
        [](const Eigen::VectorXd& xi) { return std::sqrt(xi.norm()); }, 1);
    CHECK(r.violation);
  }
  SUBCASE("non-finite samples are flagged") {
    const auto r = marcinkiewicz_check(
        [](const Eigen::VectorXd&) { return std::numeric_limits<double>::quiet_NaN(); }, 1);
    CHECK(r.violation);
    CHECK(r.detail == "non-finite sample");
  }
}

TEST_CASE("indicator block decay has exponent one half") {
  const auto grid = Grid::make_1d(4096, -4.0, 4.0);
  Field g(grid);
  for (int i = 0; i < 4096; ++i) {
    const double x = grid.coord(0, i);
    g.values[i] = (x > 0.0 && x < 1.0) ? 1.0 : 0.0;
  }
  const auto spec = block_norms(g, build_partition(1, 8), 2.0);
  CHECK(spec.informative >= 7);
  CHECK(!spec.super_algebraic);
  CHECK(spec.s_hat == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(spec.s_hat - 0.5) <= 0.05);

  const auto est = sobolev_estimate(spec);
  CHECK(est.s_hat == spec.s_hat);
  CHECK(est.summability < 0.5);
}

TEST_CASE("synthetic spectra recover their decay exponents") {
  const auto grid = Grid::make_1d(4096, 0.0, 1.0);
  for (double beta : {1.0, 1.5, 2.0}) {
    const auto g = synthetic_power_field(grid, beta, 900 + static_cast<int>(10 * beta));
    const auto spec = block_norms(g, build_partition(1, 9), 2.0);
    CHECK(std::abs(spec.s_hat - (beta - 0.5)) <= 0.05);
    CHECK(spec.r_squared > 0.99);
  }
}

TEST_CASE("white noise blocks grow like the annulus volume") {
  const auto grid = Grid::make_1d(4096, 0.0, 1.0);
  std::mt19937_64 rng(19);
  const auto g = random_field(grid, rng);
  const auto spec = block_norms(g, build_partition(1, 10), 2.0);
  CHECK(std::abs(spec.s_hat - (-0.5)) <= 0.1);
}

TEST_CASE("gaussian data triggers the super-algebraic sentinel") {
  const auto grid = Grid::make_1d(512, -8.0, 8.0);
  Field g(grid);
  for (int i = 0; i < 512; ++i) {
    const double x = grid.coord(0, i);
    g.values[i] = std::exp(-0.5 * x * x / 0.25);
  }
  const auto spec = block_norms(g, build_partition(1, 8), 2.0);
  CHECK(spec.super_algebraic);
  const auto est = sobolev_estimate(spec);
  CHECK(est.super_algebraic);
  CHECK(std::isinf(est.s_hat));
}

TEST_CASE("degenerate spectra raise errors") {
  const auto grid = Grid::make_1d(64, 0.0, 1.0);

  SUBCASE("zero field") {
    Field z(grid);
    const auto spec = block_norms(z, build_partition(1, 5), 2.0);
    CHECK(spec.informative == 0);
    CHECK_THROWS_AS(sobolev_estimate(spec), std::invalid_argument);
  }
  SUBCASE("too few informative blocks without fast decay") {
    Field g(grid);
    for (int i = 0; i < 64; ++i) g.values[i] = std::cos(2.0 * M_PI * 12.0 * grid.coord(0, i));
    const auto spec = block_norms(g, build_partition(1, 5), 2.0);
    CHECK(spec.informative < 4);
    CHECK(!spec.super_algebraic);
    CHECK_THROWS_WITH_AS(sobolev_estimate(spec), doctest::Contains("insufficient"),
                         std::runtime_error);
  }
  SUBCASE("grid refuses an oversized partition") {
    Field g(grid);
    g.values.setConstant(1.0);
    CHECK_THROWS_WITH_AS(block_norms(g, build_partition(1, 6), 2.0),
                         doctest::Contains("too large"), std::invalid_argument);
    CHECK_THROWS_AS(block_norms(g, build_partition(2, 5), 2.0), std::invalid_argument);
    CHECK_THROWS_AS(block_norms(g, build_partition(1, 5), 0.5), std::invalid_argument);
  }
}

TEST_CASE("feasible partition depth tracks grid and box") {
  CHECK(max_feasible_j(Grid::make_1d(4096, 0.0, 1.0)) == 11);
  CHECK(max_feasible_j(Grid::make_1d(4096, -4.0, 4.0)) == 8);
  CHECK(max_feasible_j(Grid::make_2d(128, 128, -1.0, 1.0, -1.0, 1.0)) == 6);
  CHECK(max_feasible_j(Grid::make_1d(16, -8.0, 8.0)) == 3);
}

TEST_CASE("raised cosine window tapers to the faces") {
  const auto grid = Grid::make_1d(128, -2.0, 2.0);
  Field g(grid);
  g.values.setConstant(1.0);
  const auto w = apply_raised_cosine_window(g);
  CHECK(w.values.minCoeff() >= 0.0);
  CHECK(w.values.maxCoeff() <= 1.0);
  CHECK(w.values[0] <= 1e-3);           // near the face
  CHECK(w.values[64] >= 0.99);          // near the center
  CHECK(w.values[1] == doctest::Approx(w.values[126]).epsilon(1e-12));  // symmetry
}
