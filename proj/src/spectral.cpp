#include "dgpr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "dgpr/util.hpp"

namespace dgpr {

namespace {

// generalized smoothstep: first `order` derivatives vanish at 0 and 1
double smoothstep(int order, double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double acc = 0.0;
  for (int k = 0; k <= order; ++k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c *= static_cast<double>(order + i) / i;  // C(order+k, k)
    for (int i = 1; i <= order - k; ++i)
      c *= static_cast<double>(order + k + 1 + i) / i;  // C(2order+1, order-k)
    acc += c * ((k % 2 == 0) ? 1.0 : -1.0) * std::pow(t, order + k + 1);
  }
  return acc;
}

void check_layout(const Field& g) {
  if (g.values.size() != g.grid.total_cells())
    throw std::invalid_argument("field values do not match its grid");
}

Eigen::Index conjugate_index(const Grid& g, Eigen::Index idx) {
  const int nx = g.cells[0];
  const int kx = static_cast<int>(idx) % nx;
  const int ky = static_cast<int>(idx) / nx;
  const int cx = (nx - kx) % nx;
  const int cy = (g.cells[1] - ky) % g.cells[1];
  return cx + static_cast<Eigen::Index>(nx) * cy;
}

Eigen::ArrayXcd forward_flat(const Grid& grid, const Eigen::ArrayXd& v) {
  Eigen::FFT<double> fft;
  const int nx = grid.cells[0], ny = grid.cells[1];
  Eigen::ArrayXcd out(v.size());
  std::vector<std::complex<double>> line_out(nx);
  std::vector<std::complex<double>> line_in(nx);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) line_in[i] = v[grid.index(i, j)];
    fft.fwd(line_out, line_in);
    for (int i = 0; i < nx; ++i) out[grid.index(i, j)] = line_out[i];
  }
  if (ny > 1) {
    std::vector<std::complex<double>> col_in(ny), col_out(ny);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) col_in[j] = out[grid.index(i, j)];
      fft.fwd(col_out, col_in);
      for (int j = 0; j < ny; ++j) out[grid.index(i, j)] = col_out[j];
    }
  }
  return out;
}

Eigen::ArrayXcd inverse_flat(const Grid& grid, const Eigen::ArrayXcd& vhat) {
  Eigen::FFT<double> fft;
  const int nx = grid.cells[0], ny = grid.cells[1];
  Eigen::ArrayXcd out = vhat;
  std::vector<std::complex<double>> line_in(nx), line_out(nx);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) line_in[i] = out[grid.index(i, j)];
    fft.inv(line_out, line_in);
    for (int i = 0; i < nx; ++i) out[grid.index(i, j)] = line_out[i];
  }
  if (ny > 1) {
    std::vector<std::complex<double>> col_in(ny), col_out(ny);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) col_in[j] = out[grid.index(i, j)];
      fft.inv(col_out, col_in);
      for (int j = 0; j < ny; ++j) out[grid.index(i, j)] = col_out[j];
    }
  }
  return out;
}

double discrete_lq_norm(const Grid& grid, const Eigen::ArrayXd& v, double q) {
  const double vol = grid.cell_volume();
  return std::pow((v.abs().pow(q) * vol).sum(), 1.0 / q);
}

}  // namespace

double DyadicPartition::cap(double r) const {
  const double z = std::abs(r);
  if (z <= 1.0) return 1.0;
  if (z >= 2.0) return 0.0;
  return 1.0 - smoothstep(order, z - 1.0);
}

double DyadicPartition::annulus(double r) const { return cap(r) - cap(2.0 * r); }

double DyadicPartition::band(int K, double r) const {
  if (K == 0) return cap(r);
  return annulus(std::ldexp(std::abs(r), -K));
}

DyadicPartition build_partition(int d, int j_max) {
  if (d < 1) throw std::invalid_argument("partition dimension must be >= 1");
  if (j_max < 3) throw std::invalid_argument("j_max must be >= 3");
  DyadicPartition p;
  p.d = d;
  p.j_max = j_max;
  p.order = d + 1;

  // partition identity on a dense radial grid, guarding the construction
  const int n_test = 10000;
  for (int i = 0; i < n_test; ++i) {
    const double r = std::ldexp(1.0, j_max - 1) * (i + 1) / n_test;
    double sum = p.cap(r);
    for (int J = 1; J <= j_max; ++J) sum += p.band(J, r);
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::logic_error("dyadic partition identity failed at r = " + std::to_string(r));
  }
  return p;
}

Eigen::ArrayXd frequency_component(const Grid& grid, int ax) {
  Eigen::ArrayXd out(grid.total_cells());
  for (int j = 0; j < grid.cells[1]; ++j)
    for (int i = 0; i < grid.cells[0]; ++i) {
      const int k = (ax == 0) ? i : j;
      const int n = grid.cells[ax];
      const int signed_k = (k <= n / 2) ? k : k - n;
      out[grid.index(i, j)] = signed_k / grid.extent(ax);
    }
  return out;
}

Eigen::ArrayXd frequency_norm(const Grid& grid) {
  Eigen::ArrayXd n2 = frequency_component(grid, 0).square();
  if (grid.d_x == 2) n2 += frequency_component(grid, 1).square();
  return n2.sqrt();
}

Eigen::ArrayXcd fourier_transform(const Field& g) {
  check_layout(g);
  return forward_flat(g.grid, g.values);
}

Field apply_multiplier(const Field& g, const Eigen::ArrayXcd& psi) {
  check_layout(g);
  if (psi.size() != g.values.size())
    throw std::invalid_argument("symbol samples do not match the frequency grid");
  if (!psi.isFinite().all()) throw std::invalid_argument("symbol contains non-finite samples");

  const double scale = psi.abs().maxCoeff();
  Eigen::ArrayXcd sym(psi.size());
  double anti = 0.0;
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    const std::complex<double> mirror = std::conj(psi[conjugate_index(g.grid, k)]);
    sym[k] = 0.5 * (psi[k] + mirror);
    anti = std::max(anti, std::abs(psi[k] - mirror) * 0.5);
  }
  if (anti > 1e-10 * std::max(scale, 1e-300))
    throw std::invalid_argument("symbol is not Hermitian: real output is impossible");

  const Eigen::ArrayXcd ghat = forward_flat(g.grid, g.values);
  Field out(g.grid);
  out.values = inverse_flat(g.grid, (sym * ghat).eval()).real();
  return out;
}

Field riesz_potential(const Field& g, double s) {
  check_layout(g);
  if (!(s > 0.0) || !(s < g.grid.d_x))
    throw std::invalid_argument("riesz exponent must lie in (0, d)");
  const Eigen::ArrayXd norms = frequency_norm(g.grid);
  Eigen::ArrayXcd psi(norms.size());
  for (Eigen::Index k = 0; k < norms.size(); ++k)
    psi[k] = norms[k] > 0.0 ? std::pow(norms[k], -s) : 0.0;
  return apply_multiplier(g, psi);
}

MarcinkiewiczReport marcinkiewicz_check(
    const std::function<double(const Eigen::VectorXd&)>& psi, int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("marcinkiewicz check supports d in {1,2,3}");

  // log-spaced magnitudes per axis, both signs, clear of the hyperplanes
  const int n_mag = 25;
  std::vector<double> mags(n_mag);
  for (int i = 0; i < n_mag; ++i)
    mags[i] = std::pow(10.0, -3.0 + 6.0 * i / (n_mag - 1));  // 1e-3 .. 1e3

  // all multi-indices with |a| <= d
  std::vector<Eigen::VectorXi> alphas;
  Eigen::VectorXi a = Eigen::VectorXi::Zero(d);
  const std::function<void(int, int)> enumerate = [&](int pos, int budget) {
    if (pos == d) {
      alphas.push_back(a);
      return;
    }
    for (int v = 0; v <= budget; ++v) {
      a[pos] = v;
      enumerate(pos + 1, budget - v);
    }
    a[pos] = 0;
  };
  enumerate(0, d);

  const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXi&)> deriv =
      [&](const Eigen::VectorXd& xi, const Eigen::VectorXi& al) -> double {
    int ax = -1;
    for (int i = 0; i < d; ++i)
      if (al[i] > 0) {
        ax = i;
        break;
      }
    if (ax < 0) return psi(xi);
    Eigen::VectorXi rest = al;
    rest[ax] -= 1;
    const double h = 1e-4 * std::abs(xi[ax]);
    Eigen::VectorXd xp = xi, xm = xi;
    xp[ax] += h;
    xm[ax] -= h;
    return (deriv(xp, rest) - deriv(xm, rest)) / (2.0 * h);
  };

  MarcinkiewiczReport report;
  double sup_outer = 0.0, sup_inner = 0.0;  // |a| = 0 term split by magnitude decade
  std::vector<int> idx(d, 0);
  std::vector<int> sgn(d, 0);
  const long n_points = static_cast<long>(std::pow(n_mag, d)) << d;
  for (long p = 0; p < n_points; ++p) {
    long rem = p;
    Eigen::VectorXd xi(d);
    bool outer = false;
    for (int i = 0; i < d; ++i) {
      idx[i] = static_cast<int>(rem % n_mag);
      rem /= n_mag;
      sgn[i] = static_cast<int>(rem % 2);
      rem /= 2;
      xi[i] = (sgn[i] ? -1.0 : 1.0) * mags[idx[i]];
      if (mags[idx[i]] > 1e2) outer = true;
    }
    for (const auto& al : alphas) {
      double term = deriv(xi, al);
      if (!std::isfinite(term)) {
        report.violation = true;
        report.detail = "non-finite sample";
        return report;
      }
      for (int i = 0; i < d; ++i) term *= std::pow(xi[i], al[i]);
      term = std::abs(term);
      report.bound = std::max(report.bound, term);
      if (al.sum() == 0) {
        if (outer)
          sup_outer = std::max(sup_outer, term);
        else
          sup_inner = std::max(sup_inner, term);
      }
    }
  }
  if (sup_outer > 1.5 * std::max(sup_inner, 1e-300)) {
    report.violation = true;
    report.detail = "symbol keeps growing on the outermost decade";
  }
  return report;
}

DyadicSpectrum block_norms(const Field& g, const DyadicPartition& partition, double q) {
  check_layout(g);
  if (!(q >= 1.0)) throw std::invalid_argument("q must be >= 1");
  if (partition.d != g.grid.d_x)
    throw std::invalid_argument("partition dimension does not match the field");
  const int min_cells = (g.grid.d_x == 2) ? std::min(g.grid.cells[0], g.grid.cells[1])
                                          : g.grid.cells[0];
  const int max_j = static_cast<int>(std::floor(std::log2(min_cells))) - 1;
  if (partition.j_max > max_j) {
    std::ostringstream msg;
    msg << "j_max = " << partition.j_max << " too large for grid (max " << max_j << ")";
    throw std::invalid_argument(msg.str());
  }

  const Eigen::ArrayXd norms_xi = frequency_norm(g.grid);
  const Eigen::ArrayXcd ghat = forward_flat(g.grid, g.values);

  DyadicSpectrum spec;
  spec.q = q;
  spec.norms.resize(partition.j_max + 1);
  Eigen::ArrayXcd banded(ghat.size());
  for (int K = 0; K <= partition.j_max; ++K) {
    for (Eigen::Index i = 0; i < ghat.size(); ++i)
      banded[i] = partition.band(K, norms_xi[i]) * ghat[i];
    const Eigen::ArrayXd h = inverse_flat(g.grid, banded).real();
    spec.blocks.push_back(K);
    spec.norms[K] = discrete_lq_norm(g.grid, h, q);
  }

  const double max_norm = spec.norms.maxCoeff();
  spec.floor = 1e-13 * max_norm;
  if (max_norm == 0.0) return spec;  // zero field: no informative blocks

  std::vector<double> ks, logs;
  int last_informative = 0;
  for (int K = 1; K <= partition.j_max; ++K) {
    if (spec.norms[K] > spec.floor) {
      ks.push_back(K);
      logs.push_back(std::log2(spec.norms[K]));
      last_informative = K;
    }
  }
  spec.informative = static_cast<int>(ks.size());

  // only annuli that intersect the resolvable frequency range can witness
  // decay; empty trailing bands are a box artifact, not smoothness
  const double max_freq = norms_xi.maxCoeff();
  int reachable = 0;
  for (int K = 1; K <= partition.j_max; ++K)
    if (std::ldexp(1.0, K - 1) < max_freq) reachable = K;
  spec.super_algebraic = reachable - last_informative >= 2;
  if (ks.size() >= 2) {
    const auto fit = fit_line(ks, logs);
    spec.s_hat = -fit.slope;
    spec.r_squared = fit.r_squared;
    spec.fit_k_min = static_cast<int>(ks.front());
    spec.fit_k_max = static_cast<int>(ks.back());
  }
  return spec;
}

int max_feasible_j(const Grid& grid) {
  const int min_cells = (grid.d_x == 2) ? std::min(grid.cells[0], grid.cells[1])
                                        : grid.cells[0];
  const int grid_bound = static_cast<int>(std::floor(std::log2(min_cells))) - 1;
  double max_freq2 = 0.0;
  for (int ax = 0; ax < grid.d_x; ++ax) {
    const double f = 0.5 * grid.cells[ax] / grid.extent(ax);
    max_freq2 += f * f;
  }
  const double max_freq = std::sqrt(max_freq2);
  int freq_bound = 0;
  for (int K = 1; K <= grid_bound; ++K)
    if (std::ldexp(1.0, K - 1) < max_freq) freq_bound = K;
  return std::max(std::min(grid_bound, freq_bound), 3);
}

SobolevEstimate sobolev_estimate(const DyadicSpectrum& spectrum) {
  if (spectrum.norms.size() == 0 || spectrum.norms.maxCoeff() == 0.0)
    throw std::invalid_argument("spectrum of a zero field has no regularity exponent");

  SobolevEstimate est;
  est.informative = spectrum.informative;
  est.super_algebraic = spectrum.super_algebraic;
  if (spectrum.super_algebraic) {
    est.s_hat = std::numeric_limits<double>::infinity();
    est.summability = std::numeric_limits<double>::infinity();
    return est;
  }
  if (spectrum.informative < 4)
    throw std::runtime_error("insufficient resolution: fewer than 4 informative blocks");

  est.s_hat = spectrum.s_hat;
  // largest s with 2^{s(K+1)} |H_{K+1}| <= 2^{sK} |H_K| across informative pairs
  double smin = std::numeric_limits<double>::infinity();
  for (int K = spectrum.fit_k_min; K < spectrum.fit_k_max; ++K) {
    const double a = spectrum.norms[K], b = spectrum.norms[K + 1];
    if (a > spectrum.floor && b > spectrum.floor) smin = std::min(smin, std::log2(a / b));
  }
  est.summability = smin;
  return est;
}

Field apply_raised_cosine_window(const Field& g) {
  check_layout(g);
  Field out(g.grid);
  for (int j = 0; j < g.grid.cells[1]; ++j)
    for (int i = 0; i < g.grid.cells[0]; ++i) {
      double w = 0.5 * (1.0 - std::cos(2.0 * M_PI * (g.grid.coord(0, i) - g.grid.lo[0]) /
                                       g.grid.extent(0)));
      if (g.grid.d_x == 2)
        w *= 0.5 * (1.0 - std::cos(2.0 * M_PI * (g.grid.coord(1, j) - g.grid.lo[1]) /
                                   g.grid.extent(1)));
      out(i, j) = w * g(i, j);
    }
  return out;
}

}  // namespace dgpr
