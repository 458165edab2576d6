#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dgpr {

/// Uniform double in [0,1) from the top 53 bits of a mt19937_64 draw.
/// The generator sequence is fixed by the standard, so results are
/// reproducible across platforms (std distributions are not).
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  int n = 0;
};

/// Ordinary least squares y ~ slope*x + intercept.
inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("fit_line: need at least 2 points");
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.n = n;
  f.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

/// Geometric sequence from lo to hi inclusive, n >= 2 points, ascending.
inline std::vector<double> geometric_sequence(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("geometric_sequence: need 0 < lo < hi");
  if (n < 2) throw std::invalid_argument("geometric_sequence: need n >= 2");
  std::vector<double> s(n);
  const double ratio = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) s[i] = lo * std::exp(ratio * i);
  s.front() = lo;
  s.back() = hi;
  return s;
}

/// Trapezoid weights for an arbitrary sorted grid.
inline Eigen::ArrayXd trapezoid_weights(const Eigen::ArrayXd& grid) {
  const Eigen::Index n = grid.size();
  if (n < 2) throw std::invalid_argument("trapezoid_weights: need at least 2 nodes");
  Eigen::ArrayXd w = Eigen::ArrayXd::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double h = grid[i + 1] - grid[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

/// Adaptive Simpson quadrature on [a, b] (a may exceed b; sign handled).
template <class F>
double adaptive_quadrature(F&& f, double a, double b, double tol = 1e-12, int max_depth = 40) {
  if (a == b) return 0.0;
  struct Rec {
    const std::remove_reference_t<F>& g;
    int maxd;
    double run(double lo, double hi, double flo, double fmid, double fhi, double whole, double eps,
               int depth) const {
      const double mid = 0.5 * (lo + hi);
      const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
      const double flm = g(lm), frm = g(rm);
      const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
      const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
      if (depth >= maxd || std::abs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
      return run(lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1) +
             run(mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1);
    }
  };
  const double sign = (b >= a) ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
  const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  Rec rec{f, max_depth};
  return sign * rec.run(lo, hi, flo, fmid, fhi, whole, tol, 0);
}

}  // namespace dgpr
