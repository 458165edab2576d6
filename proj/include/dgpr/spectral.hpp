#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgpr/grid.hpp"

namespace dgpr {

/// Radial dyadic partition of unity built from a polynomial smoothstep:
/// cap(r) = 1 for r <= 1, 0 for r >= 2, C^{order} in between;
/// annulus(r) = cap(r) - cap(2r), supported in (1/2, 2);
/// band(K, r) = cap(r) for K = 0 and annulus(2^{-K} r) for K >= 1, so that
/// sum_{K=0..j_max} band(K, r) = 1 for all r <= 2^{j_max}.
struct DyadicPartition {
  int d = 1;
  int j_max = 3;
  int order = 2;  // smoothstep order, >= d + 1

  double cap(double r) const;
  double annulus(double r) const;
  double band(int K, double r) const;
};

/// Validates j_max >= 3 and checks the partition identity on a 10^4-point
/// radial grid before returning.
DyadicPartition build_partition(int d, int j_max);

/// Signed physical frequencies of the periodic box, cycles per unit length:
/// along each axis the integer modes 0, 1, ..., n/2, -(n/2 - 1), ..., -1
/// divided by the box extent. Flat layout matches Field (x fastest).
Eigen::ArrayXd frequency_component(const Grid& grid, int ax);
Eigen::ArrayXd frequency_norm(const Grid& grid);

/// Forward DFT of a field (unnormalized), flat layout matching Field.
Eigen::ArrayXcd fourier_transform(const Field& g);

/// A_psi g = (psi ghat)^inverse. psi is sampled on the FFT frequency grid
/// (size = total cells, same flat layout). psi is Hermitian-symmetrized so
/// the output is real; if the discarded anti-Hermitian part exceeds
/// 1e-10 * max|psi| the request is rejected.
Field apply_multiplier(const Field& g, const Eigen::ArrayXcd& psi);

/// Multiplier 1/|xi|^s for s in (0, d); the zero mode is annihilated.
Field riesz_potential(const Field& g, double s);

struct MarcinkiewiczReport {
  double bound = 0.0;   // sup over grid and multi-indices of |xi^a D^a psi|
  bool violation = false;
  std::string detail;
};

/// Estimates the Marcinkiewicz constant sup |xi^a D^a psi| over all
/// multi-indices |a| <= d on a log-spaced grid off the axes (margin 1e-3),
/// derivatives by central differences (relative step 1e-4). Flags symbols
/// whose sup keeps growing on the outermost magnitude decade.
MarcinkiewiczReport marcinkiewicz_check(const std::function<double(const Eigen::VectorXd&)>& psi,
                                        int d);

struct DyadicSpectrum {
  std::vector<int> blocks;  // K = 0 (cap), 1..j_max (annuli)
  Eigen::ArrayXd norms;     // discrete L^q norm of each band image
  double q = 2.0;
  double s_hat = 0.0;       // decay exponent: minus the slope of log2 norms vs K
  double r_squared = 0.0;
  int fit_k_min = 0, fit_k_max = 0;
  int informative = 0;      // annular blocks above the floor
  bool super_algebraic = false;
  double floor = 0.0;       // 1e-13 * max norm
};

/// Applies every band of the partition and measures discrete L^q norms;
/// fits the decay slope over the informative annular blocks.
/// Requires j_max <= log2(min cell count) - 1.
DyadicSpectrum block_norms(const Field& g, const DyadicPartition& partition, double q);

/// Largest j_max the grid both resolves (cell-count bound) and fills with
/// frequency content (annulus below the maximal |xi|), floored at 3.
int max_feasible_j(const Grid& grid);

struct SobolevEstimate {
  double s_hat = 0.0;        // fitted decay exponent
  double summability = 0.0;  // largest s with 2^{sK} |H_K| non-increasing
  bool super_algebraic = false;
  int informative = 0;
};

/// Turns a spectrum into the empirical regularity exponent. Zero fields are
/// rejected; fewer than 4 informative blocks without super-algebraic decay
/// is an insufficient-resolution error.
SobolevEstimate sobolev_estimate(const DyadicSpectrum& spectrum);

/// Hann taper per axis, zero at the box faces; applied before spectral
/// analysis of non-periodic content.
Field apply_raised_cosine_window(const Field& g);

}  // namespace dgpr
