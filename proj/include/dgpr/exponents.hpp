#pragma once

#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgpr/util.hpp"

namespace dgpr {

/// Raised when a slack parameter exceeds its admissible ceiling.
class invalid_slack_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Closed-form exponent formulas. All are rational functions of (alpha, d, c),
// so they are exact when Scalar is an exact rational type. The *_formula
// functions do not validate their arguments; use the checked entry points
// below for domain enforcement.

template <class Scalar>
Scalar q_star_formula(const Scalar& alpha, int d) {
  const Scalar D(d);
  return (2 * alpha + 4 * D + 12) / (2 * alpha + 2 * D + 6);
}

template <class Scalar>
Scalar theta_star_formula(const Scalar& alpha, int d) {
  const Scalar D(d);
  return alpha / (alpha + 2 * D + 6);
}

template <class Scalar>
Scalar s_star_formula(const Scalar& alpha, int d) {
  const Scalar D(d);
  const Scalar denom = (3 * alpha + 8) * ((alpha + 4) * (alpha + 2 * (D + 1)) + 2 * alpha);
  return alpha * alpha * (alpha + 4) / denom;
}

template <class Scalar>
Scalar c_star_formula(const Scalar& alpha, int d) {
  const Scalar D(d);
  const Scalar denom = (3 * alpha + 8) * ((alpha + 4) * (alpha + 2 * (D + 1)) + 2 * alpha);
  return 2 * alpha * (alpha + 4) / denom;
}

template <class Scalar>
Scalar r_formula(const Scalar& alpha, const Scalar& c) {
  return (alpha + 4) / (3 * alpha + 8) - c;
}

template <class Scalar>
Scalar epsilon_formula(const Scalar& alpha, const Scalar& c) {
  return (2 * alpha + 4) / (alpha + 4) * r_formula(alpha, c) + 2 * c;
}

template <class Scalar>
Scalar eta_formula(const Scalar& alpha, int d) {
  const Scalar D(d);
  return Scalar(2) / (alpha + 2 * (D + 3));
}

template <class Scalar>
Scalar omega_formula(const Scalar& alpha, const Scalar& c) {
  return 2 * r_formula(alpha, c) / (alpha + 4);
}

template <class Scalar>
Scalar gamma_formula(const Scalar& alpha, int d, const Scalar& c) {
  const Scalar D(d);
  const Scalar r = r_formula(alpha, c);
  return (alpha + 2 * (D + 3)) / (alpha + 2 * (D + 2)) * (c + r * alpha / (alpha + 4));
}

namespace detail {
template <class Scalar>
void require_alpha_dim(const Scalar& alpha, int d) {
  if (!(alpha > 0)) throw std::invalid_argument("exponents: alpha must be positive");
  if (d < 2) throw std::invalid_argument("exponents: dimension d must be at least 2");
}
}  // namespace detail

/// Velocity-averaging integrability exponent. Domain: alpha > 0, d >= 2.
template <class Scalar>
Scalar q_star(const Scalar& alpha, int d) {
  detail::require_alpha_dim(alpha, d);
  return q_star_formula(alpha, d);
}

/// Sobolev regularity exponent. Domain: alpha > 0, d >= 2.
template <class Scalar>
Scalar s_star(const Scalar& alpha, int d) {
  detail::require_alpha_dim(alpha, d);
  return s_star_formula(alpha, d);
}

template <class Scalar>
Scalar theta_star(const Scalar& alpha, int d) {
  detail::require_alpha_dim(alpha, d);
  return theta_star_formula(alpha, d);
}

template <class Scalar>
Scalar c_star(const Scalar& alpha, int d) {
  detail::require_alpha_dim(alpha, d);
  return c_star_formula(alpha, d);
}

/// Full parameter ledger of the multiplier-decomposition argument at a given
/// slack c in (0, c_star].
template <class Scalar>
struct ExponentSet {
  Scalar alpha{};
  int d = 0;
  Scalar c{};
  Scalar q_star{};
  Scalar s_star{};
  Scalar theta_star{};
  Scalar c_star{};
  Scalar r{};
  Scalar epsilon{};
  Scalar eta{};
  Scalar omega{};
  Scalar gamma{};
};

/// Assemble the parameter ledger. c defaults to c_star (the regularity-
/// optimal slack). Throws invalid_slack_error for c > c_star and
/// std::invalid_argument for c <= 0 or bad (alpha, d).
template <class Scalar>
ExponentSet<Scalar> proof_parameters(const Scalar& alpha, int d,
                                     const std::optional<Scalar>& c_opt = std::nullopt) {
  detail::require_alpha_dim(alpha, d);
  ExponentSet<Scalar> set;
  set.alpha = alpha;
  set.d = d;
  set.c_star = c_star_formula(alpha, d);
  set.c = c_opt.value_or(set.c_star);
  if (!(set.c > 0)) throw std::invalid_argument("proof_parameters: slack c must be positive");
  if (set.c > set.c_star)
    throw invalid_slack_error("proof_parameters: slack c exceeds c_star; no regularity gain");
  set.q_star = q_star_formula(alpha, d);
  set.s_star = s_star_formula(alpha, d);
  set.theta_star = theta_star_formula(alpha, d);
  set.r = r_formula(alpha, set.c);
  set.epsilon = epsilon_formula(alpha, set.c);
  set.eta = eta_formula(alpha, d);
  set.omega = omega_formula(alpha, set.c);
  set.gamma = gamma_formula(alpha, d, set.c);
  return set;
}

struct IdentityReport {
  // residuals are max absolute deviations over all trials
  double residual_r_plus_epsilon = 0.0;  // r + epsilon == 1 - c*alpha/(alpha+4)
  double residual_s_star_chain = 0.0;    // telescoped decay rate at c_star == s_star
  double residual_q_theta = 0.0;         // 1/q_star == (1-theta_star)/2 + theta_star
  double min_omega_gap = 0.0;            // min over trials of omega - gamma*eta (must be > 0)
  int trials = 0;
  bool all_pass = false;
};

/// Re-derive the interlocking parameter identities over random admissible
/// (alpha, d, c) draws; tol applies to the three equality identities.
inline IdentityReport validate_exponent_identities(int n_trials, std::uint64_t seed,
                                                   double tol = 1e-12, double alpha_max = 3.0,
                                                   int d_min = 2, int d_max = 6) {
  if (n_trials < 1) throw std::invalid_argument("validate_exponent_identities: n_trials >= 1");
  std::mt19937_64 rng(seed);
  IdentityReport rep;
  rep.trials = n_trials;
  rep.min_omega_gap = std::numeric_limits<double>::infinity();
  for (int t = 0; t < n_trials; ++t) {
    const double alpha = uniform(rng, 1e-3, alpha_max);
    const int d = d_min + static_cast<int>(rng() % static_cast<std::uint64_t>(d_max - d_min + 1));
    const double cs = c_star_formula(alpha, d);
    const double c = cs * (1.0 - 0.999999 * uniform01(rng));  // c in (0, c_star]
    const auto set = proof_parameters<double>(alpha, d, c);

    const double lhs1 = set.r + set.epsilon;
    const double rhs1 = 1.0 - c * alpha / (alpha + 4.0);
    rep.residual_r_plus_epsilon = std::max(rep.residual_r_plus_epsilon, std::abs(lhs1 - rhs1));

    const auto star = proof_parameters<double>(alpha, d);  // c = c_star
    const double chain =
        alpha / (alpha + 2.0 * (d + 2.0)) * (star.r * alpha / (alpha + 4.0) + star.c);
    rep.residual_s_star_chain = std::max(rep.residual_s_star_chain, std::abs(chain - set.s_star));

    const double lhs3 = 1.0 / set.q_star;
    const double rhs3 = (1.0 - set.theta_star) / 2.0 + set.theta_star;
    rep.residual_q_theta = std::max(rep.residual_q_theta, std::abs(lhs3 - rhs3));

    rep.min_omega_gap = std::min(rep.min_omega_gap, set.omega - set.gamma * set.eta);
  }
  rep.all_pass = rep.residual_r_plus_epsilon <= tol && rep.residual_s_star_chain <= tol &&
                 rep.residual_q_theta <= tol && rep.min_omega_gap > 0.0;
  return rep;
}

/// Structural range checks for an assembled ledger; returns a human-readable
/// violation list (empty when all invariants hold).
template <class Scalar>
std::vector<std::string> exponent_invariant_violations(const ExponentSet<Scalar>& set) {
  std::vector<std::string> v;
  if (!(set.q_star > 1 && set.q_star <= 2)) v.push_back("q_star outside (1, 2]");
  if (!(set.s_star > 0 && 3 * set.s_star < 1)) v.push_back("s_star outside (0, 1/3)");
  if (!(set.r + set.epsilon < 1)) v.push_back("r + epsilon >= 1");
  if (!(set.omega - set.gamma * set.eta > 0)) v.push_back("omega - gamma*eta <= 0");
  return v;
}

}  // namespace dgpr
