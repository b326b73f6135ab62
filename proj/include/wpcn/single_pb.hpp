#pragma once

// Closed forms for a harvester charged by a single power beacon under
// quasi-static Rayleigh fading: energy supply probability, the
// finite-blocklength achievable rate and its feasibility constraints, the
// asymptotic rate and the asymptotically optimal transmit power.
//
// All logarithms are natural; rates are in nats per channel use unless a
// field says otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "wpcn/error.hpp"
#include "wpcn/specfun.hpp"
#include "wpcn/types.hpp"

namespace wpcn::single {

namespace detail {

inline void check_blocklengths(const char* where, std::int64_t m, std::int64_t n) {
  wpcn::detail::require(m >= 1, where, "m must be >= 1");
  wpcn::detail::require(n >= 2 && n % 2 == 0, where, "n must be an even integer >= 2");
}

inline void check_epsilon(const char* where, double epsilon) {
  wpcn::detail::require(epsilon >= 0.0 && epsilon < 1.0, where, "epsilon must lie in [0, 1)");
}

/// ln(1 + eps/2), the per-frame energy budget that recurs in every constraint.
inline double log_budget(double epsilon) { return std::log1p(0.5 * epsilon); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Energy supply

/// P_es(m, n, a) = (1 + 2a/m)^{-n/2}.
///
/// The closed form is finite for every a >= 0 and m >= 1; use
/// `supply_formula_in_stated_range` to flag points outside m > 2a.
inline double energy_supply_prob(std::int64_t m, std::int64_t n, double a) {
  detail::check_blocklengths("energy_supply_prob", m, n);
  wpcn::detail::require(a >= 0.0 && std::isfinite(a), "energy_supply_prob", "a must be finite and >= 0");
  return std::exp(-0.5 * static_cast<double>(n) * std::log1p(2.0 * a / static_cast<double>(m)));
}

inline double energy_outage_prob(std::int64_t m, std::int64_t n, double a) {
  return 1.0 - energy_supply_prob(m, n, a);
}

/// True when m > 2a, the range in which the supply formula was originally stated.
inline bool supply_formula_in_stated_range(std::int64_t m, double a) {
  return static_cast<double>(m) > 2.0 * a;
}

/// Smallest power ratio that still meets a supply probability rho:
/// (m/2)(rho^{-2/n} - 1).
inline double min_power_ratio(std::int64_t m, std::int64_t n, double rho) {
  detail::check_blocklengths("min_power_ratio", m, n);
  wpcn::detail::require(rho > 0.0 && rho <= 1.0, "min_power_ratio", "rho must lie in (0, 1]");
  return 0.5 * static_cast<double>(m) * std::expm1(-2.0 / static_cast<double>(n) * std::log(rho));
}

/// Limit of P_es(c n, n, a) as n grows: e^{-a/c}.
inline double asymptotic_supply_limit(double a, double c) {
  wpcn::detail::require(a >= 0.0, "asymptotic_supply_limit", "a must be >= 0");
  wpcn::detail::require(c > 0.0, "asymptotic_supply_limit", "c must be > 0");
  return std::exp(-a / c);
}

// ---------------------------------------------------------------------------
// Feasibility constraints of the finite-blocklength rate
//
// Harvest floor      m >= 2a / (exp(2 ln(1+eps/2) / N0) - 1),  N0 = (ln((2+eps)/eps^2))^4
// Transmit cap       n <= 2 ln(1+eps/2) / ln(1 + 2a/m)
// Transmit floor     n >= N0
// Harvest for n      m >= 2a / ((1+eps/2)^{2/n} - 1)
//
// a = 0 needs no energy: both harvest bounds are 0 and the cap is infinite.

/// N0 = (ln((2+eps)/eps^2))^4 as a real number (infinite for eps = 0).
inline double transmit_floor_bound(double epsilon) {
  detail::check_epsilon("transmit_floor_bound", epsilon);
  if (epsilon == 0.0) return std::numeric_limits<double>::infinity();
  const double l = std::log((2.0 + epsilon) / (epsilon * epsilon));
  return l * l * l * l;
}

/// Even blocklength nearest to N0, at least 2. Rounding to nearest rather than
/// up keeps eps = 0.05 at n = 2026 (N0 = 2026.33); plans pick m so that the
/// harvest floor and transmit cap still hold.
inline std::int64_t rounded_transmit_floor(double epsilon) {
  wpcn::detail::require(epsilon > 0.0 && epsilon < 1.0, "rounded_transmit_floor", "epsilon must lie in (0, 1)");
  const double v = transmit_floor_bound(epsilon);
  const auto n = static_cast<std::int64_t>(2.0 * std::floor(0.5 * v + 0.5));
  return std::max<std::int64_t>(n, 2);
}

/// Right-hand side of the harvest floor.
inline double harvest_floor_bound(double a, double epsilon) {
  detail::check_epsilon("harvest_floor_bound", epsilon);
  if (a == 0.0) return 0.0;
  const double denom = std::expm1(2.0 * detail::log_budget(epsilon) / transmit_floor_bound(epsilon));
  return denom > 0.0 ? 2.0 * a / denom : std::numeric_limits<double>::infinity();
}

/// Right-hand side of the transmit cap.
inline double transmit_cap_bound(std::int64_t m, double a, double epsilon) {
  detail::check_epsilon("transmit_cap_bound", epsilon);
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  if (m <= 0) return 0.0;
  return 2.0 * detail::log_budget(epsilon) / std::log1p(2.0 * a / static_cast<double>(m));
}

/// Right-hand side of the harvest requirement for a given n.
inline double harvest_for_transmit_bound(std::int64_t n, double a, double epsilon) {
  detail::check_epsilon("harvest_for_transmit_bound", epsilon);
  wpcn::detail::require(n >= 1, "harvest_for_transmit_bound", "n must be >= 1");
  if (a == 0.0) return 0.0;
  const double denom = std::expm1(2.0 / static_cast<double>(n) * detail::log_budget(epsilon));
  return denom > 0.0 ? 2.0 * a / denom : std::numeric_limits<double>::infinity();
}

struct ConstraintCheck {
  bool harvest_floor = false;         ///< m against the error-target floor
  bool transmit_cap = false;          ///< n against what m can power
  bool transmit_floor = false;        ///< n against the reliability floor
  bool harvest_for_transmit = false;  ///< m against what n needs

  /// The pair the rate theorem is stated with.
  [[nodiscard]] bool theorem_pair() const { return harvest_floor && transmit_cap; }
  /// The rewritten pair used for minimum-latency planning.
  [[nodiscard]] bool planning_pair() const { return transmit_floor && harvest_for_transmit; }
};

inline ConstraintCheck check_constraints(std::int64_t m, std::int64_t n, double a, double epsilon) {
  wpcn::detail::require(m >= 0 && n >= 1, "check_constraints", "m must be >= 0 and n >= 1");
  wpcn::detail::require(a >= 0.0, "check_constraints", "a must be >= 0");
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  ConstraintCheck c;
  c.harvest_floor = md >= harvest_floor_bound(a, epsilon);
  c.transmit_cap = nd <= transmit_cap_bound(m, a, epsilon);
  c.transmit_floor = nd >= transmit_floor_bound(epsilon);
  c.harvest_for_transmit = md >= harvest_for_transmit_bound(n, a, epsilon);
  return c;
}

// ---------------------------------------------------------------------------
// Rates

/// Finite-blocklength epsilon-achievable rate
///   [ (n/2) ln(1+g) - sqrt(((2+eps)/eps) g/(g+1) n) - n^{1/4} - 1 ] / (n + m),
/// feasible when the harvest floor and the transmit cap both hold.
inline RateResult achievable_rate_fbl(const BlocklengthPlan& plan, const LinkParams& link) {
  plan.validate();
  link.validate();
  const double raw = fbl_rate_numerator(plan.n, link.snr(), plan.epsilon) / static_cast<double>(plan.total());
  const auto c = check_constraints(plan.m, plan.n, link.power_ratio(), plan.epsilon);
  return RateResult::from_raw(raw, c.theorem_pair());
}

/// AWGN capacity without harvesting constraints, (1/2) ln(1 + gamma).
inline double awgn_capacity(double gamma) {
  wpcn::detail::require(gamma >= 0.0, "awgn_capacity", "gamma must be >= 0");
  return 0.5 * std::log1p(gamma);
}

/// L(a, eps) = 1 / (1 + a / ln(1 + eps/2)).
inline double capacity_prelog(double a, double epsilon) {
  wpcn::detail::require(a >= 0.0, "capacity_prelog", "a must be >= 0");
  detail::check_epsilon("capacity_prelog", epsilon);
  if (a == 0.0) return 1.0;
  if (epsilon == 0.0) return 0.0;
  return 1.0 / (1.0 + a / detail::log_budget(epsilon));
}

/// Rate as the transmit blocklength grows under minimum-latency planning.
inline double asymptotic_rate(const LinkParams& link, double epsilon) {
  link.validate();
  return capacity_prelog(link.power_ratio(), epsilon) * awgn_capacity(link.snr());
}

/// Small-eps approximation C(gamma) / (1 + 2a/eps).
inline double high_reliability_rate(const LinkParams& link, double epsilon) {
  link.validate();
  detail::check_epsilon("high_reliability_rate", epsilon);
  const double a = link.power_ratio();
  if (a == 0.0) return awgn_capacity(link.snr());
  if (epsilon == 0.0) return 0.0;
  return awgn_capacity(link.snr()) / (1.0 + 2.0 * a / epsilon);
}

// ---------------------------------------------------------------------------
// Asymptotically optimal transmit power

namespace detail {

// W[(P_E/sigma2 ln(1+eps/2) - 1) e^{-1}]
inline double optimal_power_branch(double p_e, double sigma2, double epsilon, const specfun::RealTol& tol) {
  wpcn::detail::require(p_e > 0.0 && sigma2 > 0.0, "optimal_power_asymptotic", "p_e and sigma2 must be > 0");
  wpcn::detail::require(epsilon > 0.0 && epsilon < 1.0, "optimal_power_asymptotic", "epsilon must lie in (0, 1)");
  const double c = p_e / sigma2 * log_budget(epsilon) - 1.0;
  return specfun::lambert_w0(c / std::numbers::e, tol);
}

}  // namespace detail

/// Transmit power maximizing the asymptotic rate:
///   P* = sigma2 ( c / W[c e^{-1}] - 1 ),  c = (P_E/sigma2) ln(1+eps/2) - 1.
/// Evaluated as sigma2 (e^{1 + W} - 1), which is the same quantity (c/W(c/e) = e e^W)
/// without the 0/0 at c = 0.
inline double optimal_power_asymptotic(double p_e, double sigma2, double epsilon,
                                       const specfun::RealTol& tol = {}) {
  const double w = detail::optimal_power_branch(p_e, sigma2, epsilon, tol);
  return sigma2 * std::expm1(1.0 + w);
}

/// dP*/dP_E = ln(1+eps/2) / (1 + W[c e^{-1}]).
inline double optimal_power_slope(double p_e, double sigma2, double epsilon, const specfun::RealTol& tol = {}) {
  const double w = detail::optimal_power_branch(p_e, sigma2, epsilon, tol);
  return detail::log_budget(epsilon) / (1.0 + w);
}

}  // namespace wpcn::single
