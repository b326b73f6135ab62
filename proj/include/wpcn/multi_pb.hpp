#pragma once

// Harvesting from a Poisson field of power beacons with Rayleigh fading and
// bounded path loss max(1, r^eta).
//
// Two Laplace arguments appear below. `s` is the physical argument of
// E[exp(-s Z)] (inverse energy units); `u = P_PB mu s` is the normalized one
// the hypergeometric closed form is written in. The power ratio here is
// a = P_t / (mu P_PB), which is not the single-beacon ratio.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "wpcn/error.hpp"
#include "wpcn/single_pb.hpp"
#include "wpcn/specfun.hpp"
#include "wpcn/types.hpp"

namespace wpcn::multi {

struct NetworkParams {
  double lambda = 1e-3;  ///< beacons per unit area
  double p_pb = 1e3;     ///< beacon transmit power
  double mu = 1.0;       ///< rectifier efficiency
  double eta = 3.6;      ///< path loss exponent

  /// Energy scale P_PB * mu that maps s to u.
  [[nodiscard]] double energy_scale() const { return p_pb * mu; }
  /// a = P_t / (mu P_PB)
  [[nodiscard]] double power_ratio(double p_t) const { return p_t / energy_scale(); }

  void validate() const {
    wpcn::detail::require(lambda > 0.0 && std::isfinite(lambda), "NetworkParams", "lambda must be finite and > 0");
    wpcn::detail::require(p_pb > 0.0 && std::isfinite(p_pb), "NetworkParams", "p_pb must be finite and > 0");
    wpcn::detail::require(mu > 0.0 && mu <= 1.0, "NetworkParams", "mu must lie in (0, 1]");
    wpcn::detail::require(eta > 2.0 && std::isfinite(eta), "NetworkParams", "eta must be finite and > 2");
  }
};

/// values[k] = d^k/ds^k L_Z at s, k = 0..K.
struct LaplaceDerivs {
  double s = 0.0;
  std::vector<double> values;
};

/// Largest derivative order the ladders accept.
inline constexpr int kMaxDerivOrder = 64;

/// Most series terms (n/2) the supply probability evaluates.
inline constexpr std::int64_t kMaxSupplyTerms = 20000;

// ---------------------------------------------------------------------------
// Closed forms

/// F(u, eta) = (2u/(eta-2)) 2F1(1, 1-2/eta; 2-2/eta; -u).
inline double f_function(double u, double eta, const specfun::RealTol& tol = {}) {
  wpcn::detail::require(u >= 0.0, "f_function", "u must be >= 0");
  wpcn::detail::require(eta > 2.0, "f_function", "eta must be > 2");
  if (u == 0.0) return 0.0;
  const double d = 2.0 / eta;
  return 2.0 * u / (eta - 2.0) * specfun::gauss_2f1(1.0, 1.0 - d, 2.0 - d, -u, tol);
}

/// k-th derivative of F in its first argument:
///   (2k/(eta-2)) 2F1^{(k-1)} + (2 x1/(eta-2)) 2F1^{(k)},  F itself for k = 0.
inline double f_deriv(int k, double x1, double eta, const specfun::RealTol& tol = {}) {
  wpcn::detail::require(k >= 0, "f_deriv", "k must be >= 0");
  wpcn::detail::require(x1 >= 0.0, "f_deriv", "x1 must be >= 0");
  wpcn::detail::require(eta > 2.0, "f_deriv", "eta must be > 2");
  if (k == 0) return f_function(x1, eta, tol);
  const double scale = 2.0 / (eta - 2.0);
  double out = scale * k * specfun::gauss_2f1_deriv(k - 1, x1, eta, tol);
  if (x1 != 0.0) out += scale * x1 * specfun::gauss_2f1_deriv(k, x1, eta, tol);
  return out;
}

/// ln L_Z(s) = -pi lambda (u/(1+u) + F(u, eta)),  u = P_PB mu s.
inline double log_laplace_z(double s, const NetworkParams& net, const specfun::RealTol& tol = {}) {
  net.validate();
  wpcn::detail::require(s >= 0.0 && std::isfinite(s), "laplace_z", "s must be finite and >= 0");
  const double u = net.energy_scale() * s;
  return -std::numbers::pi * net.lambda * (u / (1.0 + u) + f_function(u, net.eta, tol));
}

/// L_Z(s) = E[exp(-s Z)] of the per-slot harvested energy.
inline double laplace_z(double s, const NetworkParams& net, const specfun::RealTol& tol = {}) {
  return std::exp(log_laplace_z(s, net, tol));
}

/// E[Z] = lambda pi eta/(eta-2) mu P_PB.
inline double mean_harvested(const NetworkParams& net) {
  net.validate();
  return net.lambda * std::numbers::pi * net.eta / (net.eta - 2.0) * net.energy_scale();
}

// ---------------------------------------------------------------------------
// Derivative ladders

namespace detail {

/// d^k/du^k of u/(1+u) for k >= 1: (-1)^{k+1} k! / (1+u)^{k+1}.
inline double rational_deriv(int k, double u) {
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return sign * std::exp(specfun::detail::lgamma_pos(k + 1.0) - (k + 1.0) * std::log1p(u));
}

/// d^k/ds^k of g(s) = ln L_Z(s), k = 1..K, from Lemma-5 derivatives of F.
inline std::vector<double> exponent_derivs(double s, int max_order, const NetworkParams& net,
                                           const specfun::RealTol& tol) {
  const double kappa = net.energy_scale();
  const double u = kappa * s;
  std::vector<double> g(static_cast<std::size_t>(max_order) + 1, 0.0);
  double kappa_pow = 1.0;
  for (int k = 1; k <= max_order; ++k) {
    kappa_pow *= kappa;
    g[k] = -std::numbers::pi * net.lambda * kappa_pow * (rational_deriv(k, u) + f_deriv(k, u, net.eta, tol));
  }
  return g;
}

inline void check_order(const char* where, int max_order) {
  wpcn::detail::require(max_order >= 0, where, "K must be >= 0");
  wpcn::detail::require(max_order <= kMaxDerivOrder, where, "K exceeds the derivative order cap (64)");
}

/// Throws when (-1)^k values[k] is negative beyond the rounding scale.
inline void check_alternation(const char* where, const std::vector<double>& values,
                              const std::vector<double>& magnitudes) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double signed_value = (k % 2 == 0) ? values[k] : -values[k];
    const double slack = 64.0 * eps * static_cast<double>(k + 1) * magnitudes[k];
    if (!(signed_value >= -slack)) {
      throw StabilityError(std::string(where) + ": sign alternation violated at order " + std::to_string(k));
    }
  }
}

}  // namespace detail

/// d^k/ds^k L_Z(s) for k = 0..K via the exponential-composition recurrence
///   L^{(i)} = sum_{j<i} C(i-1, j) g^{(i-j)} L^{(j)},   L = e^g.
inline LaplaceDerivs laplace_derivs(double s, int max_order, const NetworkParams& net,
                                    const specfun::RealTol& tol = {}) {
  detail::check_order("laplace_derivs", max_order);
  wpcn::detail::require(s > 0.0 && std::isfinite(s), "laplace_derivs", "s must be finite and > 0");
  const double l0 = laplace_z(s, net, tol);
  const auto g = detail::exponent_derivs(s, max_order, net, tol);

  LaplaceDerivs out{s, std::vector<double>(static_cast<std::size_t>(max_order) + 1, 0.0)};
  std::vector<double> magnitude(out.values.size(), 0.0);
  out.values[0] = l0;
  magnitude[0] = l0;
  std::vector<double> binom{1.0};  // row i-1 of Pascal's triangle
  for (int i = 1; i <= max_order; ++i) {
    double acc = 0.0;
    double mag = 0.0;
    for (int j = 0; j < i; ++j) {
      acc += binom[j] * g[i - j] * out.values[j];
      mag += binom[j] * std::abs(g[i - j]) * magnitude[j];
    }
    out.values[i] = acc;
    magnitude[i] = mag;
    std::vector<double> next(static_cast<std::size_t>(i) + 1, 1.0);
    for (int j = 1; j < i; ++j) next[j] = binom[j - 1] + binom[j];
    binom = std::move(next);
  }
  detail::check_alternation("laplace_derivs", out.values, magnitude);
  return out;
}

/// How the F^{(i)} factors of the Bell-polynomial closed form are read.
enum class BellReading {
  /// F^{(i)} is the shifted function (2u/(eta-2)) 2F1(i+1, i+1-2/eta; i+2-2/eta; -u),
  /// so Upsilon(i) F^{(i)} reproduces the Lemma-5 term. Agrees with the recurrence.
  ShiftedHypergeometric,
  /// F^{(i)} is the full Lemma-5 derivative, as typeset. Upsilon is then applied
  /// twice and the ladder is wrong for K >= 1.
  Printed,
};

/// Upsilon(i, eta) = (-1)^i i! (1-2/eta)_i / (2-2/eta)_i.
inline double upsilon(int i, double eta) {
  const double d = 2.0 / eta;
  const double sign = (i % 2 == 0) ? 1.0 : -1.0;
  return sign * std::tgamma(i + 1.0) * specfun::pochhammer(1.0 - d, i) / specfun::pochhammer(2.0 - d, i);
}

/// Same derivatives through L^{(i)} = L B_i(g', ..., g^{(i)}) with
///   g^{(i)}(u) = -pi lambda ( (-1/(1+u))^{i+1} i! + (i/u) Upsilon(i-1) F^{(i-1)} + Upsilon(i) F^{(i)} )
/// in the normalized argument, rescaled by (P_PB mu)^i.
inline LaplaceDerivs laplace_derivs_bell(double s, int max_order, const NetworkParams& net,
                                         BellReading reading = BellReading::ShiftedHypergeometric,
                                         const specfun::RealTol& tol = {}) {
  detail::check_order("laplace_derivs_bell", max_order);
  wpcn::detail::require(s > 0.0 && std::isfinite(s), "laplace_derivs_bell", "s must be finite and > 0");
  const double l0 = laplace_z(s, net, tol);
  const double kappa = net.energy_scale();
  const double u = kappa * s;
  const double eta = net.eta;
  const double d = 2.0 / eta;

  auto f_term = [&](int i) {
    if (reading == BellReading::Printed) return f_deriv(i, u, eta, tol);
    if (i == 0) return f_function(u, eta, tol);
    const double id = static_cast<double>(i);
    return 2.0 * u / (eta - 2.0) * specfun::gauss_2f1(id + 1.0, id + 1.0 - d, id + 2.0 - d, -u, tol);
  };

  std::vector<double> g_u(static_cast<std::size_t>(max_order), 0.0);
  std::vector<double> f_cache(static_cast<std::size_t>(max_order) + 1, 0.0);
  for (int i = 0; i <= max_order; ++i) f_cache[i] = f_term(i);
  for (int i = 1; i <= max_order; ++i) {
    const double first = std::pow(-1.0 / (1.0 + u), i + 1) * std::tgamma(i + 1.0);
    const double shifted = static_cast<double>(i) / u * upsilon(i - 1, eta) * f_cache[i - 1];
    const double direct = upsilon(i, eta) * f_cache[i];
    g_u[i - 1] = -std::numbers::pi * net.lambda * (first + shifted + direct);
  }

  LaplaceDerivs out{s, std::vector<double>(static_cast<std::size_t>(max_order) + 1, 0.0)};
  double kappa_pow = 1.0;
  for (int i = 0; i <= max_order; ++i) {
    out.values[i] = l0 * kappa_pow * specfun::complete_bell(std::span<const double>(g_u.data(), i));
    kappa_pow *= kappa;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Energy supply

namespace detail {

/// Series terms at normalized argument u = m/(2a) for `count` = n/2 terms.
inline std::vector<double> supply_terms_at(double u, std::int64_t count, const NetworkParams& net,
                                           const specfun::RealTol& tol) {
  if (count > kMaxSupplyTerms) {
    wpcn::detail::domain_fail("energy_supply_prob_mp", "n/2 exceeds the series term cap (20000)");
  }
  const double w = u / (1.0 + u);
  const double d = 2.0 / net.eta;
  const double pl = std::numbers::pi * net.lambda;
  const double log_w = std::log(w);
  const double field_front = 2.0 / net.eta * std::exp(d * std::log(u));

  std::vector<double> kq(static_cast<std::size_t>(count), 0.0);  // k q_k
  for (std::int64_t k = 1; k < count; ++k) {
    const double kd = static_cast<double>(k);
    const double rational = std::exp(kd * log_w - std::log1p(u));
    const double field = field_front * specfun::incomplete_beta(kd - d, 1.0 + d, w, tol);
    kq[k] = kd * pl * (rational + field);
  }

  // c_i carried with a shared log scale so large u cannot overflow.
  constexpr double kRescaleAbove = 1e200;
  std::vector<double> c(static_cast<std::size_t>(count), 0.0);
  double log_scale = log_laplace_z(u / net.energy_scale(), net, tol);
  c[0] = 1.0;
  for (std::int64_t i = 1; i < count; ++i) {
    double acc = 0.0;
    for (std::int64_t k = 1; k <= i; ++k) acc += kq[k] * c[i - k];
    c[i] = acc / static_cast<double>(i);
    if (c[i] > kRescaleAbove) {
      for (std::int64_t j = 0; j <= i; ++j) c[j] /= kRescaleAbove;
      log_scale += std::log(kRescaleAbove);
    }
  }
  for (auto& t : c) t = t == 0.0 ? 0.0 : std::exp(std::log(t) + log_scale);
  return c;
}

inline double supply_prob_from_terms(const std::vector<double>& terms) {
  double sum = 0.0;
  double comp = 0.0;
  for (double t : terms) {
    const double y = t - comp;
    const double next = sum + y;
    comp = (next - sum) - y;
    sum = next;
  }
  const double p = 1.0 - sum;
  if (!(p >= -1e-9 && p <= 1.0 + 1e-9)) {
    throw StabilityError("energy_supply_prob_mp: series result left [0, 1]");
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace detail

/// Terms T_i = (-x)^i / i! L_Z^{(i)}(x), i < n/2, at x = m / (2 P_t), whose
/// sum is the outage probability. Every term is nonnegative.
///
/// Evaluated as T_i = L_Z(x) c_i with c_i = [t^i] L_Z(x(1-t)) / L_Z(x):
///   c_0 = 1,  c_i = (1/i) sum_{k=1}^{i} k q_k c_{i-k},
///   q_k = pi lambda ( w^k/(1+u) + (2/eta) u^{2/eta} B(w; k - 2/eta, 1 + 2/eta) ),
/// u = m/(2a), w = u/(1+u), B the incomplete beta. The q_k are the Taylor
/// coefficients of ln L_Z(x(1-t)) and are all positive, so nothing cancels.
inline std::vector<double> supply_series_terms(std::int64_t m, std::int64_t n, double p_t,
                                               const NetworkParams& net, const specfun::RealTol& tol = {}) {
  net.validate();
  wpcn::detail::require(m >= 1, "supply_series_terms", "m must be >= 1");
  wpcn::detail::require(n >= 2 && n % 2 == 0, "supply_series_terms", "n must be an even integer >= 2");
  wpcn::detail::require(p_t > 0.0 && std::isfinite(p_t), "supply_series_terms", "p_t must be finite and > 0");
  const double u = static_cast<double>(m) / (2.0 * net.power_ratio(p_t));
  return detail::supply_terms_at(u, n / 2, net, tol);
}

/// Supply probability as a function of the normalized argument u = m/(2a)
/// alone; it is increasing in u.
inline double supply_prob_at_argument(double u, std::int64_t n, const NetworkParams& net,
                                      const specfun::RealTol& tol = {}) {
  net.validate();
  wpcn::detail::require(n >= 2 && n % 2 == 0, "supply_prob_at_argument", "n must be an even integer >= 2");
  wpcn::detail::require(u > 0.0, "supply_prob_at_argument", "u must be > 0");
  if (std::isinf(u)) return 1.0;
  return detail::supply_prob_from_terms(detail::supply_terms_at(u, n / 2, net, tol));
}

/// Probability that the energy harvested over m slots covers an n-symbol
/// Gaussian codeword of power P_t:
///   1 - sum_{i<n/2} (-x)^i/i! L_Z^{(i)}(x),  x = m/(2 P_t).
/// P_t = 0 returns the a -> 0 limit 1.
inline double energy_supply_prob_mp(std::int64_t m, std::int64_t n, double p_t, const NetworkParams& net,
                                    const specfun::RealTol& tol = {}) {
  net.validate();
  wpcn::detail::require(n >= 2 && n % 2 == 0, "energy_supply_prob_mp", "n must be an even integer >= 2");
  wpcn::detail::require(m >= 1, "energy_supply_prob_mp", "m must be >= 1");
  wpcn::detail::require(p_t >= 0.0 && std::isfinite(p_t), "energy_supply_prob_mp", "p_t must be finite and >= 0");
  if (p_t == 0.0) return 1.0;
  return detail::supply_prob_from_terms(supply_series_terms(m, n, p_t, net, tol));
}

/// Same probability summed directly from the derivative ladder; limited to
/// n/2 - 1 <= 64 and intended for cross-checking.
inline double energy_supply_prob_mp_ladder(std::int64_t m, std::int64_t n, double p_t, const NetworkParams& net,
                                           const specfun::RealTol& tol = {}) {
  wpcn::detail::require(n >= 2 && n % 2 == 0, "energy_supply_prob_mp_ladder", "n must be an even integer >= 2");
  wpcn::detail::require(m >= 1 && p_t > 0.0, "energy_supply_prob_mp_ladder", "m must be >= 1 and p_t > 0");
  const int top = static_cast<int>(std::min<std::int64_t>(n / 2 - 1, kMaxDerivOrder + 1));
  detail::check_order("energy_supply_prob_mp_ladder", top);
  const double x = static_cast<double>(m) / (2.0 * p_t);
  const auto ladder = laplace_derivs(x, top, net, tol);
  double sum = 0.0;
  double coef = 1.0;  // (-x)^i / i!
  for (int i = 0; i <= top; ++i) {
    sum += coef * ladder.values[i];
    coef *= -x / (i + 1.0);
  }
  return 1.0 - sum;
}

// ---------------------------------------------------------------------------
// Rate

/// Finite-blocklength rate with beacons drawn from the Poisson field. Feasible
/// when the supply probability reaches 2/(2+eps) and n meets the transmit
/// floor (rounded to the even blocklength the planner uses).
inline RateResult achievable_rate_mp(const BlocklengthPlan& plan, double p_t, double sigma2, const NetworkParams& net,
                                     const specfun::RealTol& tol = {}) {
  plan.validate();
  net.validate();
  wpcn::detail::require(p_t >= 0.0 && std::isfinite(p_t), "achievable_rate_mp", "p_t must be finite and >= 0");
  wpcn::detail::require(sigma2 > 0.0, "achievable_rate_mp", "sigma2 must be > 0");
  const double raw = fbl_rate_numerator(plan.n, p_t / sigma2, plan.epsilon) / static_cast<double>(plan.total());
  bool feasible = plan.epsilon > 0.0 && plan.m >= 1 &&
                  plan.n >= single::rounded_transmit_floor(plan.epsilon);
  if (feasible) {
    feasible = energy_supply_prob_mp(plan.m, plan.n, p_t, net, tol) >= 2.0 / (2.0 + plan.epsilon);
  }
  return RateResult::from_raw(raw, feasible);
}

}  // namespace wpcn::multi
