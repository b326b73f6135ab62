#pragma once

// Special functions used by the closed forms: Lambert W (principal branch),
// the Gauss hypergeometric function on the non-positive real axis and its
// parameter-shifted derivatives, Pochhammer symbols, complete Bell polynomials
// and the (unregularized) incomplete beta function.
//
// Everything here is a pure function of its arguments and is safe to call
// concurrently.

#include <math.h>  // lgamma_r

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "wpcn/error.hpp"

namespace wpcn::specfun {

/// Stopping rule shared by the iterative and series evaluations.
struct RealTol {
  double rel_tol = 1e-12;
  int max_iter = 100000;

  void validate() const {
    detail::require(rel_tol > 0.0 && std::isfinite(rel_tol), "RealTol", "rel_tol must be > 0");
    detail::require(max_iter >= 1, "RealTol", "max_iter must be >= 1");
  }
};

namespace detail {

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

inline bool is_near_integer(double x, double slack = 1e-9) {
  return std::abs(x - std::nearbyint(x)) <= slack * std::max(1.0, std::abs(x));
}

/// log|Gamma(x)| with the sign of Gamma(x). `sign == 0` flags a pole, where
/// 1/Gamma(x) vanishes.
struct SignedLog {
  double log_abs = 0.0;
  int sign = 1;
};

inline double lgamma_pos(double x) {
  int sign = 1;
  return ::lgamma_r(x, &sign);
}

inline SignedLog log_gamma(double x) {
  if (is_nonpositive_integer(x)) return {std::numeric_limits<double>::infinity(), 0};
  int sign = 1;
  const double l = ::lgamma_r(x, &sign);
  return {l, sign};
}

/// Partial sum of sum_j (a)_j (b)_j / ((c)_j j!) z^j. Stops once the geometric
/// tail bound built from the current term ratio falls below rel_tol * |sum|.
inline double hyp2f1_series(double a, double b, double c, double z, const RealTol& tol) {
  double term = 1.0;
  double sum = 1.0;
  double comp = 0.0;
  for (int j = 0; j < tol.max_iter; ++j) {
    const double jd = static_cast<double>(j);
    const double ratio = (a + jd) * (b + jd) / ((c + jd) * (jd + 1.0)) * z;
    term *= ratio;
    if (term == 0.0) return sum + comp;  // terminating series
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    const double rho = std::max(std::abs(ratio), std::abs(z));
    if (rho < 1.0 && std::abs(term) * rho / (1.0 - rho) <= tol.rel_tol * std::abs(sum)) {
      return sum;
    }
  }
  throw ConvergenceError("gauss_2f1: series did not converge within max_iter terms");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Lambert W

/// Principal branch W0 of the Lambert W function, x >= -1/e.
///
/// Halley iteration seeded by the branch-point series near -1/e, a log1p
/// based guess on the middle range and the log asymptote for large x.
inline double lambert_w0(double x, const RealTol& tol = {}) {
  tol.validate();
  constexpr double inv_e = 1.0 / std::numbers::e;
  if (std::isnan(x)) wpcn::detail::domain_fail("lambert_w0", "argument is NaN");
  if (x < -inv_e) {
    // Tolerate the rounding of arguments assembled as (something) * e^-1.
    if (x >= -inv_e * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) return -1.0;
    wpcn::detail::domain_fail("lambert_w0", "argument below -1/e");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;

  const double p2 = 2.0 * (1.0 + std::numbers::e * x);
  double w;
  if (x < -0.25) {
    const double p = std::sqrt(std::max(p2, 0.0));
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
    if (p < 1e-4) return w;  // series error is O(p^5) here
  } else if (x < 3.0) {
    const double l = std::log1p(x);
    w = l * (1.0 - std::log1p(l) / (2.0 + l));
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int i = 0; i < tol.max_iter; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (!std::isfinite(w)) throw ConvergenceError("lambert_w0: iteration diverged");
    if (std::abs(step) <= tol.rel_tol * (1.0 + std::abs(w))) return w;
  }
  throw ConvergenceError("lambert_w0: iteration cap reached");
}

// ---------------------------------------------------------------------------
// Pochhammer, Bell

/// Rising factorial x (x+1) ... (x+k-1); 1 for k = 0.
inline double pochhammer(double x, int k) {
  wpcn::detail::require(k >= 0, "pochhammer", "k must be >= 0");
  double p = 1.0;
  for (int j = 0; j < k; ++j) p *= x + j;
  return p;
}

/// Complete Bell polynomial B_i(u_1, ..., u_i), i = u.size().
/// B_0 = 1, B_{n+1} = sum_{k=0}^{n} C(n,k) B_{n-k} u_{k+1}.
inline double complete_bell(std::span<const double> u) {
  const std::size_t order = u.size();
  std::vector<double> bell(order + 1, 0.0);
  std::vector<double> binom{1.0};  // row n of Pascal's triangle
  bell[0] = 1.0;
  for (std::size_t n = 0; n < order; ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k <= n; ++k) acc += binom[k] * bell[n - k] * u[k];
    bell[n + 1] = acc;
    std::vector<double> next(n + 2, 1.0);
    for (std::size_t k = 1; k <= n; ++k) next[k] = binom[k - 1] + binom[k];
    binom = std::move(next);
  }
  return bell[order];
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric function

/// 2F1(a, b; c; z) for z <= 0 or |z| < 1.
///
/// Negative arguments always go through the Pfaff transformation
///   2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1)),
/// which maps z onto [0, 1). Far out on the negative axis (inner argument
/// above 0.9 and |z| large against the parameters) the inner function is
/// continued around w = 1 with the 1-w connection formula, which needs b - a
/// away from the integers; otherwise the inner series is summed directly. In
/// that degenerate case the term budget grows like 1/(1-w) = 1-z, capped at
/// 2e8 terms.
inline double gauss_2f1(double a, double b, double c, double z, const RealTol& tol = {}) {
  tol.validate();
  using detail::log_gamma;
  if (detail::is_nonpositive_integer(c)) {
    wpcn::detail::domain_fail("gauss_2f1", "c is a non-positive integer");
  }
  if (std::isnan(z) || !(z < 1.0)) wpcn::detail::domain_fail("gauss_2f1", "requires z < 1");
  if (!std::isfinite(z)) wpcn::detail::domain_fail("gauss_2f1", "z must be finite");
  if (z == 0.0) return 1.0;
  if (z > 0.0) return detail::hyp2f1_series(a, b, c, z, tol);

  const double log_one_minus_z = std::log1p(-z);
  const double w = -z / (1.0 - z);
  const double b_inner = c - b;
  const double scale = std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
  const bool far = w > 0.9 && -z > 4.0 * scale;

  if (!far || detail::is_near_integer(b - a)) {
    RealTol budget = tol;
    if (far) {
      const double needed = std::min(2e8, 64.0 * (1.0 - z));
      budget.max_iter = std::max(tol.max_iter, static_cast<int>(needed));
    }
    const double inner = detail::hyp2f1_series(a, b_inner, c, w, budget);
    return std::exp(-a * log_one_minus_z) * inner;
  }

  // 2F1(a, b'; c; w) = A 2F1(a, b'; a+b'-c+1; y) + y^s B 2F1(c-a, c-b'; s+1; y)
  // with y = 1 - w = 1/(1-z) and s = c - a - b'.
  const double s = c - a - b_inner;
  const double log_y = -log_one_minus_z;
  const auto gc = log_gamma(c);
  const auto gs = log_gamma(s);
  const auto gms = log_gamma(-s);
  const auto gca = log_gamma(c - a);
  const auto gcb = log_gamma(c - b_inner);
  const auto ga = log_gamma(a);
  const auto gb = log_gamma(b_inner);

  double result = 0.0;
  if (gca.sign != 0 && gcb.sign != 0) {
    const double series = detail::hyp2f1_series(a, b_inner, a + b_inner - c + 1.0, 1.0 - w, tol);
    const double log_coef = gc.log_abs + gs.log_abs - gca.log_abs - gcb.log_abs;
    const int sign = gc.sign * gs.sign * gca.sign * gcb.sign;
    result += sign * std::exp(log_coef - a * log_one_minus_z) * series;
  }
  if (ga.sign != 0 && gb.sign != 0) {
    const double series = detail::hyp2f1_series(c - a, c - b_inner, s + 1.0, 1.0 - w, tol);
    const double log_coef = gc.log_abs + gms.log_abs - ga.log_abs - gb.log_abs;
    const int sign = gc.sign * gms.sign * ga.sign * gb.sign;
    result += sign * std::exp(log_coef + s * log_y - a * log_one_minus_z) * series;
  }
  return result;
}

/// k-th derivative in x1 of 2F1(1, 1-2/eta; 2-2/eta; -x1):
///   (-1)^k k! (1-2/eta)_k / (2-2/eta)_k * 2F1(k+1, k+1-2/eta; k+2-2/eta; -x1).
inline double gauss_2f1_deriv(int k, double x1, double eta, const RealTol& tol = {}) {
  wpcn::detail::require(k >= 0, "gauss_2f1_deriv", "k must be >= 0");
  wpcn::detail::require(x1 >= 0.0, "gauss_2f1_deriv", "x1 must be >= 0");
  wpcn::detail::require(eta > 2.0, "gauss_2f1_deriv", "eta must be > 2");
  const double d = 2.0 / eta;
  if (k == 0) return gauss_2f1(1.0, 1.0 - d, 2.0 - d, -x1, tol);
  const double kd = static_cast<double>(k);
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  const double coef = sign * std::tgamma(kd + 1.0) * pochhammer(1.0 - d, k) / pochhammer(2.0 - d, k);
  return coef * gauss_2f1(kd + 1.0, kd + 1.0 - d, kd + 2.0 - d, -x1, tol);
}

// ---------------------------------------------------------------------------
// Incomplete beta

namespace detail {

// Modified Lentz evaluation of the standard continued fraction for I_x(a, b).
inline double beta_continued_fraction(double a, double b, double x, const RealTol& tol) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= tol.max_iter; ++m) {
    const double md = m;
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) <= std::max(tol.rel_tol, 4.0 * std::numeric_limits<double>::epsilon())) {
      return h;
    }
  }
  throw ConvergenceError("incomplete_beta: continued fraction did not converge");
}

}  // namespace detail

/// Unregularized incomplete beta B_x(a, b) = int_0^x t^{a-1} (1-t)^{b-1} dt, a, b > 0.
inline double incomplete_beta(double a, double b, double x, const RealTol& tol = {}) {
  tol.validate();
  wpcn::detail::require(a > 0.0 && b > 0.0, "incomplete_beta", "a and b must be > 0");
  wpcn::detail::require(x >= 0.0 && x <= 1.0, "incomplete_beta", "x must lie in [0, 1]");
  const double log_beta = detail::lgamma_pos(a) + detail::lgamma_pos(b) - detail::lgamma_pos(a + b);
  if (x == 0.0) return 0.0;
  if (x == 1.0) return std::exp(log_beta);
  const double log_front = a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * detail::beta_continued_fraction(a, b, x, tol) / a;
  }
  return std::exp(log_beta) - std::exp(log_front) * detail::beta_continued_fraction(b, a, 1.0 - x, tol) / b;
}

}  // namespace wpcn::specfun
