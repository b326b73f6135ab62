#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "wpcn/error.hpp"

namespace wpcn {

/// Physical parameters of a single harvesting link. Powers are energies per
/// symbol in any consistent unit.
struct LinkParams {
  double p_t = 0.0;     ///< transmit power
  double p_e = 1.0;     ///< mean harvested power
  double sigma2 = 1.0;  ///< receiver noise power

  /// a = P_t / P_E
  [[nodiscard]] double power_ratio() const { return p_t / p_e; }
  /// gamma = P_t / sigma^2
  [[nodiscard]] double snr() const { return p_t / sigma2; }

  void validate() const {
    detail::require(p_t >= 0.0 && std::isfinite(p_t), "LinkParams", "p_t must be finite and >= 0");
    detail::require(p_e > 0.0 && std::isfinite(p_e), "LinkParams", "p_e must be finite and > 0");
    detail::require(sigma2 > 0.0 && std::isfinite(sigma2), "LinkParams", "sigma2 must be finite and > 0");
  }

  static LinkParams from_ratio(double a, double p_e, double sigma2) { return {a * p_e, p_e, sigma2}; }
};

/// Save-then-transmit frame: m harvesting slots followed by n transmit slots.
struct BlocklengthPlan {
  std::int64_t m = 0;
  std::int64_t n = 2;
  double epsilon = 0.1;

  [[nodiscard]] std::int64_t total() const { return m + n; }

  void validate() const {
    detail::require(m >= 0, "BlocklengthPlan", "m must be >= 0");
    detail::require(n >= 2 && n % 2 == 0, "BlocklengthPlan", "n must be an even integer >= 2");
    detail::require(epsilon >= 0.0 && epsilon < 1.0, "BlocklengthPlan", "epsilon must lie in [0, 1)");
  }
};

/// An achievable rate. Negative raw values are reported as a clamped zero;
/// the raw value stays available for diagnostics.
struct RateResult {
  double rate_nats = 0.0;
  double rate_bits = 0.0;
  bool feasible = false;
  bool clamped = false;
  double raw_nats = 0.0;

  static RateResult from_raw(double raw_nats, bool feasible) {
    RateResult r;
    r.raw_nats = raw_nats;
    r.clamped = !(raw_nats >= 0.0);
    r.rate_nats = r.clamped ? 0.0 : raw_nats;
    r.rate_bits = r.rate_nats / std::numbers::ln2;
    r.feasible = feasible;
    return r;
  }
};

inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

/// Numerator of the finite-blocklength rate, in nats:
///   (n/2) ln(1+gamma) - sqrt(((2+eps)/eps) (gamma/(gamma+1)) n) - n^{1/4} - 1.
/// eps = 0 with gamma > 0 gives -inf.
inline double fbl_rate_numerator(std::int64_t n, double gamma, double epsilon) {
  const double nd = static_cast<double>(n);
  const double dispersion = gamma / (gamma + 1.0);
  double backoff = 0.0;
  if (dispersion > 0.0) {
    backoff = epsilon > 0.0 ? std::sqrt((2.0 + epsilon) / epsilon * dispersion * nd)
                            : std::numeric_limits<double>::infinity();
  }
  return 0.5 * nd * std::log1p(gamma) - backoff - std::pow(nd, 0.25) - 1.0;
}

}  // namespace wpcn
