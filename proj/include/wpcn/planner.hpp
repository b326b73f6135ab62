#pragma once

// Minimum-latency blocklength planning: the shortest transmit phase the error
// target allows, then the shortest harvest phase that powers it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "wpcn/error.hpp"
#include "wpcn/multi_pb.hpp"
#include "wpcn/single_pb.hpp"
#include "wpcn/types.hpp"

namespace wpcn::planner {

enum class Mode { Single, Multi };

struct PlanRequest {
  double epsilon = 0.05;
  Mode mode = Mode::Single;
  double a = 0.0;    ///< single-beacon power ratio P_t / P_E
  double p_t = 0.0;  ///< multi-beacon transmit power
  multi::NetworkParams net{};

  void validate() const {
    wpcn::detail::require(epsilon > 0.0 && epsilon < 1.0, "PlanRequest", "epsilon must lie in (0, 1)");
    if (mode == Mode::Single) {
      wpcn::detail::require(a >= 0.0 && std::isfinite(a), "PlanRequest", "a must be finite and >= 0");
    } else {
      wpcn::detail::require(p_t >= 0.0 && std::isfinite(p_t), "PlanRequest", "p_t must be finite and >= 0");
      net.validate();
    }
  }
};

struct Plan {
  std::int64_t m = 0;
  std::int64_t n = 2;
  double epsilon = 0.05;
  double overhead = 1.0;  ///< (m + n) / n
  bool feasible = false;  ///< the mode's rate-theorem constraints hold

  [[nodiscard]] std::int64_t total() const { return m + n; }
  [[nodiscard]] BlocklengthPlan blocklengths() const { return {m, n, epsilon}; }
};

/// Even transmit blocklength closest to (ln((2+eps)/eps^2))^4, at least 2.
inline std::int64_t min_transmit_blocklength(double epsilon) {
  return single::rounded_transmit_floor(epsilon);
}

/// Smallest m with m >= 2a/((1+eps/2)^{2/n} - 1) and m above the harvest floor,
/// so that the returned (m, n) satisfies the harvest floor and the transmit cap.
/// For n at or above the real transmit floor the first bound dominates.
inline std::int64_t min_harvest_blocklength(std::int64_t n, double a, double epsilon) {
  wpcn::detail::require(n >= 2 && n % 2 == 0, "min_harvest_blocklength", "n must be an even integer >= 2");
  wpcn::detail::require(a >= 0.0 && std::isfinite(a), "min_harvest_blocklength", "a must be finite and >= 0");
  wpcn::detail::require(epsilon > 0.0 && epsilon < 1.0, "min_harvest_blocklength", "epsilon must lie in (0, 1)");
  if (a == 0.0) return 0;
  const double bound = std::max(single::harvest_for_transmit_bound(n, a, epsilon), single::harvest_floor_bound(a, epsilon));
  wpcn::detail::require(bound < 9e18, "min_harvest_blocklength", "harvest blocklength overflows");
  auto m = static_cast<std::int64_t>(std::ceil(bound));
  // Absorb rounding in the bound so the checks below agree with the ceiling.
  while (m > 1 && single::check_constraints(m - 1, n, a, epsilon).theorem_pair()) --m;
  while (!single::check_constraints(m, n, a, epsilon).theorem_pair()) ++m;
  return m;
}

/// Smallest m >= 1 whose multi-beacon supply probability reaches 2/(2+eps),
/// by doubling then bisection.
inline std::int64_t min_harvest_blocklength_mp(std::int64_t n, double p_t, const multi::NetworkParams& net,
                                               double epsilon) {
  wpcn::detail::require(epsilon > 0.0 && epsilon < 1.0, "min_harvest_blocklength_mp", "epsilon must lie in (0, 1)");
  net.validate();
  constexpr std::int64_t kLimit = 1'000'000'000;
  const double target = 2.0 / (2.0 + epsilon);
  auto ok = [&](std::int64_t m) { return multi::energy_supply_prob_mp(m, n, p_t, net) >= target; };
  if (ok(1)) return 1;
  std::int64_t lo = 1;  // fails
  std::int64_t hi = 2;
  while (!ok(hi)) {
    lo = hi;
    if (hi >= kLimit) {
      throw UnsatisfiableError("min_harvest_blocklength_mp: supply target not met at m = 1e9");
    }
    hi = std::min(hi * 2, kLimit);
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

/// Smallest normalized argument u = m/(2a) at which the multi-beacon supply
/// probability reaches 2/(2+eps) for this n. The required harvest length for
/// power P_t is then m = ceil(2 u P_t / (mu P_PB)).
inline double min_supply_argument(std::int64_t n, const multi::NetworkParams& net, double epsilon) {
  wpcn::detail::require(epsilon > 0.0 && epsilon < 1.0, "min_supply_argument", "epsilon must lie in (0, 1)");
  const double target = 2.0 / (2.0 + epsilon);
  auto ok = [&](double u) { return multi::supply_prob_at_argument(u, n, net) >= target; };
  double lo = 1.0;
  double hi = 1.0;
  if (ok(hi)) {
    while (ok(lo)) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) return 0.0;
    }
  } else {
    while (!ok(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw UnsatisfiableError("min_supply_argument: supply target unreachable");
    }
  }
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

struct ScalingRate {
  double exact = 0.0;   ///< a / ln(1 + eps/2)
  double approx = 0.0;  ///< 2a / eps
};

/// Growth rate of the minimal harvest length per transmit symbol.
inline ScalingRate scaling_rate(double a, double epsilon) {
  wpcn::detail::require(a >= 0.0, "scaling_rate", "a must be >= 0");
  wpcn::detail::require(epsilon > 0.0 && epsilon < 1.0, "scaling_rate", "epsilon must lie in (0, 1)");
  return {a / std::log1p(0.5 * epsilon), 2.0 * a / epsilon};
}

/// 1 + 2a/eps.
inline double harvest_overhead(double a, double epsilon) {
  wpcn::detail::require(a >= 0.0, "harvest_overhead", "a must be >= 0");
  wpcn::detail::require(epsilon > 0.0 && epsilon < 1.0, "harvest_overhead", "epsilon must lie in (0, 1)");
  return 1.0 + 2.0 * a / epsilon;
}

inline Plan plan_single(double a, double epsilon) {
  Plan p;
  p.epsilon = epsilon;
  p.n = min_transmit_blocklength(epsilon);
  p.m = min_harvest_blocklength(p.n, a, epsilon);
  p.overhead = static_cast<double>(p.total()) / static_cast<double>(p.n);
  p.feasible = single::check_constraints(p.m, p.n, a, epsilon).theorem_pair();
  return p;
}

inline Plan plan_multi(double p_t, const multi::NetworkParams& net, double epsilon) {
  Plan p;
  p.epsilon = epsilon;
  p.n = min_transmit_blocklength(epsilon);
  p.m = min_harvest_blocklength_mp(p.n, p_t, net, epsilon);
  p.overhead = static_cast<double>(p.total()) / static_cast<double>(p.n);
  p.feasible = true;
  return p;
}

inline Plan plan(const PlanRequest& req) {
  req.validate();
  return req.mode == Mode::Single ? plan_single(req.a, req.epsilon) : plan_multi(req.p_t, req.net, req.epsilon);
}

}  // namespace wpcn::planner
