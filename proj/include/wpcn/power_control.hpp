#pragma once

// Numerical transmit-power optimization at finite blocklength, with (m, n)
// re-planned for every candidate power.
//
// For a fixed m the rate only grows with P_t, so each harvest length has its
// best power at the right edge of its plateau. After the golden-section
// search, the plateau edges next to the incumbent m are evaluated as well.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "wpcn/error.hpp"
#include "wpcn/multi_pb.hpp"
#include "wpcn/planner.hpp"
#include "wpcn/search.hpp"
#include "wpcn/single_pb.hpp"
#include "wpcn/types.hpp"

namespace wpcn::power {

struct OptimalPower {
  double p_t = 0.0;
  RateResult rate{};
  std::int64_t m = 0;
  std::int64_t n = 2;
};

/// Plateau edges inspected on either side of the search result.
inline constexpr std::int64_t kPlateauNeighbours = 8;

namespace detail {

inline constexpr double kEdgeShrink = 1.0 - 1e-12;

template <class Evaluate>
OptimalPower polish_plateaus(OptimalPower best, double p_lo, double p_hi, double edge_per_m, Evaluate evaluate) {
  for (std::int64_t m = best.m - kPlateauNeighbours; m <= best.m + kPlateauNeighbours; ++m) {
    if (m < 1) continue;
    const double p = static_cast<double>(m) * edge_per_m * kEdgeShrink;
    if (p < p_lo || p > p_hi) continue;
    const auto cand = evaluate(p);
    if (cand.rate.rate_nats > best.rate.rate_nats) best = cand;
  }
  return best;
}

}  // namespace detail

/// Transmit power maximizing the single-beacon finite-blocklength rate under
/// minimum-latency planning, searched on ln P_t over [1e-6 P_E, P_E].
inline OptimalPower optimal_power_fbl(double epsilon, double p_e, double sigma2,
                                      const search::SearchConfig& cfg = {}) {
  wpcn::detail::require(epsilon > 0.0 && epsilon < 1.0, "optimal_power_fbl", "epsilon must lie in (0, 1)");
  LinkParams{0.0, p_e, sigma2}.validate();
  const std::int64_t n = planner::min_transmit_blocklength(epsilon);

  auto evaluate = [&](double p_t) {
    const LinkParams link{p_t, p_e, sigma2};
    const std::int64_t m = planner::min_harvest_blocklength(n, link.power_ratio(), epsilon);
    return OptimalPower{p_t, single::achievable_rate_fbl({m, n, epsilon}, link), m, n};
  };
  const double p_lo = 1e-6 * p_e;
  const double p_hi = p_e;
  const auto found = search::golden_section_max([&](double x) { return evaluate(std::exp(x)).rate.rate_nats; },
                                                std::log(p_lo), std::log(p_hi), cfg);
  OptimalPower best = evaluate(std::exp(found.x));

  // Largest a served by a given m: m * min(e_n, e_floor) / 2.
  const double budget = 2.0 * std::log1p(0.5 * epsilon);
  const double e_min = std::min(std::expm1(budget / static_cast<double>(n)),
                                std::expm1(budget / single::transmit_floor_bound(epsilon)));
  return detail::polish_plateaus(best, p_lo, p_hi, 0.5 * e_min * p_e, evaluate);
}

/// Transmit power maximizing the multi-beacon rate at transmit blocklength n
/// (0 selects the minimum-latency n), searched on ln P_t over
/// [1e-6 E[Z], E[Z]].
inline OptimalPower optimal_power_mp(double epsilon, double sigma2, const multi::NetworkParams& net,
                                     std::int64_t n = 0, const search::SearchConfig& cfg = {}) {
  wpcn::detail::require(epsilon > 0.0 && epsilon < 1.0, "optimal_power_mp", "epsilon must lie in (0, 1)");
  wpcn::detail::require(sigma2 > 0.0, "optimal_power_mp", "sigma2 must be > 0");
  net.validate();
  if (n == 0) n = planner::min_transmit_blocklength(epsilon);
  wpcn::detail::require(n >= 2 && n % 2 == 0, "optimal_power_mp", "n must be an even integer >= 2");

  // The supply probability depends on (m, P_t) only through u = m kappa / (2 P_t).
  const double u_min = planner::min_supply_argument(n, net, epsilon);
  const double kappa = net.energy_scale();
  const std::int64_t n_floor = planner::min_transmit_blocklength(epsilon);

  auto evaluate = [&](double p_t) {
    auto m = static_cast<std::int64_t>(std::ceil(2.0 * u_min * p_t / kappa));
    m = std::max<std::int64_t>(m, 1);
    const double raw = fbl_rate_numerator(n, p_t / sigma2, epsilon) / static_cast<double>(m + n);
    return OptimalPower{p_t, RateResult::from_raw(raw, n >= n_floor), m, n};
  };
  const double mean = multi::mean_harvested(net);
  const double p_lo = 1e-6 * mean;
  const double p_hi = mean;
  const auto found = search::golden_section_max([&](double x) { return evaluate(std::exp(x)).rate.rate_nats; },
                                                std::log(p_lo), std::log(p_hi), cfg);
  OptimalPower best = evaluate(std::exp(found.x));
  best = detail::polish_plateaus(best, p_lo, p_hi, kappa / (2.0 * u_min), evaluate);

  // Re-check the winner against the direct closed form.
  best.rate = multi::achievable_rate_mp({best.m, best.n, epsilon}, best.p_t, sigma2, net);
  return best;
}

}  // namespace wpcn::power
