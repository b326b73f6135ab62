#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles/finite_diff.hpp"
#include "oracles/property.hpp"
#include "wpcn/planner.hpp"
#include "wpcn/single_pb.hpp"

using namespace wpcn;
namespace sp = wpcn::single;

// ---------------------------------------------------------------- supply probability

TEST(SupplyProb, Values) {
  EXPECT_EQ(sp::energy_supply_prob(100, 50, 0.0), 1.0);
  EXPECT_NEAR(sp::energy_supply_prob(2, 2, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(sp::energy_supply_prob(100, 50, 0.1), 0.951276923837507687, 1e-14);
  EXPECT_NEAR(sp::energy_outage_prob(100, 50, 0.1), 1.0 - 0.951276923837507687, 1e-14);
  EXPECT_EQ(sp::energy_outage_prob(100, 50, 0.0), 0.0);
  EXPECT_NEAR(sp::energy_outage_prob(2, 2, 1.0), 0.5, 1e-15);
}

TEST(SupplyProb, DomainErrors) {
  EXPECT_THROW(sp::energy_supply_prob(0, 2, 1.0), DomainError);
  EXPECT_THROW(sp::energy_supply_prob(4, 3, 1.0), DomainError);
  EXPECT_THROW(sp::energy_supply_prob(4, 2, -1.0), DomainError);
}

TEST(SupplyProb, FlagsPointsOutsideStatedRange) {
  EXPECT_TRUE(sp::supply_formula_in_stated_range(10, 4.9));
  EXPECT_FALSE(sp::supply_formula_in_stated_range(10, 5.0));
  // Still finite and a probability there.
  const double p = sp::energy_supply_prob(10, 4, 50.0);
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1.0);
}

TEST(SupplyProb, MonotoneInEachArgument) {
  prop::for_all(500, 21, [](prop::Gen& g) {
    const auto m = g.integer(1, 100000);
    const auto n = g.even(2, 20000);
    const double a = g.log_uniform(1e-4, 10.0);
    const double p = sp::energy_supply_prob(m, n, a);
    EXPECT_LT(sp::energy_supply_prob(m, n + 2, a), p);
    EXPECT_LT(sp::energy_supply_prob(m, n, a * 1.01), p);
    EXPECT_GT(sp::energy_supply_prob(m + 1, n, a), p);
  });
}

TEST(SupplyProb, MinPowerRatioInvertsSupply) {
  EXPECT_EQ(sp::min_power_ratio(10, 4, 1.0), 0.0);
  EXPECT_NEAR(sp::min_power_ratio(2, 2, 0.5), 1.0, 1e-15);
  EXPECT_NEAR(sp::min_power_ratio(1500, 1000, 0.9), 0.158057425913780637, 1e-14);
  prop::for_all(500, 22, [](prop::Gen& g) {
    const auto m = g.integer(1, 100000);
    const auto n = g.even(2, 20000);
    const double rho = g.uniform(0.01, 0.999999);
    EXPECT_NEAR(sp::energy_supply_prob(m, n, sp::min_power_ratio(m, n, rho)), rho, 1e-10);
  });
  EXPECT_THROW(sp::min_power_ratio(10, 4, 0.0), DomainError);
  EXPECT_THROW(sp::min_power_ratio(10, 4, 1.5), DomainError);
}

TEST(SupplyProb, DoublingHarvestDoublesAdmissibleRatio) {
  for (double rho : {0.5, 0.9, 0.99}) {
    EXPECT_NEAR(sp::min_power_ratio(2000, 500, rho), 2.0 * sp::min_power_ratio(1000, 500, rho),
                1e-12 * sp::min_power_ratio(2000, 500, rho));
  }
}

TEST(SupplyLimit, ValuesAndUpperBoundLaw) {
  EXPECT_NEAR(sp::asymptotic_supply_limit(1e-12, 3.0), 1.0, 1e-12);
  EXPECT_NEAR(sp::asymptotic_supply_limit(2.0, 2.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(sp::asymptotic_supply_limit(0.1, 2.0), 0.951229424500714009, 1e-15);
  // P_es(cn, n, a) decreases towards the limit from above: (1+x)^{-n/2} >= e^{-nx/2}.
  EXPECT_NEAR(sp::energy_supply_prob(2'000'000, 1'000'000, 0.1), sp::asymptotic_supply_limit(0.1, 2.0), 1e-7);
  prop::for_all(300, 23, [](prop::Gen& g) {
    const double c = g.uniform(0.5, 50.0);
    const double a = g.log_uniform(1e-3, 5.0);
    const auto n = g.even(2, 1'000'000);
    const auto m = static_cast<std::int64_t>(std::llround(c * static_cast<double>(n)));
    const double c_eff = static_cast<double>(m) / static_cast<double>(n);
    const double limit = sp::asymptotic_supply_limit(a, c_eff);
    EXPECT_GE(sp::energy_supply_prob(m, n, a), limit * (1 - 1e-12));
    EXPECT_GE(sp::energy_supply_prob(m, n, a), sp::energy_supply_prob(2 * m, 2 * n, a) * (1 - 1e-12));
  });
}

// ---------------------------------------------------------------- constraints

TEST(Constraints, TransmitCapIsHarvestForTransmitRewritten) {
  // The transmit cap and the harvest requirement for n are the same inequality.
  prop::for_all(2000, 31, [](prop::Gen& g) {
    const double eps = g.log_uniform(1e-3, 0.9);
    const double a = g.log_uniform(1e-5, 10.0);
    const auto n = g.even(2, 200000);
    const double m_edge = sp::harvest_for_transmit_bound(n, a, eps);
    for (double f : {0.9, 0.999, 1.001, 1.1}) {
      const auto m = static_cast<std::int64_t>(std::ceil(f * m_edge));
      if (std::abs(static_cast<double>(m) - m_edge) < 1e-9 * m_edge) continue;
      const auto c = sp::check_constraints(m, n, a, eps);
      EXPECT_EQ(c.transmit_cap, c.harvest_for_transmit) << "m=" << m << " n=" << n << " a=" << a << " eps=" << eps;
    }
  });
}

TEST(Constraints, PairsAgreeAboveTransmitFloor) {
  prop::for_all(3000, 32, [](prop::Gen& g) {
    const double eps = g.log_uniform(1e-2, 0.9);
    const double a = g.log_uniform(1e-5, 10.0);
    const auto floor_n = static_cast<std::int64_t>(std::ceil(sp::transmit_floor_bound(eps)));
    const auto n = g.even(floor_n + 1, floor_n + 100000);
    const auto m = g.integer(1, 50'000'000);
    const auto c = sp::check_constraints(m, n, a, eps);
    EXPECT_EQ(c.theorem_pair(), c.planning_pair()) << "m=" << m << " n=" << n << " a=" << a << " eps=" << eps;
  });
}

TEST(Constraints, PairsDifferBelowTransmitFloor) {
  // With n under the floor a large harvest phase satisfies the theorem pair
  // while the planning pair fails on n alone.
  const auto c = sp::check_constraints(1'000'000, 2, 0.001, 0.05);
  EXPECT_TRUE(c.theorem_pair());
  EXPECT_FALSE(c.planning_pair());
}

TEST(Constraints, ZeroPowerNeedsNoHarvest) {
  EXPECT_EQ(sp::harvest_floor_bound(0.0, 0.1), 0.0);
  EXPECT_EQ(sp::harvest_for_transmit_bound(100, 0.0, 0.1), 0.0);
  EXPECT_TRUE(std::isinf(sp::transmit_cap_bound(0, 0.0, 0.1)));
}

// ---------------------------------------------------------------- finite-blocklength rate

TEST(RateFbl, ZeroSnrIsClamped) {
  const auto r = sp::achievable_rate_fbl({10, 100, 0.1}, LinkParams{0.0, 1.0, 1.0});
  EXPECT_TRUE(r.clamped);
  EXPECT_EQ(r.rate_nats, 0.0);
  EXPECT_LT(r.raw_nats, 0.0);
  EXPECT_EQ(r.rate_bits, 0.0);
}

TEST(RateFbl, PlannedOperatingPoint) {
  // eps = 0.05, n = 2026, a = 0.0012, P_E = 1e3: planner picks m = 99.
  const LinkParams link{1.2, 1e3, 1.0};
  const auto m = planner::min_harvest_blocklength(2026, link.power_ratio(), 0.05);
  ASSERT_EQ(m, 99);
  const auto r = sp::achievable_rate_fbl({m, 2026, 0.05}, link);
  EXPECT_TRUE(r.feasible);
  EXPECT_FALSE(r.clamped);
  // Frozen from a 30-digit re-evaluation of the rate expression.
  EXPECT_NEAR(r.rate_nats, 0.272065791244157983, 1e-14);
  EXPECT_NEAR(r.rate_bits, 0.392507967823478684, 1e-14);
  EXPECT_DOUBLE_EQ(r.rate_bits, r.rate_nats / std::numbers::ln2);
}

TEST(RateFbl, InfeasibleWhenHarvestTooShort) {
  const auto r = sp::achievable_rate_fbl({98, 2026, 0.05}, LinkParams{1.2, 1e3, 1.0});
  EXPECT_FALSE(r.feasible);
}

TEST(RateFbl, RejectsBadEpsilon) {
  EXPECT_THROW(sp::achievable_rate_fbl({10, 100, 1.0}, LinkParams{1.0, 1.0, 1.0}), DomainError);
  EXPECT_THROW(sp::achievable_rate_fbl({10, 100, -0.1}, LinkParams{1.0, 1.0, 1.0}), DomainError);
}

TEST(RateFbl, ApproachesAsymptoticRateAlongMinimumLatencyPath) {
  const double eps = 0.1;
  const LinkParams link{1.0, 20.0, 1.0};
  const double limit = sp::asymptotic_rate(link, eps);
  double prev_gap = 1.0;
  for (std::int64_t n : {10'000, 100'000, 1'000'000, 10'000'000}) {
    const auto m = planner::min_harvest_blocklength(n, link.power_ratio(), eps);
    const double rate = sp::achievable_rate_fbl({m, n, eps}, link).rate_nats;
    const double gap = std::abs(rate - limit) / limit;
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 0.01);
}

// ---------------------------------------------------------------- asymptotic rate

TEST(AsymptoticRate, Values) {
  EXPECT_EQ(sp::capacity_prelog(0.0, 0.1), 1.0);
  EXPECT_EQ(sp::capacity_prelog(0.3, 0.0), 0.0);
  EXPECT_NEAR(sp::capacity_prelog(1e-9, 1e-10), 1.0 / (1.0 + 1e-9 / std::log1p(5e-11)), 1e-15);
  EXPECT_NEAR(sp::capacity_prelog(0.0012, 1e-3), 0.294065757425046525, 1e-14);
  const LinkParams link{1.1554, 1.1554 / 0.0012, 1.0};
  EXPECT_NEAR(sp::asymptotic_rate(link, 1e-3), 0.112917769286236129, 1e-13);
  EXPECT_EQ(sp::asymptotic_rate(LinkParams{0.0, 1.0, 1.0}, 0.1), 0.0);
}

TEST(AsymptoticRate, ZeroRatioGivesAwgnCapacity) {
  for (double gamma : {0.1, 1.0, 30.0}) {
    // a -> 0 with gamma fixed: P_E grows without bound.
    const LinkParams link{gamma, 1e300, 1.0};
    EXPECT_NEAR(sp::asymptotic_rate(link, 0.01), 0.5 * std::log1p(gamma), 1e-12);
  }
}

TEST(AsymptoticRate, PrelogShape) {
  prop::for_all(1000, 41, [](prop::Gen& g) {
    const double a = g.log_uniform(1e-6, 10.0);
    const double eps = g.log_uniform(1e-6, 0.9);
    const double l = sp::capacity_prelog(a, eps);
    EXPECT_GE(l, 0.0);
    EXPECT_LE(l, 1.0);
    EXPECT_LT(sp::capacity_prelog(a * 1.01, eps), l);
    EXPECT_GT(sp::capacity_prelog(a, std::min(eps * 1.01, 0.99)), l);
  });
}

TEST(AsymptoticRate, MonotoneInHarvestedPower) {
  for (double eps : {1e-3, 0.05}) {
    double prev = 0.0;
    for (double pe = 1.0; pe < 1e5; pe *= 1.5) {
      const double r = sp::asymptotic_rate(LinkParams{1.0, pe, 1.0}, eps);
      EXPECT_GT(r, prev);
      prev = r;
    }
  }
}

TEST(HighReliability, AgreesWithAsymptoticRate) {
  EXPECT_NEAR(sp::high_reliability_rate(LinkParams{3.0, 1e9, 1.0}, 0.01) / sp::awgn_capacity(3.0), 1.0, 1e-6);
  EXPECT_NEAR(sp::high_reliability_rate(LinkParams{0.005, 1.0, 1.0}, 0.01), 0.5 * sp::awgn_capacity(0.005), 1e-15);
  prop::for_all(1000, 42, [](prop::Gen& g) {
    const double eps = g.log_uniform(1e-6, 1e-2);
    const double a = g.uniform(0.0, eps);
    const LinkParams link = LinkParams::from_ratio(a, g.log_uniform(1.0, 1e4), 1.0);
    const double exact = sp::asymptotic_rate(link, eps);
    const double approx = sp::high_reliability_rate(link, eps);
    EXPECT_LE(std::abs(approx - exact), 0.01 * exact);
  });
}

// ---------------------------------------------------------------- optimal power

TEST(OptimalPower, ReproducesOperatingPoint) {
  const double pt = sp::optimal_power_asymptotic(1e3, 1.0, 1e-3);
  EXPECT_NEAR(pt, 1.1554, 1e-3);
  EXPECT_NEAR(pt / 1e3, 0.0012, 1e-4);
  EXPECT_NEAR(pt, 1.15537249759336920, 1e-12);
}

TEST(OptimalPower, MatchesGoldenSectionMaximum) {
  // Frozen value; an independent golden-section maximization agrees.
  const double pt = sp::optimal_power_asymptotic(1e2, 1.0, 0.05);
  EXPECT_NEAR(pt, 2.94496366652837675, 1e-12);
  auto rate = [](double p) { return sp::asymptotic_rate(LinkParams{p, 1e2, 1.0}, 0.05); };
  double lo = 0.01, hi = 100.0;
  const double r = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 200; ++i) {
    const double c = hi - r * (hi - lo), d = lo + r * (hi - lo);
    (rate(c) > rate(d) ? hi : lo) = rate(c) > rate(d) ? d : c;
  }
  EXPECT_NEAR(pt, 0.5 * (lo + hi), 1e-6);
}

TEST(OptimalPower, StationaryOnGrid) {
  for (double pe : {10.0, 1e2, 1e3, 1e4, 1e5}) {
    for (double eps : {1e-3, 1e-2, 0.05, 0.1, 0.5}) {
      const double pt = sp::optimal_power_asymptotic(pe, 1.0, eps);
      const double h = 1e-4;
      auto rate = [&](double p) { return sp::asymptotic_rate(LinkParams{p, pe, 1.0}, eps); };
      const double normalized = (rate(pt * (1 + h)) - rate(pt * (1 - h))) / (2 * h * rate(pt));
      EXPECT_LT(std::abs(normalized), 1e-6) << pe << " " << eps;
    }
  }
}

TEST(OptimalPower, RatioDecreasesWithHarvestedPower) {
  double prev_ratio = INFINITY;
  for (double pe = 2.0; pe < 1e6; pe *= 1.7) {
    const double ratio = sp::optimal_power_asymptotic(pe, 1.0, 0.01) / pe;
    EXPECT_LT(ratio, prev_ratio);
    prev_ratio = ratio;
  }
}

TEST(OptimalPower, SlopeValueAndShape) {
  EXPECT_NEAR(sp::optimal_power_slope(1e3, 1.0, 1e-3), 6.50909843671977266e-4, 1e-15);
  const double fd = oracle::richardson_derivative([](double pe) { return sp::optimal_power_asymptotic(pe, 1.0, 1e-3); },
                                                  1e3, 10.0);
  EXPECT_NEAR(sp::optimal_power_slope(1e3, 1.0, 1e-3), fd, 1e-10);
  for (double eps : {1e-3, 0.05, 0.5}) {
    double prev = INFINITY;
    for (double pe = 0.5; pe < 1e6; pe *= 1.5) {
      const double s = sp::optimal_power_slope(pe, 1.0, eps);
      EXPECT_GE(s, 0.0);
      EXPECT_LT(s, prev);
      prev = s;
    }
  }
}

TEST(OptimalPower, SmoothThroughZeroBranchArgument) {
  // c = 0 where P_E ln(1 + eps/2) = sigma2: the closed form reaches 0/0 but the
  // evaluated form stays finite and continuous.
  const double eps = 0.1;
  const double pe0 = 1.0 / std::log1p(0.05);
  const double at = sp::optimal_power_asymptotic(pe0, 1.0, eps);
  EXPECT_NEAR(at, std::numbers::e - 1.0, 1e-12);
  EXPECT_NEAR(sp::optimal_power_asymptotic(pe0 * (1 + 1e-9), 1.0, eps), at, 1e-6);
}

TEST(OptimalPower, RejectsInvalidInputs) {
  EXPECT_THROW(sp::optimal_power_asymptotic(0.0, 1.0, 0.1), DomainError);
  EXPECT_THROW(sp::optimal_power_asymptotic(1.0, 1.0, 0.0), DomainError);
}
