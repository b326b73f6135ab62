#pragma once

// Monte Carlo oracles for the closed forms. Trials are split into fixed
// blocks; blocks may run on any thread, and their partial results are
// combined in block order, so estimates are bit-identical for every thread
// count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <thread>
#include <vector>

#include "wpcn/error.hpp"
#include "wpcn/multi_pb.hpp"
#include "wpcn/rng.hpp"

namespace wpcn::mc {

struct McConfig {
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  double truncation_tail = 1e-4;  ///< neglected fraction of the mean harvested energy
  unsigned threads = 0;           ///< 0 = hardware concurrency

  void validate() const {
    wpcn::detail::require(trials >= 1, "McConfig", "trials must be >= 1");
    wpcn::detail::require(truncation_tail > 0.0 && truncation_tail < 1.0, "McConfig",
                          "truncation_tail must lie in (0, 1)");
  }
};

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;

  /// |value - mean| <= k std_err.
  [[nodiscard]] bool within(double value, double k = 3.0) const { return std::abs(value - mean) <= k * std_err; }
};

struct PrefixCheck {
  std::int64_t prefix_violations = 0;  ///< some partial symbol energy exceeded m Z
  std::int64_t final_violations = 0;   ///< the full codeword energy exceeded m Z
  std::int64_t mismatched_trials = 0;  ///< trials where the two verdicts differ
};

namespace detail {

inline constexpr std::int64_t kBlockSize = 1024;

struct BlockSums {
  double sum = 0.0;
  double sum_comp = 0.0;
  double sq = 0.0;
  double sq_comp = 0.0;
  std::int64_t hits = 0;

  void add(double x) {
    kahan(sum, sum_comp, x);
    kahan(sq, sq_comp, x * x);
  }
  static void kahan(double& acc, double& comp, double x) {
    const double y = x - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
};

/// Runs body(stream, trial, sums) for every trial and returns per-block sums
/// in block order.
template <class Body>
std::vector<BlockSums> run_blocks(const McConfig& cfg, Body body) {
  cfg.validate();
  const std::int64_t blocks = (cfg.trials + kBlockSize - 1) / kBlockSize;
  std::vector<BlockSums> out(static_cast<std::size_t>(blocks));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t b = next++; b < blocks; b = next++) {
      BlockSums sums;
      const std::int64_t end = std::min(cfg.trials, (b + 1) * kBlockSize);
      for (std::int64_t t = b * kBlockSize; t < end; ++t) {
        rng::Stream stream(cfg.seed, static_cast<std::uint64_t>(t));
        body(stream, t, sums);
      }
      out[static_cast<std::size_t>(b)] = sums;
    }
  };
  unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, blocks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return out;
}

inline McEstimate proportion(const McConfig& cfg, const std::vector<BlockSums>& blocks) {
  std::int64_t hits = 0;
  for (const auto& b : blocks) hits += b.hits;
  const double n = static_cast<double>(cfg.trials);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), cfg.trials, cfg.seed};
}

inline McEstimate sample_mean(const McConfig& cfg, const std::vector<BlockSums>& blocks) {
  BlockSums total;
  for (const auto& b : blocks) {
    BlockSums::kahan(total.sum, total.sum_comp, b.sum);
    BlockSums::kahan(total.sq, total.sq_comp, b.sq);
  }
  const double n = static_cast<double>(cfg.trials);
  const double mean = total.sum / n;
  const double var = n > 1.0 ? std::max(0.0, (total.sq - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n), cfg.trials, cfg.seed};
}

/// Sum of n squared standard normals.
inline double chi_squared(rng::Stream& s, std::int64_t n) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = s.normal();
    acc += x * x;
  }
  return acc;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Single beacon

/// Fraction of frames with P_t * chi2(n) <= m Z, Z ~ Exp(mean P_E).
inline McEstimate estimate_supply_prob_single(std::int64_t m, std::int64_t n, double p_t, double p_e,
                                              const McConfig& cfg) {
  wpcn::detail::require(m >= 0 && n >= 1, "estimate_supply_prob_single", "m must be >= 0 and n >= 1");
  wpcn::detail::require(p_t >= 0.0 && p_e > 0.0, "estimate_supply_prob_single", "p_t must be >= 0 and p_e > 0");
  const auto blocks = detail::run_blocks(cfg, [&](rng::Stream& s, std::int64_t, detail::BlockSums& acc) {
    const double budget = static_cast<double>(m) * p_e * s.exponential();
    if (p_t * detail::chi_squared(s, n) <= budget) ++acc.hits;
  });
  return detail::proportion(cfg, blocks);
}

/// Compares "some prefix of the codeword exceeds the harvested energy" with
/// "the whole codeword exceeds it", trial by trial.
inline PrefixCheck check_prefix_equivalence(std::int64_t m, std::int64_t n, double p_t, double p_e,
                                            const McConfig& cfg) {
  wpcn::detail::require(m >= 0 && n >= 1, "check_prefix_equivalence", "m must be >= 0 and n >= 1");
  wpcn::detail::require(p_t >= 0.0 && p_e > 0.0, "check_prefix_equivalence", "p_t must be >= 0 and p_e > 0");
  // Encoded in BlockSums: hits = prefix violations, sum = final violations,
  // sq = mismatches. All three are small integers, exact in double.
  const auto blocks = detail::run_blocks(cfg, [&](rng::Stream& s, std::int64_t, detail::BlockSums& acc) {
    const double budget = static_cast<double>(m) * p_e * s.exponential();
    double spent = 0.0;
    bool prefix = false;
    for (std::int64_t l = 0; l < n; ++l) {
      const double x = s.normal();
      spent += p_t * x * x;
      if (spent > budget) prefix = true;
    }
    const bool final_exceeded = spent > budget;
    if (prefix) ++acc.hits;
    if (final_exceeded) acc.sum += 1.0;
    if (prefix != final_exceeded) acc.sq += 1.0;
  });
  PrefixCheck out;
  for (const auto& b : blocks) {
    out.prefix_violations += b.hits;
    out.final_violations += static_cast<std::int64_t>(b.sum);
    out.mismatched_trials += static_cast<std::int64_t>(b.sq);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Poisson field

/// Radius beyond which the mean harvested energy is below `tail` times the
/// total: 2 pi lambda R^{2-eta}/(eta-2) mu P_PB = tail * E[Z] gives
/// R = (tail eta / 2)^{1/(2-eta)}, never below the unit disk.
inline double truncation_radius(const multi::NetworkParams& net, double tail) {
  net.validate();
  wpcn::detail::require(tail > 0.0 && tail < 1.0, "truncation_radius", "tail must lie in (0, 1)");
  return std::max(1.0, std::pow(0.5 * tail * net.eta, 1.0 / (2.0 - net.eta)));
}

/// One draw of Z = P_PB mu sum_k H_k / max(1, r_k^eta) over the beacons in the
/// truncation disk. Beacons are generated in order of distance: with
/// Gamma_k the arrival times of a unit-rate Poisson process, pi lambda r_k^2 = Gamma_k.
inline double sample_ppp_energy(const multi::NetworkParams& net, double radius, rng::Stream& s) {
  const double area_scale = std::numbers::pi * net.lambda;
  const double horizon = area_scale * radius * radius;
  double arrival = s.exponential();
  double acc = 0.0;
  while (arrival <= horizon) {
    const double r2 = arrival / area_scale;
    const double loss = r2 <= 1.0 ? 1.0 : std::pow(r2, 0.5 * net.eta);
    acc += s.exponential() / loss;
    arrival += s.exponential();
  }
  return net.energy_scale() * acc;
}

/// One draw for trial `trial` of the configured stream.
inline double sample_ppp_energy(const multi::NetworkParams& net, const McConfig& cfg, std::uint64_t trial = 0) {
  cfg.validate();
  rng::Stream s(cfg.seed, trial);
  return sample_ppp_energy(net, truncation_radius(net, cfg.truncation_tail), s);
}

/// Sample mean of Z.
inline McEstimate estimate_mean_harvested(const multi::NetworkParams& net, const McConfig& cfg) {
  const double radius = truncation_radius(net, cfg.truncation_tail);
  const auto blocks = detail::run_blocks(cfg, [&](rng::Stream& s, std::int64_t, detail::BlockSums& acc) {
    acc.add(sample_ppp_energy(net, radius, s));
  });
  return detail::sample_mean(cfg, blocks);
}

/// Sample mean of exp(-s Z).
inline McEstimate estimate_laplace_z(double s_arg, const multi::NetworkParams& net, const McConfig& cfg) {
  wpcn::detail::require(s_arg >= 0.0, "estimate_laplace_z", "s must be >= 0");
  const double radius = truncation_radius(net, cfg.truncation_tail);
  const auto blocks = detail::run_blocks(cfg, [&](rng::Stream& s, std::int64_t, detail::BlockSums& acc) {
    acc.add(std::exp(-s_arg * sample_ppp_energy(net, radius, s)));
  });
  return detail::sample_mean(cfg, blocks);
}

/// Fraction of frames with P_t * chi2(n) <= m Z, Z drawn from the Poisson field.
inline McEstimate estimate_supply_prob_mp(std::int64_t m, std::int64_t n, double p_t, const multi::NetworkParams& net,
                                          const McConfig& cfg) {
  wpcn::detail::require(m >= 0 && n >= 1, "estimate_supply_prob_mp", "m must be >= 0 and n >= 1");
  wpcn::detail::require(p_t >= 0.0, "estimate_supply_prob_mp", "p_t must be >= 0");
  const double radius = truncation_radius(net, cfg.truncation_tail);
  const auto blocks = detail::run_blocks(cfg, [&](rng::Stream& s, std::int64_t, detail::BlockSums& acc) {
    const double budget = static_cast<double>(m) * sample_ppp_energy(net, radius, s);
    if (p_t * detail::chi_squared(s, n) <= budget) ++acc.hits;
  });
  return detail::proportion(cfg, blocks);
}

}  // namespace wpcn::mc
