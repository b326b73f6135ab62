#pragma once

// Command implementations behind the `wpcn` executable. Each command returns
// a Table so tests can inspect results without spawning processes.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cli/output.hpp"
#include "cli/sweep.hpp"
#include "wpcn/multi_pb.hpp"

namespace wpcn::cli {

/// Raised for malformed flag combinations; mapped to the usage exit status.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string mode = "single";  ///< single | multi
  double p_t = 1.0;
  double p_e = 1.0;
  double sigma2 = 1.0;
  double epsilon = 0.05;
  std::optional<std::int64_t> m;
  std::optional<std::int64_t> n;
  std::optional<double> a;  ///< overrides p_t as a * P_E (single) or a * mu * P_PB (multi)
  double lambda = 1e-3;
  double p_pb = 1e3;
  double mu = 1.0;
  double eta = 3.6;
  std::int64_t mc_trials = 0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::optional<SweepSpec> sweep;

  // Figure knobs; see README for the defaults and where they come from.
  std::vector<double> fig2_eps{0.01, 0.05, 0.1};
  double fig2_pe = 1e2;
  double fig2_a_min = 2e-3;  ///< below this the eps = 0.1 rate clamps to zero
  double fig2_a_max = 1.0;
  int points = 0;  ///< 0: each figure's own default

  std::ostream* warn = nullptr;  ///< receives non-fatal warnings

  [[nodiscard]] bool multi() const { return mode == "multi"; }
  [[nodiscard]] multi::NetworkParams network() const { return {lambda, p_pb, mu, eta}; }
  /// Transmit power after applying -a.
  [[nodiscard]] double transmit_power() const;
  /// Reference power for the ratio a: P_E (single) or mu P_PB (multi).
  [[nodiscard]] double ratio_reference() const { return multi() ? mu * p_pb : p_e; }
  void validate() const;
};

/// Sets the named sweep variable on a copy of `base`. Odd n is rounded up to
/// the next even value with a warning; non-integral m or n is a usage error.
Options apply_sweep_value(const Options& base, const std::string& variable, double value);

Table cmd_pes(const Options& opts);
Table cmd_rate(const Options& opts);
Table cmd_optpower(const Options& opts);
Table cmd_plan(const Options& opts);

const std::vector<std::string>& figure_names();
/// Long-format figure data with a `series` column. Throws UsageError for an
/// unknown name.
Table cmd_figure(const std::string& name, const Options& opts);
ChartSpec figure_chart(const std::string& name);

struct ValidationCheck {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double band = 0.0;  ///< allowed |value - reference|
  bool passed = false;
};

/// Closed form against Monte Carlo, and the Bell-polynomial derivative path
/// against the recurrence.
std::vector<ValidationCheck> cmd_validate(const Options& opts);
Table validation_table(const std::vector<ValidationCheck>& checks);

}  // namespace wpcn::cli
