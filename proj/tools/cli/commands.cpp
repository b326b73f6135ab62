#include "cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "wpcn/wpcn.hpp"

namespace wpcn::cli {

namespace {

using Row = std::vector<std::string>;

std::string fmt(double x) { return format_number(x); }
std::string fmt(std::int64_t x) { return std::to_string(x); }

/// Evaluates rows [0, count) on worker threads; results keep grid order and
/// the first failure (by index) is rethrown.
template <class Make>
std::vector<Row> parallel_rows(std::size_t count, unsigned threads, Make make) {
  std::vector<Row> rows(count);
  std::vector<std::exception_ptr> errors(count);
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        rows[i] = make(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void warn(const Options& opts, const std::string& message) {
  if (opts.warn) *opts.warn << "warning: " << message << '\n';
}

mc::McConfig mc_config(const Options& opts, std::int64_t trials) {
  mc::McConfig cfg;
  cfg.trials = trials;
  cfg.seed = opts.seed;
  cfg.threads = opts.threads;
  return cfg;
}

/// Runs `body` once per sweep point (or once without a sweep) and prefixes
/// each row with the swept value.
template <class Body>
Table sweep_table(const Options& opts, Row header, Body body) {
  Table table;
  // A swept variable that already has its own column is not repeated.
  bool swept = opts.sweep.has_value();
  if (swept) {
    const std::string& v = opts.sweep->variable;
    const std::string column = v == "pt" ? "p_t" : v == "pe" ? "p_e" : v;
    swept = std::find(header.begin(), header.end(), column) == header.end();
    if (swept) header.insert(header.begin(), v);
  }
  table.header = std::move(header);
  const std::size_t count = opts.sweep ? opts.sweep->grid.size() : 1;
  std::vector<Options> points;
  for (std::size_t i = 0; i < count; ++i) {
    points.push_back(opts.sweep ? apply_sweep_value(opts, opts.sweep->variable, opts.sweep->grid[i]) : opts);
    points.back().validate();
  }
  // Monte Carlo already fans out over trials; keep the sweep serial then.
  const unsigned outer = opts.mc_trials > 0 ? 1u : opts.threads;
  auto rows = parallel_rows(count, outer, [&](std::size_t i) {
    Row r = body(points[i]);
    if (swept) r.insert(r.begin(), fmt(opts.sweep->grid[i]));
    return r;
  });
  table.rows = std::move(rows);
  return table;
}

std::int64_t default_n(const Options& o) { return o.n.value_or(planner::min_transmit_blocklength(o.epsilon)); }

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    g.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
  }
  return g;
}

std::string rate_cell(const RateResult& r) { return r.feasible ? fmt(r.rate_bits) : std::string(); }

}  // namespace

double Options::transmit_power() const { return a ? *a * ratio_reference() : p_t; }

void Options::validate() const {
  if (mode != "single" && mode != "multi") throw UsageError("--mode must be 'single' or 'multi'");
  if (m && *m < 0) throw UsageError("-m must be >= 0");
  if (n && (*n < 2 || *n % 2 != 0)) throw UsageError("-n must be an even integer >= 2");
  if (mc_trials < 0) throw UsageError("--mc-trials must be >= 0");
  if (points < 0) throw UsageError("--points must be >= 0");
}

Options apply_sweep_value(const Options& base, const std::string& variable, double value) {
  Options o = base;
  auto integral = [&](const char* what) {
    if (value != std::floor(value) || value < 0 || value > 9e15) {
      throw UsageError(std::string("sweep: ") + what + " values must be non-negative integers");
    }
    return static_cast<std::int64_t>(value);
  };
  if (variable == "a") {
    o.a = value;
  } else if (variable == "pt") {
    o.p_t = value;
    o.a.reset();
  } else if (variable == "pe") {
    o.p_e = value;
  } else if (variable == "sigma2") {
    o.sigma2 = value;
  } else if (variable == "eps") {
    o.epsilon = value;
  } else if (variable == "m") {
    o.m = integral("m");
  } else if (variable == "n") {
    std::int64_t n = integral("n");
    if (n % 2 != 0) {
      warn(base, "odd n = " + std::to_string(n) + " rounded up to " + std::to_string(n + 1));
      ++n;
    }
    o.n = n;
  } else if (variable == "lambda") {
    o.lambda = value;
  } else if (variable == "ppb") {
    o.p_pb = value;
  } else if (variable == "mu") {
    o.mu = value;
  } else if (variable == "eta") {
    o.eta = value;
  } else {
    throw UsageError("sweep: unknown variable '" + variable + "'");
  }
  return o;
}

// ---------------------------------------------------------------------------

Table cmd_pes(const Options& opts) {
  Row header{"m", "n", "p_t", "a", "pes"};
  if (opts.mc_trials > 0) {
    header.emplace_back("mc_pes");
    header.emplace_back("mc_std_err");
  }
  return sweep_table(opts, header, [&](const Options& o) {
    const std::int64_t n = default_n(o);
    const std::int64_t m = o.m.value_or(n);
    const double p_t = o.transmit_power();
    const double a = p_t / o.ratio_reference();
    std::optional<double> pes;
    std::optional<mc::McEstimate> est;
    if (o.multi()) {
      const auto net = o.network();
      try {
        pes = multi::energy_supply_prob_mp(m, n, p_t, net);
      } catch (const StabilityError& e) {
        const std::int64_t trials = std::max<std::int64_t>(o.mc_trials, 100000);
        warn(o, std::string(e.what()) + "; falling back to Monte Carlo with " + std::to_string(trials) + " fields");
        est = mc::estimate_supply_prob_mp(m, n, p_t, net, mc_config(o, trials));
        pes = est->mean;
      }
      if (o.mc_trials > 0 && !est) est = mc::estimate_supply_prob_mp(m, n, p_t, net, mc_config(o, o.mc_trials));
    } else {
      pes = single::energy_supply_prob(m, n, a);
      if (o.mc_trials > 0) est = mc::estimate_supply_prob_single(m, n, p_t, o.p_e, mc_config(o, o.mc_trials));
    }
    Row r{fmt(m), fmt(n), fmt(p_t), fmt(a), format_number(pes)};
    if (o.mc_trials > 0) {
      r.push_back(fmt(est->mean));
      r.push_back(fmt(est->std_err));
    }
    return r;
  });
}

Table cmd_rate(const Options& opts) {
  return sweep_table(opts, {"m", "n", "p_t", "a", "feasible", "rate_bits", "rate_bits_asymptotic"},
                     [&](const Options& o) {
                       const std::int64_t n = default_n(o);
                       const double p_t = o.transmit_power();
                       const double a = p_t / o.ratio_reference();
                       std::int64_t m = 0;
                       RateResult rate;
                       std::optional<double> asymptotic;
                       if (o.multi()) {
                         const auto net = o.network();
                         m = o.m ? *o.m : planner::min_harvest_blocklength_mp(n, p_t, net, o.epsilon);
                         rate = multi::achievable_rate_mp({m, n, o.epsilon}, p_t, o.sigma2, net);
                       } else {
                         const LinkParams link{p_t, o.p_e, o.sigma2};
                         m = o.m ? *o.m : planner::min_harvest_blocklength(n, a, o.epsilon);
                         rate = single::achievable_rate_fbl({m, n, o.epsilon}, link);
                         asymptotic = nats_to_bits(single::asymptotic_rate(link, o.epsilon));
                       }
                       return Row{fmt(m), fmt(n), fmt(p_t), fmt(a), format_bool(rate.feasible), rate_cell(rate),
                                  format_number(asymptotic)};
                     });
}

Table cmd_optpower(const Options& opts) {
  return sweep_table(opts,
                     {"eps", "p_e", "p_t_asymptotic", "a_asymptotic", "rate_bits_asymptotic", "p_t_fbl", "a_fbl",
                      "m", "n", "feasible", "rate_bits_fbl", "rate_bits_fbl_at_asymptotic"},
                     [&](const Options& o) {
                       if (o.multi()) {
                         const auto net = o.network();
                         const auto best = power::optimal_power_mp(o.epsilon, o.sigma2, net, o.n.value_or(0));
                         return Row{fmt(o.epsilon), fmt(multi::mean_harvested(net)), "", "", "", fmt(best.p_t),
                                    fmt(best.p_t / o.ratio_reference()), fmt(best.m), fmt(best.n),
                                    format_bool(best.rate.feasible), rate_cell(best.rate), ""};
                       }
                       const double p_asym = single::optimal_power_asymptotic(o.p_e, o.sigma2, o.epsilon);
                       const LinkParams link_asym{p_asym, o.p_e, o.sigma2};
                       const auto best = power::optimal_power_fbl(o.epsilon, o.p_e, o.sigma2);
                       const std::int64_t n = best.n;
                       const std::int64_t m_asym = planner::min_harvest_blocklength(n, link_asym.power_ratio(), o.epsilon);
                       const auto at_asym = single::achievable_rate_fbl({m_asym, n, o.epsilon}, link_asym);
                       return Row{fmt(o.epsilon), fmt(o.p_e), fmt(p_asym), fmt(link_asym.power_ratio()),
                                  fmt(nats_to_bits(single::asymptotic_rate(link_asym, o.epsilon))), fmt(best.p_t),
                                  fmt(best.p_t / o.p_e), fmt(best.m), fmt(n), format_bool(best.rate.feasible),
                                  rate_cell(best.rate), rate_cell(at_asym)};
                     });
}

Table cmd_plan(const Options& opts) {
  return sweep_table(opts, {"eps", "p_t", "a", "n", "m", "overhead", "total", "feasible"}, [&](const Options& o) {
    const double p_t = o.transmit_power();
    const double a = p_t / o.ratio_reference();
    planner::Plan p;
    if (o.multi()) {
      p = planner::plan_multi(p_t, o.network(), o.epsilon);
      if (o.n) {
        p.n = *o.n;
        p.m = planner::min_harvest_blocklength_mp(p.n, p_t, o.network(), o.epsilon);
      }
      p.feasible = multi::achievable_rate_mp(p.blocklengths(), p_t, o.sigma2, o.network()).feasible;
    } else {
      p = planner::plan_single(a, o.epsilon);
      if (o.n) {
        p.n = *o.n;
        p.m = planner::min_harvest_blocklength(p.n, a, o.epsilon);
        p.feasible = single::check_constraints(p.m, p.n, a, o.epsilon).theorem_pair();
      }
    }
    p.overhead = static_cast<double>(p.total()) / static_cast<double>(p.n);
    return Row{fmt(o.epsilon), fmt(p_t), fmt(a), fmt(p.n), fmt(p.m), fmt(p.overhead), fmt(p.total()),
               format_bool(p.feasible)};
  });
}

// ---------------------------------------------------------------------------
// Figures

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
  return names;
}

namespace {

// Operating points stated alongside the figures.
constexpr double kFig3PowerBudget = 1e3;
constexpr double kFig3FixedEpsilon = 1e-3;
constexpr double kFig45Epsilon = 0.05;
constexpr double kFig6Lambda = 1e-3;
constexpr double kFig6BeaconPower = 1e3;
constexpr std::int64_t kFig6HarvestLength = 1500;
constexpr std::int64_t kFig6TransmitLength = 1000;
constexpr double kFig7Epsilon = 0.1;
constexpr double kFig7Lambda = 5e-3;
constexpr double kFig7BeaconPower = 1e3;
constexpr std::int64_t kFig7MaxTransmitLength = 4000;

Table figure2(const Options& o) {
  const int points = o.points > 0 ? o.points : 41;
  const auto grid = log_grid(o.fig2_a_min, o.fig2_a_max, points);
  Table t;
  t.header = {"series", "eps", "a", "p_t", "m", "n", "feasible", "rate_bits", "rate_bits_asymptotic"};
  const std::size_t per = grid.size();
  t.rows = parallel_rows(per * o.fig2_eps.size(), o.threads, [&](std::size_t i) {
    const double eps = o.fig2_eps[i / per];
    const double a = grid[i % per];
    const LinkParams link = LinkParams::from_ratio(a, o.fig2_pe, o.sigma2);
    const std::int64_t n = planner::min_transmit_blocklength(eps);
    const std::int64_t m = planner::min_harvest_blocklength(n, a, eps);
    const auto rate = single::achievable_rate_fbl({m, n, eps}, link);
    return Row{"eps=" + fmt(eps), fmt(eps), fmt(a), fmt(link.p_t), fmt(m), fmt(n), format_bool(rate.feasible),
               rate_cell(rate), fmt(nats_to_bits(single::asymptotic_rate(link, eps)))};
  });
  return t;
}

Table figure3(const Options& o) {
  const int points = o.points > 0 ? o.points : 30;
  const auto grid = log_grid(1e-3, 0.5, points);
  const double fixed_power = single::optimal_power_asymptotic(kFig3PowerBudget, o.sigma2, kFig3FixedEpsilon);
  static const char* series[] = {"fixed_power", "adapted_power", "optimized_power"};
  Table t;
  t.header = {"series", "eps", "p_t", "a", "m", "n", "feasible", "rate_bits"};
  const std::size_t per = grid.size();
  t.rows = parallel_rows(per * 3, o.threads, [&](std::size_t i) {
    const int s = static_cast<int>(i / per);
    const double eps = grid[i % per];
    power::OptimalPower pick;
    if (s == 2) {
      pick = power::optimal_power_fbl(eps, kFig3PowerBudget, o.sigma2);
    } else {
      const double p_t = s == 0 ? fixed_power : single::optimal_power_asymptotic(kFig3PowerBudget, o.sigma2, eps);
      const LinkParams link{p_t, kFig3PowerBudget, o.sigma2};
      pick.p_t = p_t;
      pick.n = planner::min_transmit_blocklength(eps);
      pick.m = planner::min_harvest_blocklength(pick.n, link.power_ratio(), eps);
      pick.rate = single::achievable_rate_fbl({pick.m, pick.n, eps}, link);
    }
    return Row{series[s], fmt(eps), fmt(pick.p_t), fmt(pick.p_t / kFig3PowerBudget), fmt(pick.m), fmt(pick.n),
               format_bool(pick.rate.feasible), rate_cell(pick.rate)};
  });
  return t;
}

Table figure45(const Options& o) {
  const int points = o.points > 0 ? o.points : 31;
  const auto grid = log_grid(10.0, 1e4, points);
  Table t;
  t.header = {"series", "p_e", "p_t", "a", "n", "rate_bits"};
  const std::size_t per = grid.size();
  t.rows = parallel_rows(per * 2, o.threads, [&](std::size_t i) {
    const double p_e = grid[i % per];
    if (i / per == 0) {
      const double p_t = single::optimal_power_asymptotic(p_e, o.sigma2, kFig45Epsilon);
      const LinkParams link{p_t, p_e, o.sigma2};
      return Row{"asymptotic", fmt(p_e), fmt(p_t), fmt(p_t / p_e), "",
                 fmt(nats_to_bits(single::asymptotic_rate(link, kFig45Epsilon)))};
    }
    const auto best = power::optimal_power_fbl(kFig45Epsilon, p_e, o.sigma2);
    return Row{"finite_blocklength", fmt(p_e), fmt(best.p_t), fmt(best.p_t / p_e), fmt(best.n), rate_cell(best.rate)};
  });
  return t;
}

Table figure6(const Options& o) {
  const int kmax = o.points > 0 ? o.points : 10;
  Table t;
  t.header = {"series", "k", "lambda", "p_pb", "mean_harvested", "pes"};
  const auto per = static_cast<std::size_t>(kmax);
  t.rows = parallel_rows(per * 2, o.threads, [&](std::size_t i) {
    const bool density = i / per == 0;
    const double k = static_cast<double>(i % per + 1);
    const multi::NetworkParams net{density ? kFig6Lambda * k : kFig6Lambda, density ? kFig6BeaconPower : kFig6BeaconPower * k,
                                   o.mu, o.eta};
    const double pes = multi::energy_supply_prob_mp(kFig6HarvestLength, kFig6TransmitLength, 1.0, net);
    return Row{density ? "density_scaling" : "power_scaling", fmt(k), fmt(net.lambda), fmt(net.p_pb),
               fmt(multi::mean_harvested(net)), fmt(pes)};
  });
  return t;
}

Table figure7(const Options& o) {
  const int points = o.points > 0 ? o.points : 31;
  const std::int64_t n_min = planner::min_transmit_blocklength(kFig7Epsilon);
  std::vector<std::int64_t> grid;
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    auto n = static_cast<std::int64_t>(std::llround(static_cast<double>(n_min) +
                                                    t * static_cast<double>(kFig7MaxTransmitLength - n_min)));
    n += n % 2;
    if (grid.empty() || n > grid.back()) grid.push_back(n);
  }
  const multi::NetworkParams net{kFig7Lambda, kFig7BeaconPower, o.mu, o.eta};
  Table t;
  t.header = {"series", "n", "p_t", "m", "feasible", "rate_bits"};
  const std::size_t per = grid.size();
  t.rows = parallel_rows(per * 2, o.threads, [&](std::size_t i) {
    const std::int64_t n = grid[i % per];
    power::OptimalPower pick;
    const char* name = "optimized_power";
    if (i / per == 0) {
      pick = power::optimal_power_mp(kFig7Epsilon, o.sigma2, net, n);
    } else {
      name = "unit_power";
      pick.p_t = 1.0;
      pick.n = n;
      pick.m = planner::min_harvest_blocklength_mp(n, 1.0, net, kFig7Epsilon);
      pick.rate = multi::achievable_rate_mp({pick.m, n, kFig7Epsilon}, 1.0, o.sigma2, net);
    }
    return Row{name, fmt(n), fmt(pick.p_t), fmt(pick.m), format_bool(pick.rate.feasible), rate_cell(pick.rate)};
  });
  return t;
}

}  // namespace

Table cmd_figure(const std::string& name, const Options& opts) {
  opts.validate();
  if (name == "fig2") {
    if (opts.fig2_eps.empty()) throw UsageError("--fig2-eps needs at least one value");
    if (!(opts.fig2_a_min > 0.0 && opts.fig2_a_max > opts.fig2_a_min)) {
      throw UsageError("--fig2-amin and --fig2-amax need 0 < amin < amax");
    }
    return figure2(opts);
  }
  if (name == "fig3") return figure3(opts);
  if (name == "fig4" || name == "fig5") return figure45(opts);
  if (name == "fig6") return figure6(opts);
  if (name == "fig7") return figure7(opts);
  throw UsageError("unknown figure '" + name + "' (expected fig2..fig7)");
}

ChartSpec figure_chart(const std::string& name) {
  if (name == "fig2") return {"Rate vs power ratio", "a", "rate_bits", "series", true, false};
  if (name == "fig3") return {"Rate vs error target", "eps", "rate_bits", "series", true, false};
  if (name == "fig4") return {"Optimal transmit power vs harvested power", "p_e", "p_t", "series", true, true};
  if (name == "fig5") return {"Optimal power ratio vs harvested power", "p_e", "a", "series", true, true};
  if (name == "fig6") return {"Supply probability vs mean harvested power", "mean_harvested", "pes", "series", false,
                              false};
  if (name == "fig7") return {"Rate vs transmit blocklength", "n", "rate_bits", "series", false, false};
  throw UsageError("unknown figure '" + name + "'");
}

// ---------------------------------------------------------------------------
// Validation

std::vector<ValidationCheck> cmd_validate(const Options& opts) {
  opts.validate();
  const std::int64_t trials = opts.mc_trials > 0 ? opts.mc_trials : 100000;
  const auto cfg = mc_config(opts, trials);
  std::vector<ValidationCheck> checks;
  auto add_mc = [&](std::string name, const mc::McEstimate& e, double reference) {
    checks.push_back({std::move(name), e.mean, reference, 3.0 * e.std_err, e.within(reference)});
  };

  struct SinglePoint {
    std::int64_t m, n;
    double a;
  };
  for (const auto& p : {SinglePoint{2, 2, 1.0}, SinglePoint{100, 50, 0.1}, SinglePoint{40, 30, 0.4},
                        SinglePoint{500, 2026, 0.02}}) {
    add_mc("single_pes m=" + fmt(p.m) + " n=" + fmt(p.n) + " a=" + fmt(p.a),
           mc::estimate_supply_prob_single(p.m, p.n, p.a, 1.0, cfg), single::energy_supply_prob(p.m, p.n, p.a));
  }

  const auto prefix = mc::check_prefix_equivalence(10, 20, 0.5, 1.0, cfg);
  checks.push_back({"prefix_vs_final_violations", static_cast<double>(prefix.prefix_violations),
                    static_cast<double>(prefix.final_violations), 0.0,
                    prefix.prefix_violations == prefix.final_violations && prefix.mismatched_trials == 0});

  for (const auto& [lambda, p_pb] : {std::pair{1e-3, 1e3}, std::pair{2e-3, 1e3}}) {
    const multi::NetworkParams net{lambda, p_pb, opts.mu, opts.eta};
    const std::string tag = " lambda=" + fmt(lambda) + " p_pb=" + fmt(p_pb);
    add_mc("mean_harvested" + tag, mc::estimate_mean_harvested(net, cfg), multi::mean_harvested(net));
    const double s = 0.5 / multi::mean_harvested(net);
    add_mc("laplace_z" + tag, mc::estimate_laplace_z(s, net, cfg), multi::laplace_z(s, net));
    add_mc("multi_pes m=1500 n=1000 p_t=1" + tag, mc::estimate_supply_prob_mp(1500, 1000, 1.0, net, cfg),
           multi::energy_supply_prob_mp(1500, 1000, 1.0, net));
  }

  for (double s : {1e-3, 0.05, 1.0}) {
    const auto net = opts.network();
    const auto recurrence = multi::laplace_derivs(s, 20, net);
    const auto bell = multi::laplace_derivs_bell(s, 20, net);
    double worst = 0.0;
    for (std::size_t k = 0; k < recurrence.values.size(); ++k) {
      const double ref = recurrence.values[k];
      worst = std::max(worst, std::abs(bell.values[k] - ref) / std::max(std::abs(ref), 1e-300));
    }
    checks.push_back({"bell_vs_recurrence orders 0-20 s=" + fmt(s), worst, 0.0, 1e-9, worst <= 1e-9});
  }
  return checks;
}

Table validation_table(const std::vector<ValidationCheck>& checks) {
  Table t;
  t.header = {"check", "value", "reference", "band", "outcome"};
  for (const auto& c : checks) {
    t.add({c.name, fmt(c.value), fmt(c.reference), fmt(c.band), c.passed ? "PASS" : "FAIL"});
  }
  return t;
}

}  // namespace wpcn::cli
