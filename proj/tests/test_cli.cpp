#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli/app.hpp"
#include "cli/commands.hpp"
#include "cli/output.hpp"
#include "cli/sweep.hpp"
#include "wpcn/multi_pb.hpp"
#include "wpcn/planner.hpp"

using namespace wpcn::cli;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

/// Parsed CSV: header plus rows of cells.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    ADD_FAILURE() << "missing column " << name;
    return 0;
  }
  [[nodiscard]] double num(std::size_t row, const std::string& name) const { return std::stod(rows[row][col(name)]); }
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (first) csv.header = cells;
    else csv.rows.push_back(cells);
    first = false;
  }
  return csv;
}

Csv table_csv(const Table& t) {
  std::ostringstream s;
  write_csv(s, t);
  return parse_csv(s.str());
}

/// Rows of a long-format figure table grouped by series, in file order.
std::map<std::string, std::vector<std::size_t>> by_series(const Csv& csv) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) groups[csv.rows[r][csv.col("series")]].push_back(r);
  return groups;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sweep grammar

TEST(Sweep, LinearLogAndList) {
  const auto lin = parse_sweep("a:0:1:21");
  EXPECT_EQ(lin.variable, "a");
  ASSERT_EQ(lin.grid.size(), 21u);
  EXPECT_DOUBLE_EQ(lin.grid[10], 0.5);
  EXPECT_EQ(lin.grid.back(), 1.0);

  const auto lg = parse_sweep("pt:0.01:100:5:log");
  ASSERT_EQ(lg.grid.size(), 5u);
  EXPECT_NEAR(lg.grid[1], 0.1, 1e-15);
  EXPECT_NEAR(lg.grid[2], 1.0, 1e-15);
  EXPECT_EQ(lg.grid.back(), 100.0);

  const auto list = parse_sweep("n:100,200,300");
  EXPECT_EQ(list.grid, (std::vector<double>{100, 200, 300}));
  EXPECT_EQ(parse_sweep("eps:0.1:0.01:3").grid.size(), 3u);  // decreasing is monotone too
}

TEST(Sweep, RejectsMalformedSpecs) {
  for (const char* bad : {"a", "zz:0:1:3", "a:0:1", "a:0:1:0", "a:0:1:2.5", "a:0:1:3:cubic", "a:0:1:3:log",
                          "a:1,1,2", "a:3,1,2", "a:x:1:3", "a:0:1:1e9", "a:"}) {
    EXPECT_THROW(parse_sweep(bad), std::invalid_argument) << bad;
  }
  EXPECT_THROW(parse_sweep("a:0:0:3"), std::invalid_argument);  // constant grid is not strictly monotone
}

TEST(Sweep, IntegerVariablesAndOddN) {
  Options base;
  std::ostringstream warn;
  base.warn = &warn;
  EXPECT_EQ(*apply_sweep_value(base, "n", 7).n, 8);
  EXPECT_NE(warn.str().find("rounded up"), std::string::npos);
  EXPECT_EQ(*apply_sweep_value(base, "m", 12).m, 12);
  EXPECT_THROW(apply_sweep_value(base, "m", 1.5), UsageError);
  // Sweeping P_t drops a ratio given on the command line.
  base.a = 0.5;
  EXPECT_EQ(apply_sweep_value(base, "pt", 3.0).transmit_power(), 3.0);
}

// ---------------------------------------------------------------------------
// Output

TEST(Output, NumberFormatting) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(1.5e-20), "1.5e-20");
  EXPECT_EQ(format_number(std::optional<double>{}), "");
  EXPECT_EQ(format_bool(true), "true");
}

TEST(Output, CsvAndSvg) {
  Table t;
  t.header = {"series", "x", "y"};
  t.add({"s1", "1", "2"});
  t.add({"s1", "2", "3"});
  t.add({"s2", "1", ""});
  std::ostringstream s;
  write_csv(s, t);
  EXPECT_EQ(s.str(), "series,x,y\ns1,1,2\ns1,2,3\ns2,1,\n");
  const std::string svg = render_svg(t, {"t", "x", "y", "series", false, false});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_THROW(render_svg(t, {"t", "x", "missing", "", false, false}), std::out_of_range);
}

// ---------------------------------------------------------------------------
// pes

TEST(CliPes, TrivialSingleBeaconPoint) {
  const auto r = invoke({"pes", "--mode", "single", "-m", "2", "-n", "2", "-a", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 1u);
  EXPECT_EQ(csv.rows[0][csv.col("pes")], "0.5");
}

TEST(CliPes, RatioSweepIsDecreasing) {
  const auto r = invoke({"pes", "--sweep", "a:0:1:21"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 21u);
  EXPECT_EQ(csv.num(0, "pes"), 1.0);
  for (std::size_t i = 1; i < csv.rows.size(); ++i) EXPECT_LT(csv.num(i, "pes"), csv.num(i - 1, "pes"));
}

TEST(CliPes, MultiBeaconAnalyticAgreesWithMonteCarlo) {
  const auto r = invoke({"pes", "--mode", "multi", "--lambda", "1e-3", "--ppb", "1e3", "--pt", "1", "-m", "1500", "-n",
                         "1000", "--mc-trials", "100000", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  const double analytic = csv.num(0, "pes");
  EXPECT_NEAR(analytic, 0.16648470727, 1e-9);
  EXPECT_LE(std::abs(csv.num(0, "mc_pes") - analytic), 3 * csv.num(0, "mc_std_err"));
}

TEST(CliPes, OutputIsDeterministic) {
  const std::vector<std::string> args{"pes", "--sweep", "a:0.1:1:4", "-m", "30", "-n", "20", "--mc-trials", "5000",
                                      "--seed", "9"};
  const auto a = invoke(args);
  auto with_threads = args;
  with_threads.insert(with_threads.end(), {"--threads", "3"});
  const auto b = invoke(with_threads);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.find('\r'), std::string::npos);
}

// ---------------------------------------------------------------------------
// rate

TEST(CliRate, InfeasiblePointHasEmptyRate) {
  const auto r = invoke({"rate", "-m", "1", "-a", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_EQ(csv.rows[0][csv.col("feasible")], "false");
  EXPECT_EQ(csv.rows[0][csv.col("rate_bits")], "");
  EXPECT_FALSE(csv.rows[0][csv.col("rate_bits_asymptotic")].empty());
}

TEST(CliRate, AsymptoticColumnMatchesPrelogTimesCapacity) {
  const auto r = invoke({"rate", "--pe", "100", "--eps", "0.05", "--sweep", "a:0.001:1:7:log"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 7u);
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const double a = csv.num(i, "a");
    const double snr = a * 100.0;
    const double expected = 0.5 * std::log2(1.0 + snr) / (1.0 + a / std::log(1.025));
    EXPECT_NEAR(csv.num(i, "rate_bits_asymptotic"), expected, 1e-11 * expected);
    EXPECT_EQ(csv.rows[i][csv.col("feasible")], "true");
    EXPECT_LT(csv.num(i, "rate_bits"), csv.num(i, "rate_bits_asymptotic"));
  }
}

// ---------------------------------------------------------------------------
// optpower and plan

TEST(CliOptPower, ReproducesOperatingPoint) {
  const auto r = invoke({"optpower", "--pe", "1e3", "--eps", "1e-3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_NEAR(csv.num(0, "p_t_asymptotic"), 1.1554, 1e-3);
  EXPECT_DOUBLE_EQ(csv.num(0, "a_asymptotic"), csv.num(0, "p_t_asymptotic") / 1e3);
  EXPECT_DOUBLE_EQ(csv.num(0, "a_fbl"), csv.num(0, "p_t_fbl") / 1e3);
  EXPECT_GE(csv.num(0, "p_t_fbl"), csv.num(0, "p_t_asymptotic"));
  EXPECT_GE(csv.num(0, "rate_bits_fbl"), csv.num(0, "rate_bits_fbl_at_asymptotic"));
}

TEST(CliPlan, SingleAndMulti) {
  auto csv = parse_csv(invoke({"plan", "--eps", "0.05", "-a", "0.0012"}).out);
  EXPECT_EQ(csv.rows[0][csv.col("n")], "2026");
  EXPECT_EQ(csv.rows[0][csv.col("feasible")], "true");

  csv = parse_csv(invoke({"plan", "-a", "0"}).out);
  EXPECT_EQ(csv.rows[0][csv.col("m")], "0");

  csv = parse_csv(invoke({"plan", "--mode", "multi", "--lambda", "5e-3", "--pt", "1"}).out);
  EXPECT_EQ(csv.rows[0][csv.col("m")], "9134");
  EXPECT_EQ(csv.rows[0][csv.col("total")], "11160");
  const wpcn::multi::NetworkParams net{5e-3, 1e3, 1.0, 3.6};
  EXPECT_LT(wpcn::multi::energy_supply_prob_mp(9133, 2026, 1.0, net), 2.0 / 2.05);
}

// ---------------------------------------------------------------------------
// figures

TEST(CliFigure, Fig2HasUniqueInteriorMaximumPerCurve) {
  Options o;
  const auto csv = table_csv(cmd_figure("fig2", o));
  const auto groups = by_series(csv);
  ASSERT_EQ(groups.size(), 3u);
  for (const auto& [name, rows] : groups) {
    ASSERT_EQ(rows.size(), 41u) << name;
    std::size_t peak = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (csv.num(rows[i], "rate_bits") > csv.num(rows[peak], "rate_bits")) peak = i;
    }
    EXPECT_GT(peak, 0u) << name;
    EXPECT_LT(peak, rows.size() - 1) << name;
    for (std::size_t i = 1; i <= peak; ++i) EXPECT_GT(csv.num(rows[i], "rate_bits"), csv.num(rows[i - 1], "rate_bits"));
    for (std::size_t i = peak + 1; i < rows.size(); ++i) {
      EXPECT_LT(csv.num(rows[i], "rate_bits"), csv.num(rows[i - 1], "rate_bits"));
    }
  }
}

TEST(CliFigure, Fig6DensityBeatsPowerAtEqualMean) {
  const auto csv = table_csv(cmd_figure("fig6", Options{}));
  const auto groups = by_series(csv);
  const auto& density = groups.at("density_scaling");
  const auto& power = groups.at("power_scaling");
  ASSERT_EQ(density.size(), power.size());
  for (std::size_t i = 0; i < density.size(); ++i) {
    EXPECT_DOUBLE_EQ(csv.num(density[i], "mean_harvested"), csv.num(power[i], "mean_harvested"));
    EXPECT_GE(csv.num(density[i], "pes"), csv.num(power[i], "pes"));
  }
}

TEST(CliFigure, Fig7RateIncreasesWithTransmitLength) {
  Options o;
  o.points = 8;
  const auto csv = table_csv(cmd_figure("fig7", o));
  for (const auto& [name, rows] : by_series(csv)) {
    EXPECT_EQ(csv.num(rows.front(), "n"), wpcn::planner::min_transmit_blocklength(0.1)) << name;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      EXPECT_GT(csv.num(rows[i], "rate_bits"), csv.num(rows[i - 1], "rate_bits")) << name;
    }
  }
}

TEST(CliFigure, Fig3And45Shapes) {
  Options o;
  o.points = 6;
  const auto fig3 = table_csv(cmd_figure("fig3", o));
  const auto g3 = by_series(fig3);
  ASSERT_EQ(g3.size(), 3u);
  for (std::size_t i = 0; i < g3.at("fixed_power").size(); ++i) {
    // The optimized curve dominates both closed-form power choices.
    const double best = fig3.num(g3.at("optimized_power")[i], "rate_bits");
    EXPECT_GE(best * (1 + 1e-12), fig3.num(g3.at("adapted_power")[i], "rate_bits"));
    EXPECT_GE(best * (1 + 1e-12), fig3.num(g3.at("fixed_power")[i], "rate_bits"));
  }
  const auto fig4 = table_csv(cmd_figure("fig4", o));
  const auto g4 = by_series(fig4);
  for (std::size_t i = 1; i < g4.at("asymptotic").size(); ++i) {
    EXPECT_GT(fig4.num(g4.at("asymptotic")[i], "p_t"), fig4.num(g4.at("asymptotic")[i - 1], "p_t"));
    EXPECT_LT(fig4.num(g4.at("asymptotic")[i], "a"), fig4.num(g4.at("asymptotic")[i - 1], "a"));
  }
}

TEST(CliFigure, WritesCsvAndSvgFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "wpcn_cli_test_fig";
  std::filesystem::remove_all(dir);
  const auto r = invoke({"figure", "fig6", "--out-dir", dir.string(), "--svg", "--points", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "fig6.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "fig6.svg"));
  std::ifstream f(dir / "fig6.csv");
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "series,k,lambda,p_pb,mean_harvested,pes");
  std::filesystem::remove_all(dir);
}

// ---------------------------------------------------------------------------
// Exit statuses and configuration

TEST(CliExit, Statuses) {
  EXPECT_EQ(invoke({"figure", "fig9"}).code, kExitUsage);
  EXPECT_EQ(invoke({"pes", "--mode", "bogus"}).code, kExitUsage);
  EXPECT_EQ(invoke({"pes", "--sweep", "a:1:0"}).code, kExitUsage);
  EXPECT_EQ(invoke({"pes", "--no-such-flag"}).code, kExitUsage);
  EXPECT_EQ(invoke({}).code, kExitUsage);
  EXPECT_EQ(invoke({"pes", "--eps", "2"}).code, kExitLibrary);
  EXPECT_EQ(invoke({"rate", "--pe", "-1"}).code, kExitLibrary);
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
}

TEST(CliConfig, FlagsOverrideFile) {
  const auto path = std::filesystem::temp_directory_path() / "wpcn_cli_test.conf";
  {
    std::ofstream f(path);
    f << "eps = 0.1\nm = 3\nn = 4\nratio = 1\n";
  }
  auto csv = parse_csv(invoke({"pes", "--config", path.string()}).out);
  EXPECT_EQ(csv.rows[0][csv.col("m")], "3");
  EXPECT_NEAR(csv.num(0, "pes"), 9.0 / 25.0, 1e-15);  // (1 + 2/3)^-2
  csv = parse_csv(invoke({"pes", "--config", path.string(), "-m", "2"}).out);
  EXPECT_NEAR(csv.num(0, "pes"), 0.25, 1e-15);
  csv = parse_csv(invoke({"plan", "--config", path.string(), "-a", "0"}).out);
  EXPECT_EQ(csv.rows[0][csv.col("eps")], "0.1");
  std::filesystem::remove(path);
}

TEST(CliValidate, PassesAndReportsEveryCheck) {
  const auto r = invoke({"validate", "--mc-trials", "20000", "--seed", "5"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_GE(csv.rows.size(), 10u);
  for (const auto& row : csv.rows) EXPECT_EQ(row[csv.col("outcome")], "PASS") << row[0];
}
