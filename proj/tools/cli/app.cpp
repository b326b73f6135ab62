#include "cli/app.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>

#include "cli/commands.hpp"
#include "wpcn/error.hpp"

namespace wpcn::cli {

namespace {

void emit(const Table& table, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    write_csv(out, table);
  } else {
    write_csv_file(out_path, table);
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opts;
  opts.warn = &err;
  std::string sweep_text;
  std::string out_path;
  std::string out_dir;
  bool svg = false;
  std::string figure_name;

  CLI::App app{"Energy supply probability and finite-blocklength rates of wirelessly powered links", "wpcn"};
  app.fallthrough(true);
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "Flat key=value file; command-line flags override it");

  app.add_option("--mode", opts.mode, "single | multi")->check(CLI::IsMember({"single", "multi"}))->capture_default_str();
  app.add_option("--pt", opts.p_t, "Transmit power P_t")->capture_default_str();
  app.add_option("--pe", opts.p_e, "Mean harvested power P_E (single beacon)")->capture_default_str();
  app.add_option("--sigma2", opts.sigma2, "Receiver noise power")->capture_default_str();
  app.add_option("--eps", opts.epsilon, "Target decoding error probability")->capture_default_str();
  app.add_option("-m,--harvest", opts.m, "Harvest blocklength (default: planned or equal to n)");
  app.add_option("-n,--transmit", opts.n, "Transmit blocklength, even (default: minimum-latency value)");
  app.add_option("-a,--ratio", opts.a, "Power ratio; sets P_t = a P_E (single) or a mu P_PB (multi)");
  app.add_option("--lambda", opts.lambda, "Beacon density per unit area")->capture_default_str();
  app.add_option("--ppb", opts.p_pb, "Beacon transmit power")->capture_default_str();
  app.add_option("--mu", opts.mu, "Rectifier efficiency")->capture_default_str();
  app.add_option("--eta", opts.eta, "Path-loss exponent (> 2)")->capture_default_str();
  app.add_option("--mc-trials", opts.mc_trials, "Monte Carlo trials (0 disables; validate defaults to 1e5)")
      ->capture_default_str();
  app.add_option("--seed", opts.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--threads", opts.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
  app.add_option("--sweep", sweep_text, "VAR:START:STOP:POINTS[:log] or VAR:v1,v2,...");
  app.add_option("--out", out_path, "Write CSV here instead of stdout");
  app.add_option("--out-dir", out_dir, "Directory for figure CSV/SVG files");
  app.add_flag("--svg", svg, "Also render figures as SVG line charts");
  app.add_option("--fig2-eps", opts.fig2_eps, "Error targets of the fig2 curves")->delimiter(',')->capture_default_str();
  app.add_option("--fig2-pe", opts.fig2_pe, "Mean harvested power of fig2")->capture_default_str();
  app.add_option("--fig2-amin", opts.fig2_a_min, "Smallest power ratio of fig2")->capture_default_str();
  app.add_option("--fig2-amax", opts.fig2_a_max, "Largest power ratio of fig2")->capture_default_str();
  app.add_option("--points", opts.points, "Grid points of a figure (0 = figure default)")->capture_default_str();

  auto* pes = app.add_subcommand("pes", "Energy supply probability (optionally with Monte Carlo)");
  auto* rate = app.add_subcommand("rate", "Finite-blocklength and asymptotic achievable rates");
  auto* optpower = app.add_subcommand("optpower", "Rate-maximizing transmit power");
  auto* plan = app.add_subcommand("plan", "Minimum-latency blocklengths");
  auto* figure = app.add_subcommand("figure", "Regenerate a figure's data");
  figure->add_option("name", figure_name, "fig2 | fig3 | fig4 | fig5 | fig6 | fig7")->required();
  auto* validate = app.add_subcommand("validate", "Closed forms against Monte Carlo and derivative cross-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!sweep_text.empty()) opts.sweep = parse_sweep(sweep_text);
    if (opts.n && *opts.n % 2 != 0 && *opts.n > 0) {
      err << "warning: odd n = " << *opts.n << " rounded up to " << *opts.n + 1 << '\n';
      ++*opts.n;
    }
    opts.validate();

    if (pes->parsed()) emit(cmd_pes(opts), out_path, out);
    if (rate->parsed()) emit(cmd_rate(opts), out_path, out);
    if (optpower->parsed()) emit(cmd_optpower(opts), out_path, out);
    if (plan->parsed()) emit(cmd_plan(opts), out_path, out);
    if (figure->parsed()) {
      const Table table = cmd_figure(figure_name, opts);
      std::string csv_path = out_path;
      if (csv_path.empty() && !out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        csv_path = (std::filesystem::path(out_dir) / (figure_name + ".csv")).string();
      }
      emit(table, csv_path, out);
      if (svg) {
        if (csv_path.empty()) throw UsageError("--svg needs --out or --out-dir");
        write_text(std::filesystem::path(csv_path).replace_extension(".svg"),
                   render_svg(table, figure_chart(figure_name)));
      }
    }
    if (validate->parsed()) {
      const auto checks = cmd_validate(opts);
      emit(validation_table(checks), out_path, out);
      std::size_t failed = 0;
      for (const auto& c : checks) failed += c.passed ? 0 : 1;
      err << (failed == 0 ? "validate: all " + std::to_string(checks.size()) + " checks passed\n"
                          : "validate: " + std::to_string(failed) + " of " + std::to_string(checks.size()) +
                                " checks failed\n");
      if (failed != 0) return kExitValidation;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const wpcn::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitLibrary;
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << '\n';
    return kExitUnexpected;
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"wpcn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace wpcn::cli
