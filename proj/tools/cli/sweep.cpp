#include "cli/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wpcn::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("sweep: not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("sweep: not a number: '" + s + "'");
  return v;
}

}  // namespace

const std::vector<std::string>& sweep_variables() {
  static const std::vector<std::string> names{"a", "pt", "pe", "sigma2", "eps", "m", "n", "lambda", "ppb", "mu", "eta"};
  return names;
}

SweepSpec parse_sweep(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() < 2) throw std::invalid_argument("sweep: expected VAR:START:STOP:POINTS[:log] or VAR:v1,v2,...");
  SweepSpec spec;
  spec.variable = parts[0];
  const auto& names = sweep_variables();
  if (std::find(names.begin(), names.end(), spec.variable) == names.end()) {
    throw std::invalid_argument("sweep: unknown variable '" + spec.variable + "'");
  }

  if (parts.size() == 2) {
    for (const auto& v : split(parts[1], ',')) spec.grid.push_back(to_double(v));
  } else {
    if (parts.size() != 4 && parts.size() != 5) {
      throw std::invalid_argument("sweep: expected VAR:START:STOP:POINTS[:log]");
    }
    const double start = to_double(parts[1]);
    const double stop = to_double(parts[2]);
    const double points_d = to_double(parts[3]);
    if (points_d < 1 || points_d != std::floor(points_d) || points_d > 1e7) {
      throw std::invalid_argument("sweep: POINTS must be a positive integer");
    }
    const auto points = static_cast<int>(points_d);
    bool log = false;
    if (parts.size() == 5) {
      if (parts[4] == "log") log = true;
      else if (parts[4] != "lin" && parts[4] != "linear") throw std::invalid_argument("sweep: scale must be 'log' or 'lin'");
    }
    if (log && (start <= 0 || stop <= 0)) throw std::invalid_argument("sweep: log grids need positive bounds");
    for (int i = 0; i < points; ++i) {
      const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
      double v = log ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start))) : start + t * (stop - start);
      if (i == points - 1 && points > 1) v = stop;  // land exactly on the end point
      spec.grid.push_back(v);
    }
  }

  if (spec.grid.empty()) throw std::invalid_argument("sweep: empty grid");
  if (spec.grid.size() > 1) {
    const bool up = spec.grid[1] > spec.grid[0];
    for (std::size_t i = 1; i < spec.grid.size(); ++i) {
      if (up ? !(spec.grid[i] > spec.grid[i - 1]) : !(spec.grid[i] < spec.grid[i - 1])) {
        throw std::invalid_argument("sweep: grid must be strictly monotone");
      }
    }
  }
  return spec;
}

}  // namespace wpcn::cli
