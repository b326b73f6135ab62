#pragma once

#include <string>
#include <vector>

namespace wpcn::cli {

/// A swept parameter and its grid. Parsed from
///   VAR:START:STOP:POINTS[:log]   or   VAR:v1,v2,...
struct SweepSpec {
  std::string variable;
  std::vector<double> grid;
};

/// Throws std::invalid_argument on malformed specs, unknown variables, or
/// grids that are empty or not strictly monotone.
SweepSpec parse_sweep(const std::string& text);

/// Names accepted as sweep variables.
const std::vector<std::string>& sweep_variables();

}  // namespace wpcn::cli
