#pragma once

// CSV tables and a minimal SVG line-chart renderer.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace wpcn::cli {

/// Numbers with 12 significant digits; empty cells stay empty.
std::string format_number(double x);
std::string format_number(std::optional<double> x);
std::string format_bool(bool b);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  /// Index of a header column; throws std::out_of_range when absent.
  [[nodiscard]] std::size_t column(const std::string& name) const;
};

/// Comma-separated, LF line endings, header first.
void write_csv(std::ostream& out, const Table& table);
void write_csv_file(const std::string& path, const Table& table);

struct ChartSpec {
  std::string title;
  std::string x_column;
  std::string y_column;
  std::string series_column;  ///< empty: one series
  bool log_x = false;
  bool log_y = false;
};

/// Renders the named columns of `table` as polylines, one per series value.
std::string render_svg(const Table& table, const ChartSpec& spec);

}  // namespace wpcn::cli
