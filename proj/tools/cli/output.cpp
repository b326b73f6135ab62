#include "cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wpcn::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string format_number(std::optional<double> x) { return x ? format_number(*x) : std::string(); }

std::string format_bool(bool b) { return b ? "true" : "false"; }

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("no column named " + name);
  return static_cast<std::size_t>(it - header.begin());
}

void write_csv(std::ostream& out, const Table& table) {
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

void write_csv_file(const std::string& path, const Table& table) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(f, table);
}

std::string render_svg(const Table& table, const ChartSpec& spec) {
  constexpr double kWidth = 720, kHeight = 440, kLeft = 70, kRight = 170, kTop = 40, kBottom = 50;
  const std::size_t xi = table.column(spec.x_column);
  const std::size_t yi = table.column(spec.y_column);
  const std::optional<std::size_t> si =
      spec.series_column.empty() ? std::nullopt : std::optional<std::size_t>(table.column(spec.series_column));

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& r : table.rows) {
    if (r[xi].empty() || r[yi].empty()) continue;
    double x = std::stod(r[xi]), y = std::stod(r[yi]);
    if ((spec.log_x && x <= 0) || (spec.log_y && y <= 0) || !std::isfinite(x) || !std::isfinite(y)) continue;
    if (spec.log_x) x = std::log10(x);
    if (spec.log_y) y = std::log10(y);
    const std::string key = si ? r[*si] : spec.y_column;
    if (!series.count(key)) order.push_back(key);
    series[key].emplace_back(x, y);
    x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
  }
  if (order.empty()) { x0 = 0, x1 = 1, y0 = 0, y1 = 1; }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); };
  auto py = [&](double y) { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" << spec.title << "</text>\n";
  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
    << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4, yv = y0 + (y1 - y0) * t / 4;
    s << "<text x=\"" << px(xv) << "\" y=\"" << kHeight - kBottom + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
      << format_number(spec.log_x ? std::pow(10.0, xv) : xv).substr(0, 8) << "</text>\n";
    s << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
      << format_number(spec.log_y ? std::pow(10.0, yv) : yv).substr(0, 8) << "</text>\n";
  }
  s << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10
    << "\" font-size=\"12\" text-anchor=\"middle\">" << spec.x_column << "</text>\n";
  s << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
    << (kTop + kHeight - kBottom) / 2 << ")\" text-anchor=\"middle\">" << spec.y_column << "</text>\n";
  for (std::size_t k = 0; k < order.size(); ++k) {
    const char* colour = palette[k % 6];
    s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.6\" points=\"";
    for (const auto& [x, y] : series[order[k]]) s << px(x) << ',' << py(y) << ' ';
    s << "\"/>\n";
    const double ly = kTop + 16 + 18.0 * static_cast<double>(k);
    s << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 30 << "\" y2=\""
      << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << kWidth - kRight + 34 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">" << order[k]
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace wpcn::cli
