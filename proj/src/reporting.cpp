#include "tvkde/reporting.hpp"

#include "tvkde/errors.hpp"
#include "tvkde/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace tvkde {

namespace {

constexpr double panel_width = 520.0;
constexpr double panel_height = 320.0;
constexpr double margin_left = 70.0;
constexpr double margin_right = 20.0;
constexpr double margin_top = 36.0;
constexpr double margin_bottom = 48.0;

constexpr const char* palette[] = { "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f" };

std::string
xml_escape(std::string_view s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string
fixed(double v, int digits = 2)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string
tick_label(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v)
  {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void finish()
  {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi - lo <= 0.0) {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

void
render_panel(std::ostream& svg, const PlotPanel& panel, double ox, double oy)
{
  Range xr;
  Range yr;
  for (const auto& s : panel.series) {
    if (s.x.size() != s.y.size())
      throw ParameterError("plot series '" + s.name + "' has mismatched x and y");
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
      if (std::isfinite(s.y[i])) {
        xr.add(s.x[i]);
        yr.add(s.y[i]);
      }
    }
  }
  xr.finish();
  yr.finish();

  const double pw = panel_width - margin_left - margin_right;
  const double ph = panel_height - margin_top - margin_bottom;
  const double x0 = ox + margin_left;
  const double y0 = oy + margin_top;
  auto px = [&](double x) { return x0 + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return y0 + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  svg << "<g>\n";
  svg << "<text x=\"" << fixed(ox + panel_width / 2) << "\" y=\"" << fixed(oy + 22)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(panel.title) << "</text>\n";
  svg << "<rect x=\"" << fixed(x0) << "\" y=\"" << fixed(y0) << "\" width=\"" << fixed(pw)
      << "\" height=\"" << fixed(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    svg << "<text x=\"" << fixed(px(fx)) << "\" y=\"" << fixed(y0 + ph + 16)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(fx) << "</text>\n";
    svg << "<text x=\"" << fixed(x0 - 6) << "\" y=\"" << fixed(py(fy) + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << tick_label(fy) << "</text>\n";
  }
  svg << "<text x=\"" << fixed(x0 + pw / 2) << "\" y=\"" << fixed(oy + panel_height - 8)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << xml_escape(panel.x_label)
      << "</text>\n";
  svg << "<text x=\"" << fixed(ox + 14) << "\" y=\"" << fixed(y0 + ph / 2)
      << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 " << fixed(ox + 14)
      << ' ' << fixed(y0 + ph / 2) << ")\">" << xml_escape(panel.y_label) << "</text>\n";

  std::size_t color = 0;
  for (const auto& s : panel.series) {
    const char* stroke = s.dotted ? "#555" : palette[color++ % std::size(palette)];
    svg << "<polyline data-series=\"" << xml_escape(s.name) << "\" fill=\"none\" stroke=\""
        << stroke << "\" stroke-width=\"1.2\"";
    if (s.dotted)
      svg << " stroke-dasharray=\"2 3\"";
    svg << " points=\"";
    bool first = true;
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
        continue;
      svg << (first ? "" : " ") << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i]));
      first = false;
    }
    svg << "\"/>\n";
  }

  double ly = y0 + 12;
  color = 0;
  for (const auto& s : panel.series) {
    const char* stroke = s.dotted ? "#555" : palette[color++ % std::size(palette)];
    svg << "<text x=\"" << fixed(x0 + pw - 6) << "\" y=\"" << fixed(ly)
        << "\" text-anchor=\"end\" font-size=\"10\" fill=\"" << stroke << "\">"
        << xml_escape(s.name) << "</text>\n";
    ly += 12;
  }
  svg << "</g>\n";
}

} // namespace

std::string
RunConfig::hash() const
{
  std::string canonical = "command=" + command + "\nseed=" + std::to_string(seed) + "\n";
  for (const auto& [k, v] : settings)
    canonical += k + "=" + v + "\n";
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
  return buf;
}

std::string_view
tool_version()
{
  return TVKDE_VERSION;
}

void
write_csv_metadata(std::ostream& out, const RunConfig& cfg)
{
  out << "# tool: tvkde " << tool_version() << '\n';
  out << "# command: " << cfg.command << '\n';
  out << "# config_hash: " << cfg.hash() << '\n';
  out << "# seed: " << cfg.seed << '\n';
  for (const auto& [k, v] : cfg.settings)
    out << "# " << k << ": " << v << '\n';
}

std::string
format_number(double value)
{
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

void
write_csv_table(std::ostream& out,
                const std::vector<std::string>& columns,
                const Eigen::MatrixXd& values,
                const std::vector<std::string>& labels)
{
  const auto offset = labels.empty() ? 0 : 1;
  if (static_cast<Eigen::Index>(columns.size()) != values.cols() + offset)
    throw ParameterError("CSV column names do not match the table width");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != values.rows())
    throw ParameterError("CSV row labels do not match the table height");
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << (c ? "," : "") << columns[c];
  out << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    if (!labels.empty())
      out << labels[static_cast<std::size_t>(r)] << ',';
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      out << (c ? "," : "") << format_number(values(r, c));
    out << '\n';
  }
}

std::string
render_svg(const RunConfig& cfg, const std::vector<PlotPanel>& panels, int columns)
{
  columns = std::max(1, std::min<int>(columns, static_cast<int>(panels.size())));
  const int rows = static_cast<int>((panels.size() + columns - 1) / columns);
  std::ostringstream svg;
  svg << "<!-- tvkde " << tool_version() << " command=" << xml_escape(cfg.command)
      << " config_hash=" << cfg.hash() << " seed=" << cfg.seed << " -->\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(panel_width * columns)
      << "\" height=\"" << fixed(panel_height * std::max(rows, 1)) << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p)
    render_panel(svg, panels[p], panel_width * static_cast<double>(p % columns),
                 panel_height * static_cast<double>(p / columns));
  svg << "</svg>\n";
  return svg.str();
}

CommonPair
common_pair(const std::vector<IndexSelection>& selections)
{
  if (selections.empty())
    throw DataError("common pair needs at least one selection");
  CommonPair out{ selections.front().h, selections.front().omega, selections.front().name,
                  selections.front().name };
  for (const auto& s : selections) {
    if (s.h > out.h) {
      out.h = s.h;
      out.h_source = s.name;
    }
    if (s.omega < out.omega) {
      out.omega = s.omega;
      out.omega_source = s.name;
    }
  }
  return out;
}

} // namespace tvkde
