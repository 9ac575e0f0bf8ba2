#include "tvkde/data_ingest.hpp"

#include "tvkde/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace tvkde {

namespace {

std::string_view
trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view>
split(std::string_view line, char delim)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool
parse_number(std::string_view s, T& value)
{
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc() && ptr == end;
}

std::size_t
find_column(const std::vector<std::string_view>& header, const std::string& name)
{
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw FormatError("missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

} // namespace

Date
parse_date(std::string_view text)
{
  text = trim(text);
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  bool ok = false;
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    ok = parse_number(text.substr(0, 4), y) && parse_number(text.substr(5, 2), m) &&
         parse_number(text.substr(8, 2), d);
  } else if (const auto a = text.find('/'), b = text.rfind('/');
             a != std::string_view::npos && b != a) {
    ok = parse_number(text.substr(0, a), m) && parse_number(text.substr(a + 1, b - a - 1), d) &&
         parse_number(text.substr(b + 1), y) && b + 5 == text.size();
  }
  const Date date{ std::chrono::year(y), std::chrono::month(m), std::chrono::day(d) };
  if (!ok || !date.ok())
    throw FormatError("unparseable date '" + std::string(text) + "'");
  return date;
}

std::string
format_date(const Date& d)
{
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::string_view
to_string(ReturnKind kind)
{
  return kind == ReturnKind::Log ? "log" : "simple";
}

ReturnKind
parse_return_kind(std::string_view name)
{
  if (name == "log")
    return ReturnKind::Log;
  if (name == "simple")
    return ReturnKind::Simple;
  throw ParameterError("unknown return kind '" + std::string(name) + "'");
}

void
validate(const PriceSeries& p)
{
  if (p.dates.size() != p.closes.size())
    throw InvariantError("price series dates and closes differ in length");
  for (std::size_t i = 1; i < p.dates.size(); ++i)
    if (!(p.dates[i - 1] < p.dates[i]))
      throw InvariantError("price dates must be strictly increasing");
  for (double c : p.closes)
    if (!(c > 0.0) || !std::isfinite(c))
      throw InvariantError("closes must be positive");
}

PriceSeries
read_prices(std::istream& in, const CsvFormat& format)
{
  std::string line;
  if (!std::getline(in, line))
    throw FormatError("empty price file");
  const auto header = split(line, format.delimiter);
  const auto date_col = find_column(header, format.date_column);
  const auto close_col = find_column(header, format.close_column);

  std::vector<std::pair<Date, double>> rows;
  std::size_t dropped = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    const auto fields = split(line, format.delimiter);
    if (fields.size() <= std::max(date_col, close_col))
      throw FormatError("line " + std::to_string(line_no) + " has too few fields");
    const auto date = parse_date(fields[date_col]);
    double close = 0.0;
    if (!parse_number(fields[close_col], close) || !(close > 0.0) || !std::isfinite(close)) {
      ++dropped;
      continue;
    }
    rows.emplace_back(date, close);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::string duplicates;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].first == rows[i - 1].first &&
        (i == 1 || rows[i - 2].first != rows[i].first))
      duplicates += (duplicates.empty() ? "" : ", ") + format_date(rows[i].first);
  if (!duplicates.empty())
    throw FormatError("duplicate dates: " + duplicates);
  if (rows.size() < format.min_rows)
    throw InsufficientDataError("only " + std::to_string(rows.size()) + " usable rows, need " +
                                std::to_string(format.min_rows));

  PriceSeries p;
  p.dropped_rows = dropped;
  p.dates.reserve(rows.size());
  p.closes.reserve(rows.size());
  for (const auto& [d, c] : rows) {
    p.dates.push_back(d);
    p.closes.push_back(c);
  }
  return p;
}

std::filesystem::path
resolve_data_path(const std::filesystem::path& path)
{
  if (path.is_relative() && !std::filesystem::exists(path))
    if (const char* root = std::getenv("TVKDE_DATA_DIR"); root != nullptr && *root != '\0')
      return std::filesystem::path(root) / path;
  return path;
}

PriceSeries
load_prices(const std::filesystem::path& path, const CsvFormat& format)
{
  const auto resolved = resolve_data_path(path);
  std::ifstream in(resolved);
  if (!in)
    throw DataError("cannot open price file '" + resolved.string() + "'");
  return read_prices(in, format);
}

ReturnSeries
to_returns(const PriceSeries& p, ReturnKind kind)
{
  if (p.size() < 2)
    throw InsufficientDataError("returns need at least two prices");
  validate(p);
  ReturnSeries r;
  r.kind = kind;
  r.dates.assign(p.dates.begin() + 1, p.dates.end());
  r.returns.resize(static_cast<Eigen::Index>(p.size() - 1));
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double ratio = p.closes[i] / p.closes[i - 1];
    r.returns[static_cast<Eigen::Index>(i - 1)] =
      kind == ReturnKind::Log ? std::log(ratio) : ratio - 1.0;
  }
  return r;
}

long
resolve_t0(const ReturnSeries& series, const T0Spec& spec)
{
  const auto n = static_cast<long>(series.size());
  if (n == 0)
    throw DataError("empty return series");
  if (const auto* index = std::get_if<long>(&spec)) {
    if (*index < 1 || *index > n)
      throw ParameterError("t0 index " + std::to_string(*index) + " outside [1, " +
                           std::to_string(n) + "]");
    return *index;
  }
  const auto& date = std::get<Date>(spec);
  const auto it = std::lower_bound(series.dates.begin(), series.dates.end(), date);
  if (it == series.dates.end())
    throw ParameterError("t0 date " + format_date(date) + " is after the last return date");
  return static_cast<long>(it - series.dates.begin()) + 1;
}

T0Spec
parse_t0(std::string_view text)
{
  text = trim(text);
  long index = 0;
  if (parse_number(text, index))
    return index;
  return parse_date(text);
}

void
write_prices(std::ostream& out, const PriceSeries& p, const CsvFormat& format)
{
  out << format.date_column << format.delimiter << format.close_column << '\n';
  char buf[64];
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p.closes[i]);
    out << format_date(p.dates[i]) << format.delimiter << std::string_view(buf, end - buf)
        << '\n';
  }
}

void
write_returns(std::ostream& out, const ReturnSeries& r)
{
  out << "date,return\n";
  char buf[64];
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto [end, ec] =
      std::to_chars(buf, buf + sizeof buf, r.returns[static_cast<Eigen::Index>(i)]);
    out << format_date(r.dates[i]) << ',' << std::string_view(buf, end - buf) << '\n';
  }
}

} // namespace tvkde
