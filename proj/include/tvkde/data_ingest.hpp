#pragma once

#include <Eigen/Core>

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tvkde {

using Date = std::chrono::year_month_day;

//! Accepts YYYY-MM-DD or MM/DD/YYYY; throws FormatError otherwise.
Date
parse_date(std::string_view text);

std::string
format_date(const Date& d);

struct PriceSeries
{
  std::vector<Date> dates;
  std::vector<double> closes;
  //! Rows dropped during loading for a missing or non-positive close.
  std::size_t dropped_rows = 0;

  std::size_t size() const { return dates.size(); }
  bool operator==(const PriceSeries& other) const
  {
    return dates == other.dates && closes == other.closes;
  }
};

enum class ReturnKind
{
  Log,
  Simple
};

std::string_view
to_string(ReturnKind kind);
ReturnKind
parse_return_kind(std::string_view name);

struct ReturnSeries
{
  std::vector<Date> dates;
  Eigen::VectorXd returns;
  ReturnKind kind = ReturnKind::Log;

  std::size_t size() const { return dates.size(); }
};

struct CsvFormat
{
  std::string date_column = "Date";
  std::string close_column = "Close";
  char delimiter = ',';
  std::size_t min_rows = 30;
};

//! Throws the invariant violation if dates are not strictly increasing or a
//! close is not positive.
void
validate(const PriceSeries& p);

PriceSeries
read_prices(std::istream& in, const CsvFormat& format = {});

//! Relative paths are resolved against $TVKDE_DATA_DIR when set and the
//! file does not exist as given.
PriceSeries
load_prices(const std::filesystem::path& path, const CsvFormat& format = {});

std::filesystem::path
resolve_data_path(const std::filesystem::path& path);

ReturnSeries
to_returns(const PriceSeries& p, ReturnKind kind = ReturnKind::Log);

//! 1-based return index: a Date maps to the first return date on or after
//! it, an integer is taken literally.
using T0Spec = std::variant<Date, long>;

long
resolve_t0(const ReturnSeries& series, const T0Spec& spec);

//! Parses "YYYY-MM-DD", "MM/DD/YYYY" or a plain integer.
T0Spec
parse_t0(std::string_view text);

void
write_prices(std::ostream& out, const PriceSeries& p, const CsvFormat& format = {});

void
write_returns(std::ostream& out, const ReturnSeries& r);

} // namespace tvkde
