#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tvkde {

//! Fully resolved settings of one run. Serialized into the header of every
//! output so a file can be reproduced from its own header.
struct RunConfig
{
  std::string command;
  std::map<std::string, std::string> settings;
  std::uint64_t seed = 0;

  //! FNV-1a of the canonical "key=value\n" listing, as 16 hex digits.
  std::string hash() const;
};

std::string_view
tool_version();

//! "# key: value" lines for CSV outputs.
void
write_csv_metadata(std::ostream& out, const RunConfig& cfg);

//! Shortest round-trip decimal form.
std::string
format_number(double value);

//! Header row, then one row per matrix row. `labels` (optional) becomes the
//! first column.
void
write_csv_table(std::ostream& out,
                const std::vector<std::string>& columns,
                const Eigen::MatrixXd& values,
                const std::vector<std::string>& labels = {});

struct PlotSeries
{
  std::string name;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  bool dotted = false;
};

struct PlotPanel
{
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

//! Self-contained SVG with panels laid out on a grid of `columns` columns.
//! Each series becomes exactly one <polyline>; the metadata goes in a
//! leading comment.
std::string
render_svg(const RunConfig& cfg, const std::vector<PlotPanel>& panels, int columns = 2);

struct IndexSelection
{
  std::string name;
  double h = 0.0;
  double omega = 1.0;
};

struct CommonPair
{
  double h = 0.0;
  double omega = 1.0;
  std::string h_source;
  std::string omega_source;
};

//! Largest bandwidth and smallest discount across indices.
CommonPair
common_pair(const std::vector<IndexSelection>& selections);

} // namespace tvkde
