#pragma once

#include "tvkde/data_ingest.hpp"
#include "tvkde/kernels.hpp"
#include "tvkde/param_selection.hpp"
#include "tvkde/reporting.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tvkde::cli {

struct GlobalOptions
{
  //! Empty means the command's own default.
  std::string kernel;
  int nu = 22;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string config;
};

struct DataOptions
{
  std::string input = "synthetic_prices.csv";
  std::string date_column = "Date";
  std::string close_column = "Close";
  std::string returns = "log";
  std::string t0 = "2019-11-01";
  std::size_t min_rows = 30;
};

struct ParamOptions
{
  //! Non-positive means "not given".
  double h = 0.0;
  double omega = 0.0;
  std::string selection;
};

struct SelectOptions
{
  std::string criterion = "pit";
  bool constrained = false;
  bool static_framework = false;
  std::string normalization = "as-printed";
  //! Non-positive means the default bound.
  double h_min = 0.0;
  double h_max = 0.0;
  double omega_min = 0.0;
  double omega_max = 0.0;
};

struct SnapshotOptions
{
  std::vector<std::string> dates;
  long points = 512;
};

struct TrackOptions
{
  bool bands = false;
  bool peak = false;
  std::string early_date = "2020-02-07";
};

struct BandOptions
{
  long paths = 1000;
  //! Non-positive: sample standard deviation of the returns up to t0.
  double sigma = 0.0;
};

struct SimOptions
{
  int seeds = 1;
  long n = 2000;
  long t0 = 1000;
  double drift = 0.01;
  double scale = 1.0;
  long window_points = 4096;
};

struct ReportOptions
{
  std::vector<std::string> inputs;
};

struct Options
{
  GlobalOptions global;
  DataOptions data;
  ParamOptions params;
  SelectOptions select;
  SnapshotOptions snapshot;
  TrackOptions track;
  BandOptions bands;
  SimOptions sim;
  ReportOptions report;
};

//! Loaded data plus the resolved run configuration shared by the commands.
struct Context
{
  Options opt;
  RunConfig run;
  std::filesystem::path out_dir;

  KernelSpec kernel(KernelKind fallback = KernelKind::Epanechnikov) const;
};

int
cmd_select(Context& ctx);
int
cmd_snapshot(Context& ctx);
int
cmd_track(Context& ctx);
int
cmd_bands(Context& ctx);
int
cmd_peak(Context& ctx);
int
cmd_simstudy(Context& ctx);
int
cmd_report(Context& ctx);

//! {"metadata": {...}} for the start of every JSON output.
nlohmann::ordered_json
metadata_json(const RunConfig& run);

} // namespace tvkde::cli
