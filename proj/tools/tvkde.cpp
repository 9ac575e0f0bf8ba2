#include "cli.hpp"

#include "tvkde/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

namespace {

using namespace tvkde;
using namespace tvkde::cli;

constexpr int exit_ok = 0;
constexpr int exit_data = 2;
constexpr int exit_selection = 3;
constexpr int exit_invariant = 4;

std::string
trim(std::string s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// key=value lines; '#' starts a comment. Keys are long option names
// without the leading dashes.
std::vector<std::pair<std::string, std::string>>
read_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

CLI::Option*
find_option(CLI::App& app, CLI::App& sub, const std::string& key)
{
  const std::string name = "--" + key;
  if (auto* opt = sub.get_option_no_throw(name))
    return opt;
  return app.get_option_no_throw(name);
}

// Config values fill options that were not given on the command line.
void
apply_config(CLI::App& app, CLI::App& sub, const std::string& path)
{
  for (const auto& [key, value] : read_config(path)) {
    auto* opt = find_option(app, sub, key);
    if (opt == nullptr || key == "config")
      throw ParameterError("unknown config key '" + key + "' for command " + sub.get_name());
    if (opt->count() > 0)
      continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

std::string
option_value(const CLI::Option* opt)
{
  if (opt->count() == 0)
    return opt->get_type_size_max() == 0 ? "false" : opt->get_default_str();
  std::string joined;
  for (const auto& r : opt->results())
    joined += (joined.empty() ? "" : ",") + r;
  return joined;
}

void
collect(const CLI::App& app, std::map<std::string, std::string>& settings)
{
  for (const auto* opt : app.get_options()) {
    const auto& name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config" || name == "out" ||
        name == "version")
      continue;
    settings[name] = option_value(opt);
  }
}

} // namespace

int
main(int argc, char** argv)
{
#ifdef TVKDE_BUNDLED_DATA_DIR
  if (std::getenv("TVKDE_DATA_DIR") == nullptr)
    setenv("TVKDE_DATA_DIR", TVKDE_BUNDLED_DATA_DIR, 0);
#endif

  Context ctx;
  auto& o = ctx.opt;
  CLI::App app{ "Time-varying kernel density estimation of return series" };
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.add_option("--kernel", o.global.kernel, "epanechnikov or gaussian (simstudy defaults to gaussian)");
  app.add_option("--nu", o.global.nu, "Maximum PIT lag")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.global.seed, "Master random seed");
  app.add_option("--out", o.global.out, "Output directory");
  app.add_option("--config", o.global.config, "key=value file; flags take precedence");

  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--input", o.data.input, "Price CSV (relative paths also searched in $TVKDE_DATA_DIR)");
    sub->add_option("--date-column", o.data.date_column);
    sub->add_option("--close-column", o.data.close_column);
    sub->add_option("--returns", o.data.returns, "log or simple")
      ->check(CLI::IsMember({ "log", "simple" }));
    sub->add_option("--t0,--reference-date", o.data.t0, "Date (first trading day on or after) or 1-based index");
    sub->add_option("--min-rows", o.data.min_rows, "Minimum usable price rows");
  };
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--bandwidth", o.params.h, "Bandwidth h");
    sub->add_option("--omega", o.params.omega, "Discount factor");
    sub->add_option("--selection", o.params.selection, "select.json to take (h, omega) from");
  };
  auto add_bands = [&](CLI::App* sub) {
    sub->add_option("--paths", o.bands.paths, "Null paths")->check(CLI::Range(100L, 10000000L));
    sub->add_option("--sigma", o.bands.sigma, "Null volatility (default: sd of returns up to t0)");
  };

  std::map<CLI::App*, std::function<int(Context&)>> commands;

  auto* select = app.add_subcommand("select", "Select bandwidth and discount factor");
  add_data(select);
  select->add_option("--criterion", o.select.criterion, "pit, pit-alt or likelihood")
    ->check(CLI::IsMember({ "pit", "pit-alt", "likelihood" }));
  select->add_flag("--constrained", o.select.constrained, "Restrict omega to (1 - 1/nu, 1]");
  select->add_flag("--static", o.select.static_framework, "Fixed density; select h only");
  select->add_option("--normalization", o.select.normalization, "as-printed or ecdf")
    ->check(CLI::IsMember({ "as-printed", "ecdf" }));
  select->add_option("--h-min", o.select.h_min, "Lower bandwidth bound");
  select->add_option("--h-max", o.select.h_max, "Upper bandwidth bound");
  select->add_option("--omega-min", o.select.omega_min, "Lower discount bound");
  select->add_option("--omega-max", o.select.omega_max, "Upper discount bound");
  commands[select] = cmd_select;

  auto* snapshot = app.add_subcommand("snapshot", "Density on a grid at chosen dates");
  add_data(snapshot);
  add_params(snapshot);
  snapshot->add_option("--dates", o.snapshot.dates, "Dates or indices (default: t0 and last)")
    ->delimiter(',');
  snapshot->add_option("--points", o.snapshot.points, "Grid points")->check(CLI::Range(2L, 1L << 20));
  commands[snapshot] = cmd_snapshot;

  auto* track = app.add_subcommand("track", "Divergence of each date's density against t0");
  add_data(track);
  add_params(track);
  add_bands(track);
  track->add_flag("--bands", o.track.bands, "Add null confidence bands");
  track->add_flag("--peak", o.track.peak, "Write the peak table");
  track->add_option("--early-date", o.track.early_date, "Extra date reported in the peak table");
  commands[track] = cmd_track;

  auto* bands = app.add_subcommand("bands", "Null confidence bands of the divergence series");
  add_data(bands);
  add_params(bands);
  add_bands(bands);
  commands[bands] = cmd_bands;

  auto* peak = app.add_subcommand("peak", "Peak date of each divergence series");
  add_data(peak);
  add_params(peak);
  peak->add_option("--early-date", o.track.early_date, "Extra date reported in the peak table");
  commands[peak] = cmd_peak;

  auto* simstudy = app.add_subcommand("simstudy", "Drifting Cauchy simulation study");
  simstudy->add_option("--seeds", o.sim.seeds, "Number of consecutive seeds")->check(CLI::PositiveNumber);
  simstudy->add_option("--n", o.sim.n, "Observations per path");
  simstudy->add_option("--t0", o.sim.t0, "Split point");
  simstudy->add_option("--drift", o.sim.drift, "Location slope per step");
  simstudy->add_option("--scale", o.sim.scale, "Cauchy scale");
  simstudy->add_option("--window-points", o.sim.window_points, "Grid points of the divergence window");
  commands[simstudy] = cmd_simstudy;

  auto* report = app.add_subcommand("report", "Combine selection reports");
  report->add_option("inputs", o.report.inputs, "select.json files")->required();
  commands[report] = cmd_report;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_data;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (!o.global.config.empty())
      apply_config(app, *active, o.global.config);
    if (!o.global.kernel.empty())
      (void)parse_kernel(o.global.kernel);

    ctx.run.command = active->get_name();
    ctx.run.seed = o.global.seed;
    collect(app, ctx.run.settings);
    collect(*active, ctx.run.settings);
    ctx.run.settings["kernel"] = std::string(
      to_string(ctx.kernel(active == simstudy ? KernelKind::Gaussian : KernelKind::Epanechnikov).kind));
    ctx.out_dir = o.global.out;
    return commands.at(active)(ctx);
  } catch (const SelectionError& e) {
    std::cerr << "selection failed: " << e.what() << '\n';
    return exit_selection;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return exit_invariant;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return exit_invariant;
  }
}
