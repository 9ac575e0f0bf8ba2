#include "cli.hpp"

#include "tvkde/divergence.hpp"
#include "tvkde/dynamic_density.hpp"
#include "tvkde/errors.hpp"
#include "tvkde/montecarlo_bands.hpp"
#include "tvkde/parallel.hpp"
#include "tvkde/simstudy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

namespace tvkde::cli {

using nlohmann::ordered_json;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct LoadedData
{
  PriceSeries prices;
  ReturnSeries returns;
  std::vector<double> x;
  long t0 = 0;
};

LoadedData
load(const Context& ctx)
{
  const auto& d = ctx.opt.data;
  CsvFormat format;
  format.date_column = d.date_column;
  format.close_column = d.close_column;
  format.min_rows = d.min_rows;
  LoadedData out;
  out.prices = load_prices(d.input, format);
  if (out.prices.dropped_rows > 0)
    std::cerr << "warning: dropped " << out.prices.dropped_rows
              << " rows with a missing or non-positive close\n";
  out.returns = to_returns(out.prices, parse_return_kind(d.returns));
  out.x.assign(out.returns.returns.begin(), out.returns.returns.end());
  out.t0 = resolve_t0(out.returns, parse_t0(d.t0));
  return out;
}

std::string
date_at(const LoadedData& data, long index)
{
  return format_date(data.returns.dates[static_cast<std::size_t>(index - 1)]);
}

std::ofstream
open_output(const Context& ctx, const std::string& name)
{
  std::filesystem::create_directories(ctx.out_dir);
  const auto path = ctx.out_dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw DataError("cannot write '" + path.string() + "'");
  return out;
}

void
write_json(const Context& ctx, const std::string& name, const ordered_json& doc)
{
  auto out = open_output(ctx, name);
  out << doc.dump(2) << '\n';
}

std::ofstream
open_csv(const Context& ctx, const std::string& name)
{
  auto out = open_output(ctx, name);
  write_csv_metadata(out, ctx.run);
  return out;
}

void
write_svg(const Context& ctx, const std::string& name, const std::vector<PlotPanel>& panels)
{
  auto out = open_output(ctx, name);
  out << render_svg(ctx.run, panels);
}

std::string_view
variant_name(SelectionCriterion c)
{
  switch (c) {
    case SelectionCriterion::PitDNu:
      return "d_nu";
    case SelectionCriterion::PitDNuAlt:
      return "D_nu";
    case SelectionCriterion::Likelihood:
      return "likelihood";
  }
  return "d_nu";
}

KsNormalization
parse_normalization(const std::string& name)
{
  if (name == "as-printed")
    return KsNormalization::AsPrinted;
  if (name == "ecdf")
    return KsNormalization::Ecdf;
  throw ParameterError("unknown normalization '" + name + "' (expected as-printed or ecdf)");
}

struct Params
{
  double h;
  double omega;
  std::string source;
};

// Explicit values first, then a selection report, otherwise a constrained
// PIT selection on the loaded data.
Params
resolve_params(const Context& ctx, const LoadedData& data)
{
  const auto& p = ctx.opt.params;
  if (!p.selection.empty()) {
    std::ifstream in(p.selection);
    if (!in)
      throw DataError("cannot open selection report '" + p.selection + "'");
    ordered_json doc;
    try {
      doc = ordered_json::parse(in);
      return { doc.at("h_opt").get<double>(), doc.at("omega_opt").get<double>(), p.selection };
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("malformed selection report '" + p.selection + "': " + e.what());
    }
  }
  if (p.h > 0.0)
    return { p.h, p.omega > 0.0 ? p.omega : 1.0, "flags" };
  auto problem = make_problem(data.x, data.t0, SelectionCriterion::PitDNu, true,
                              ctx.opt.global.nu, ctx.kernel());
  const auto result = select(problem);
  return { result.h_opt, result.omega_opt, "constrained pit selection" };
}

std::vector<DivergenceSeries>
compute_series(const Context& ctx, const LoadedData& data, const Params& params)
{
  return divergence_series(data.x, data.t0, params.h, params.omega, ctx.kernel(),
                           all_divergence_kinds);
}

double
sample_sd(std::span<const double> x)
{
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  return std::sqrt((v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1));
}

std::string
level_name(double p)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "q%g", 100.0 * p);
  return buf;
}

std::vector<ConfidenceBands>
compute_bands(const Context& ctx, const LoadedData& data, const Params& params)
{
  NullSimConfig cfg;
  cfg.n_paths = ctx.opt.bands.paths;
  cfg.path_length = static_cast<long>(data.x.size());
  cfg.t0 = data.t0;
  cfg.sigma = ctx.opt.bands.sigma > 0.0
                ? ctx.opt.bands.sigma
                : sample_sd(std::span<const double>(data.x).first(static_cast<std::size_t>(data.t0)));
  cfg.h = params.h;
  cfg.omega = params.omega;
  cfg.kernel = ctx.kernel();
  cfg.seed = ctx.opt.global.seed;
  for (double p : cfg.levels)
    if (static_cast<double>(cfg.n_paths) * (1.0 - p) < 10.0)
      std::cerr << "warning: the " << level_name(p) << " band rests on fewer than 10 paths above it; "
                << "its estimate is wide\n";
  return confidence_bands(cfg, all_divergence_kinds);
}

void
write_series_csv(const Context& ctx,
                 const LoadedData& data,
                 const std::vector<DivergenceSeries>& series)
{
  const auto rows = series.front().values.size();
  Eigen::MatrixXd table(rows, 1 + static_cast<Eigen::Index>(series.size()));
  std::vector<std::string> labels;
  for (Eigen::Index r = 0; r < rows; ++r) {
    table(r, 0) = static_cast<double>(data.t0 + r);
    labels.push_back(date_at(data, data.t0 + r));
  }
  std::vector<std::string> columns{ "date", "index" };
  for (std::size_t k = 0; k < series.size(); ++k) {
    table.col(static_cast<Eigen::Index>(k) + 1) = series[k].values;
    columns.emplace_back(to_string(series[k].kind));
  }
  auto out = open_csv(ctx, "track.csv");
  write_csv_table(out, columns, table, labels);
}

void
write_bands_csv(const Context& ctx, const LoadedData& data, const std::vector<ConfidenceBands>& bands)
{
  const auto rows = bands.front().curves.rows();
  const auto levels = static_cast<Eigen::Index>(bands.front().levels.size());
  Eigen::MatrixXd table(rows, 1 + levels * static_cast<Eigen::Index>(bands.size()));
  std::vector<std::string> labels;
  std::vector<std::string> columns{ "date", "index" };
  for (Eigen::Index r = 0; r < rows; ++r) {
    table(r, 0) = static_cast<double>(data.t0 + r);
    labels.push_back(date_at(data, data.t0 + r));
  }
  for (std::size_t k = 0; k < bands.size(); ++k)
    for (Eigen::Index l = 0; l < levels; ++l) {
      table.col(1 + static_cast<Eigen::Index>(k) * levels + l) = bands[k].curves.col(l);
      columns.push_back(std::string(to_string(bands[k].kind)) + "_" +
                        level_name(bands[k].levels[static_cast<std::size_t>(l)]));
    }
  auto out = open_csv(ctx, "bands.csv");
  write_csv_table(out, columns, table, labels);
}

Eigen::VectorXd
index_axis(long first, Eigen::Index count)
{
  return Eigen::VectorXd::LinSpaced(count, static_cast<double>(first),
                                    static_cast<double>(first + count - 1));
}

std::vector<PlotPanel>
divergence_panels(const LoadedData& data,
                  const std::vector<DivergenceSeries>& series,
                  const std::vector<ConfidenceBands>* bands)
{
  std::vector<PlotPanel> panels;
  for (std::size_t k = 0; k < series.size(); ++k) {
    PlotPanel panel;
    panel.title = std::string(to_string(series[k].kind)) + " vs " + date_at(data, data.t0);
    panel.x_label = "trading day index";
    panel.y_label = std::string(to_string(series[k].kind));
    const auto x = index_axis(data.t0, series[k].values.size());
    panel.series.push_back({ std::string(to_string(series[k].kind)), x, series[k].values, false });
    if (bands != nullptr) {
      const auto& b = (*bands)[k];
      for (std::size_t l = 0; l < b.levels.size(); ++l)
        panel.series.push_back(
          { level_name(b.levels[l]), x, b.curves.col(static_cast<Eigen::Index>(l)), true });
    }
    panels.push_back(std::move(panel));
  }
  return panels;
}

// Value at a named early date, at the peak, the peak date and the value at
// the last date, per divergence.
ordered_json
peak_table(const Context& ctx,
           const LoadedData& data,
           const std::vector<DivergenceSeries>& series)
{
  const long early = resolve_t0(data.returns, parse_t0(ctx.opt.track.early_date));
  ordered_json rows = ordered_json::array();
  for (const auto& s : series) {
    const auto peak = peak_date(s);
    const double early_value = early >= data.t0 ? s.values[early - data.t0] : nan;
    rows.push_back({ { "divergence", to_string(s.kind) },
                     { "early_date", date_at(data, early) },
                     { "early_value", early_value },
                     { "peak_value", peak.value },
                     { "peak_date", date_at(data, peak.time_index) },
                     { "peak_index", peak.time_index },
                     { "last_date", date_at(data, static_cast<long>(data.x.size())) },
                     { "last_value", s.values[s.values.size() - 1] } });
  }
  return rows;
}

void
write_peak_csv(const Context& ctx, const ordered_json& rows)
{
  auto out = open_csv(ctx, "peak.csv");
  out << "divergence,early_date,early_value,peak_value,peak_date,last_date,last_value\n";
  for (const auto& r : rows) {
    out << r["divergence"].get<std::string>() << ',' << r["early_date"].get<std::string>() << ','
        << format_number(r["early_value"].is_null() ? nan : r["early_value"].get<double>()) << ','
        << format_number(r["peak_value"].get<double>()) << ','
        << r["peak_date"].get<std::string>() << ',' << r["last_date"].get<std::string>() << ','
        << format_number(r["last_value"].get<double>()) << '\n';
  }
}

ordered_json
params_json(const Params& p)
{
  return { { "h", p.h }, { "omega", p.omega }, { "source", p.source } };
}

ordered_json
outcome_json(const MethodOutcome& m)
{
  ordered_json div;
  for (auto kind : all_divergence_kinds)
    div[std::string(to_string(kind))] = m.mean_divergence[static_cast<std::size_t>(kind)];
  return { { "criterion", to_string(m.criterion) },
           { "h", m.h },
           { "omega", m.omega },
           { "criterion_value", m.criterion_value },
           { "mean_divergence", div } };
}

bool
beats_on_all(const MethodOutcome& a, const MethodOutcome& b)
{
  for (std::size_t k = 0; k < 4; ++k)
    if (!(a.mean_divergence[k] < b.mean_divergence[k]))
      return false;
  return true;
}

} // namespace

KernelSpec
Context::kernel(KernelKind fallback) const
{
  if (opt.global.kernel.empty())
    return KernelSpec{ fallback };
  return KernelSpec{ parse_kernel(opt.global.kernel) };
}

ordered_json
metadata_json(const RunConfig& run)
{
  ordered_json cfg(run.settings);
  return { { "tool", "tvkde" },
           { "version", tool_version() },
           { "command", run.command },
           { "config_hash", run.hash() },
           { "seed", run.seed },
           { "config", cfg } };
}

int
cmd_select(Context& ctx)
{
  const auto data = load(ctx);
  const auto& so = ctx.opt.select;
  auto problem = make_problem(data.x, data.t0, parse_criterion(so.criterion), so.constrained,
                              ctx.opt.global.nu, ctx.kernel());
  problem.normalization = parse_normalization(so.normalization);
  if (so.h_min > 0.0)
    problem.h_bounds.lower = so.h_min;
  if (so.h_max > 0.0)
    problem.h_bounds.upper = so.h_max;
  if (so.omega_min > 0.0)
    problem.omega_bounds.lower = so.omega_min;
  if (so.omega_max > 0.0)
    problem.omega_bounds.upper = so.omega_max;
  const auto result = so.static_framework ? select_static(problem) : select(problem);

  ordered_json doc;
  doc["metadata"] = metadata_json(ctx.run);
  doc["input"] = ctx.opt.data.input;
  doc["t0"] = data.t0;
  doc["t0_date"] = date_at(data, data.t0);
  doc["T"] = data.x.size();
  doc["criterion"] = to_string(problem.criterion);
  doc["variant"] = variant_name(problem.criterion);
  doc["constrained"] = problem.constrained;
  doc["static"] = result.static_framework;
  doc["nu"] = problem.nu;
  doc["kernel"] = to_string(problem.kernel.kind);
  doc["normalization"] = so.normalization;
  doc["h_bounds"] = { problem.h_bounds.lower, problem.h_bounds.upper };
  doc["omega_bounds"] = { problem.omega_bounds.lower, problem.omega_bounds.upper };
  doc["h_opt"] = result.h_opt;
  doc["omega_opt"] = result.omega_opt;
  doc["criterion_value"] = result.criterion_value;
  doc["evaluations"] = result.evaluations;
  write_json(ctx, "select.json", doc);

  Eigen::MatrixXd trace(static_cast<Eigen::Index>(result.search_trace.size()), 3);
  for (std::size_t i = 0; i < result.search_trace.size(); ++i) {
    const auto& tp = result.search_trace[i];
    trace.row(static_cast<Eigen::Index>(i)) << tp.h, tp.omega, tp.value;
  }
  auto out = open_csv(ctx, "select_trace.csv");
  write_csv_table(out, { "h", "omega", "value" }, trace);

  const std::span<const double> x(data.x);
  const auto pits = result.static_framework
                      ? compute_static_pits(x, data.t0, result.h_opt, problem.kernel)
                      : compute_pits(x, data.t0, result.h_opt, result.omega_opt, problem.kernel);
  Eigen::MatrixXd pit_table(pits.size(), 2);
  std::vector<std::string> pit_dates;
  for (Eigen::Index i = 0; i < pits.size(); ++i) {
    pit_table(i, 0) = static_cast<double>(data.t0 + 1 + i);
    pit_table(i, 1) = pits.values[i];
    pit_dates.push_back(date_at(data, data.t0 + 1 + i));
  }
  auto pit_out = open_csv(ctx, "select_pits.csv");
  write_csv_table(pit_out, { "date", "index", "z" }, pit_table, pit_dates);

  std::cout << "h_opt=" << format_number(result.h_opt)
            << " omega_opt=" << format_number(result.omega_opt)
            << " value=" << format_number(result.criterion_value) << '\n';
  return 0;
}

int
cmd_snapshot(Context& ctx)
{
  const auto data = load(ctx);
  const auto params = resolve_params(ctx, data);
  const auto T = static_cast<long>(data.x.size());

  std::vector<long> indices;
  if (ctx.opt.snapshot.dates.empty()) {
    indices = { data.t0, T };
  } else {
    for (const auto& d : ctx.opt.snapshot.dates)
      indices.push_back(resolve_t0(data.returns, parse_t0(d)));
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  if (indices.front() < data.t0)
    throw ParameterError("snapshot dates must not precede t0 (" + date_at(data, data.t0) + ")");

  const Eigen::Map<const Eigen::VectorXd> all(data.x.data(), T);
  const auto grid = default_grid(all, params.h, ctx.opt.snapshot.points);
  const std::span<const double> x(data.x);
  DynamicDensity density(x.first(static_cast<std::size_t>(data.t0)), params.h, params.omega,
                         ctx.kernel());
  const auto dates = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd table(grid.size(), 1 + 2 * dates);
  table.col(0) = grid.points();
  std::vector<std::string> columns{ "x" };
  ordered_json snaps = ordered_json::array();
  PlotPanel panel{ "density snapshots", "return", "density", {} };
  long t = data.t0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    for (; t < indices[k]; ++t)
      density.update(data.x[static_cast<std::size_t>(t)]);
    const auto g = evaluate_on_grid(density, grid);
    table.col(static_cast<Eigen::Index>(k) + 1) = g.pdf();
    table.col(static_cast<Eigen::Index>(k) + 1 + dates) = g.cdf();
    snaps.push_back({ { "date", date_at(data, indices[k]) },
                      { "t", indices[k] },
                      { "pdf", std::vector<double>(g.pdf().begin(), g.pdf().end()) },
                      { "cdf", std::vector<double>(g.cdf().begin(), g.cdf().end()) } });
    panel.series.push_back({ date_at(data, indices[k]), grid.points(), g.pdf(), false });
  }
  for (auto t_k : indices)
    columns.push_back("pdf_" + date_at(data, t_k));
  for (auto t_k : indices)
    columns.push_back("cdf_" + date_at(data, t_k));
  auto out = open_csv(ctx, "snapshot.csv");
  write_csv_table(out, columns, table);
  write_svg(ctx, "snapshot.svg", { panel });

  ordered_json doc;
  doc["metadata"] = metadata_json(ctx.run);
  doc["h"] = params.h;
  doc["omega"] = params.omega;
  doc["kernel"] = to_string(ctx.kernel().kind);
  doc["grid"] = std::vector<double>(grid.points().begin(), grid.points().end());
  doc["snapshots"] = snaps;
  write_json(ctx, "snapshot.json", doc);
  return 0;
}

int
cmd_track(Context& ctx)
{
  const auto data = load(ctx);
  const auto params = resolve_params(ctx, data);
  const auto series = compute_series(ctx, data, params);
  write_series_csv(ctx, data, series);

  std::vector<ConfidenceBands> bands;
  if (ctx.opt.track.bands) {
    bands = compute_bands(ctx, data, params);
    write_bands_csv(ctx, data, bands);
  }
  write_svg(ctx, "track.svg", divergence_panels(data, series, bands.empty() ? nullptr : &bands));

  if (ctx.opt.track.peak) {
    const auto rows = peak_table(ctx, data, series);
    write_peak_csv(ctx, rows);
  }
  std::cout << "tracked " << series.front().values.size() << " dates from "
            << date_at(data, data.t0) << " with h=" << format_number(params.h)
            << " omega=" << format_number(params.omega) << '\n';
  return 0;
}

int
cmd_bands(Context& ctx)
{
  const auto data = load(ctx);
  const auto params = resolve_params(ctx, data);
  const auto bands = compute_bands(ctx, data, params);
  write_bands_csv(ctx, data, bands);
  std::vector<PlotPanel> panels;
  for (const auto& b : bands) {
    PlotPanel panel{ std::string(to_string(b.kind)) + " null bands", "trading day index",
                     std::string(to_string(b.kind)), {} };
    const auto x = index_axis(data.t0, b.curves.rows());
    for (std::size_t l = 0; l < b.levels.size(); ++l)
      panel.series.push_back(
        { level_name(b.levels[l]), x, b.curves.col(static_cast<Eigen::Index>(l)), true });
    panels.push_back(std::move(panel));
  }
  write_svg(ctx, "bands.svg", panels);
  return 0;
}

int
cmd_peak(Context& ctx)
{
  const auto data = load(ctx);
  const auto params = resolve_params(ctx, data);
  const auto series = compute_series(ctx, data, params);
  const auto rows = peak_table(ctx, data, series);
  write_peak_csv(ctx, rows);
  ordered_json doc;
  doc["metadata"] = metadata_json(ctx.run);
  doc["reference_date"] = date_at(data, data.t0);
  doc["parameters"] = params_json(params);
  doc["peaks"] = rows;
  write_json(ctx, "peak.json", doc);
  for (const auto& r : rows)
    std::cout << r["divergence"].get<std::string>() << " peak " << r["peak_date"].get<std::string>()
              << '\n';
  return 0;
}

int
cmd_simstudy(Context& ctx)
{
  const auto& so = ctx.opt.sim;
  if (so.seeds < 1)
    throw ParameterError("--seeds must be at least 1");
  std::vector<CauchyStudyConfig> configs(static_cast<std::size_t>(so.seeds));
  for (int i = 0; i < so.seeds; ++i) {
    auto& c = configs[static_cast<std::size_t>(i)];
    c.n = so.n;
    c.t0 = so.t0;
    c.drift_rate = so.drift;
    c.scale = so.scale;
    c.window_points = so.window_points;
    c.seed = ctx.opt.global.seed + static_cast<std::uint64_t>(i);
    c.kernel = ctx.kernel(KernelKind::Gaussian);
    c.nu = ctx.opt.global.nu;
    validate(c);
  }
  std::vector<ComparisonReport> reports(configs.size());
  parallel_for(so.seeds, [&](long i) {
    reports[static_cast<std::size_t>(i)] = run_method_comparison(configs[static_cast<std::size_t>(i)]);
  });

  ordered_json doc;
  doc["metadata"] = metadata_json(ctx.run);
  ordered_json per_seed = ordered_json::array();
  int order_params = 0, order_ks = 0, order_static = 0;
  for (const auto& r : reports) {
    const auto& d = r.dynamic_study;
    const auto& s = r.static_study;
    const bool params_ok = d.pit.h < d.likelihood.h && d.pit.omega < d.likelihood.omega;
    const bool ks_ok = d.pit.mean_divergence[0] < d.likelihood.mean_divergence[0];
    const bool static_ok = beats_on_all(s.pit, s.likelihood);
    order_params += params_ok;
    order_ks += ks_ok;
    order_static += static_ok;
    per_seed.push_back({ { "seed", r.config.seed },
                         { "dynamic", { { "pit", outcome_json(d.pit) },
                                        { "likelihood", outcome_json(d.likelihood) } } },
                         { "static", { { "pit", outcome_json(s.pit) },
                                       { "likelihood", outcome_json(s.likelihood) } } },
                         { "pit_smaller_parameters", params_ok },
                         { "pit_better_ks", ks_ok },
                         { "static_pit_better_all", static_ok } });
  }
  doc["kernel"] = to_string(configs.front().kernel.kind);
  doc["seeds"] = per_seed;
  doc["summary"] = { { "seeds", so.seeds },
                     { "pit_smaller_parameters", order_params },
                     { "pit_better_ks", order_ks },
                     { "static_pit_better_all", order_static } };
  write_json(ctx, "simstudy.json", doc);

  {
    auto out = open_csv(ctx, "simstudy_series.csv");
    out << "seed,t,method,ks,hellinger,wasserstein,kl\n";
    for (const auto& r : reports) {
      for (const auto* m : { &r.dynamic_study.pit, &r.dynamic_study.likelihood }) {
        for (Eigen::Index k = 0; k < m->series.rows(); ++k) {
          out << r.config.seed << ',' << r.config.t0 + k << ',' << to_string(m->criterion);
          for (Eigen::Index c = 0; c < m->series.cols(); ++c)
            out << ',' << format_number(m->series(k, c));
          out << '\n';
        }
      }
    }
  }

  const auto& first = reports.front();
  const auto& d = first.dynamic_study;
  const double loc = static_cast<double>(first.config.n) * first.config.drift_rate;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < d.final_grid.size(); ++i)
    if (std::abs(d.final_grid[i] - loc) <= 10.0 * first.config.scale)
      keep.push_back(i);
  auto pick = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i)
      out[static_cast<Eigen::Index>(i)] = v[keep[i]];
    return out;
  };
  const auto xs = pick(d.final_grid);
  write_svg(ctx, "simstudy_density.svg",
            { PlotPanel{ "final-date densities, seed " + std::to_string(first.config.seed),
                         "x", "density",
                         { { "true", xs, pick(d.final_true_pdf), false },
                           { "pit", xs, pick(d.final_pit_pdf), false },
                           { "likelihood", xs, pick(d.final_likelihood_pdf), false } } } });

  std::vector<PlotPanel> panels;
  const auto t_axis = index_axis(first.config.t0, d.pit.series.rows());
  for (auto kind : all_divergence_kinds) {
    const auto c = static_cast<Eigen::Index>(kind);
    panels.push_back({ std::string(to_string(kind)) + " vs truth", "t", std::string(to_string(kind)),
                       { { "pit", t_axis, d.pit.series.col(c), false },
                         { "likelihood", t_axis, d.likelihood.series.col(c), false } } });
  }
  write_svg(ctx, "simstudy_divergence.svg", panels);

  std::cout << "seeds=" << so.seeds << " pit_smaller_parameters=" << order_params
            << " pit_better_ks=" << order_ks << " static_pit_better_all=" << order_static << '\n';
  return 0;
}

int
cmd_report(Context& ctx)
{
  const auto& inputs = ctx.opt.report.inputs;
  if (inputs.empty())
    throw DataError("report needs at least one selection report");
  ordered_json sources = ordered_json::array();
  std::vector<IndexSelection> constrained;
  std::vector<IndexSelection> all;
  for (const auto& file : inputs) {
    std::ifstream in(file);
    if (!in)
      throw DataError("cannot open selection report '" + file + "'");
    ordered_json doc;
    try {
      doc = ordered_json::parse(in);
      const std::string name = std::filesystem::path(doc.at("input").get<std::string>()).stem().string();
      const IndexSelection sel{ name, doc.at("h_opt").get<double>(), doc.at("omega_opt").get<double>() };
      all.push_back(sel);
      if (doc.at("constrained").get<bool>())
        constrained.push_back(sel);
      sources.push_back({ { "file", file },
                          { "name", name },
                          { "criterion", doc.at("criterion") },
                          { "constrained", doc.at("constrained") },
                          { "h_opt", sel.h },
                          { "omega_opt", sel.omega },
                          { "criterion_value", doc.at("criterion_value") },
                          { "run_config", doc.at("metadata") } });
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("malformed selection report '" + file + "': " + e.what());
    }
  }
  const bool constrained_only = !constrained.empty();
  const auto pair = common_pair(constrained_only ? constrained : all);

  ordered_json doc;
  doc["metadata"] = metadata_json(ctx.run);
  doc["sources"] = sources;
  doc["common_pair"] = { { "h", pair.h },
                         { "omega", pair.omega },
                         { "h_source", pair.h_source },
                         { "omega_source", pair.omega_source },
                         { "constrained_only", constrained_only } };
  write_json(ctx, "report.json", doc);

  auto out = open_csv(ctx, "report.csv");
  out << "name,criterion,constrained,h_opt,omega_opt,criterion_value\n";
  for (const auto& s : sources)
    out << s["name"].get<std::string>() << ',' << s["criterion"].get<std::string>() << ','
        << (s["constrained"].get<bool>() ? "true" : "false") << ','
        << format_number(s["h_opt"].get<double>()) << ','
        << format_number(s["omega_opt"].get<double>()) << ','
        << format_number(s["criterion_value"].is_number() ? s["criterion_value"].get<double>() : nan)
        << '\n';
  out << "common,," << (constrained_only ? "true" : "false") << ',' << format_number(pair.h)
      << ',' << format_number(pair.omega) << ",\n";
  std::cout << "common pair h=" << format_number(pair.h) << " (" << pair.h_source
            << ") omega=" << format_number(pair.omega) << " (" << pair.omega_source << ")\n";
  return 0;
}

} // namespace tvkde::cli
