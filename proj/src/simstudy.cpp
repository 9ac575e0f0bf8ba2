#include "tvkde/simstudy.hpp"

#include "tvkde/dynamic_density.hpp"
#include "tvkde/errors.hpp"
#include "tvkde/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tvkde {

namespace {

double
location(const CauchyStudyConfig& cfg, long t)
{
  return static_cast<double>(t) * cfg.drift_rate;
}

// Dynamic framework: estimate f_t recursively on one global grid with the
// window spacing and compare its window around the location of f_{t+1}.
MethodOutcome
track_dynamic(const CauchyStudyConfig& cfg,
              const std::vector<double>& path,
              const SelectionResult& sel,
              SelectionCriterion criterion,
              Eigen::VectorXd* final_pdf,
              Eigen::VectorXd* final_grid,
              Eigen::VectorXd* final_true)
{
  MethodOutcome out;
  out.criterion = criterion;
  out.h = sel.h_opt;
  out.omega = sel.omega_opt;
  out.criterion_value = sel.criterion_value;

  const double w = cfg.window_half_width;
  const double step = 2.0 * w / static_cast<double>(cfg.window_points - 1);
  const double lo = std::min(location(cfg, cfg.t0 + 1), location(cfg, cfg.n)) - w;
  const double hi = std::max(location(cfg, cfg.t0 + 1), location(cfg, cfg.n)) + w;
  const auto total = static_cast<Eigen::Index>(std::ceil((hi - lo) / step)) + 1;
  Eigen::VectorXd points =
    Eigen::VectorXd::LinSpaced(total, 0.0, static_cast<double>(total - 1)) * step;
  points.array() += lo;

  const std::span<const double> x(path);
  const DynamicDensity start(x.first(static_cast<std::size_t>(cfg.t0)), sel.h_opt,
                             sel.omega_opt, cfg.kernel);
  GriddedTrack track(start, EvalGrid(points));

  const long dates = cfg.n - cfg.t0;
  out.series.resize(dates, 4);
  for (long t = cfg.t0; t < cfg.n; ++t) {
    if (t > cfg.t0)
      track.update(path[static_cast<std::size_t>(t - 1)]);
    const double first = (location(cfg, t + 1) - w - lo) / step;
    const auto offset = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::lround(first)),
                                                 0, total - cfg.window_points);
    const auto estimate = track.current().segment(offset, cfg.window_points);
    const auto truth = true_density_on_grid(cfg, t + 1, estimate.grid());
    for (auto kind : all_divergence_kinds)
      out.series(t - cfg.t0, static_cast<Eigen::Index>(kind)) = divergence(kind, estimate, truth);
    if (t == cfg.n - 1 && final_pdf != nullptr) {
      *final_pdf = estimate.pdf();
      *final_grid = estimate.grid().points();
      *final_true = truth.pdf();
    }
  }
  for (auto kind : all_divergence_kinds) {
    const auto k = static_cast<std::size_t>(kind);
    out.mean_divergence[k] = out.series.col(static_cast<Eigen::Index>(k)).mean();
  }
  return out;
}

MethodOutcome
compare_static(const CauchyStudyConfig& cfg,
               const std::vector<double>& path,
               const SelectionResult& sel,
               SelectionCriterion criterion)
{
  MethodOutcome out;
  out.criterion = criterion;
  out.h = sel.h_opt;
  out.omega = 1.0;
  out.criterion_value = sel.criterion_value;
  const StaticDensity estimate(Eigen::Map<const Eigen::VectorXd>(path.data(), cfg.t0),
                               sel.h_opt, cfg.kernel);
  const auto grid = EvalGrid::linspace(-cfg.window_half_width, cfg.window_half_width,
                                       cfg.window_points);
  const auto fitted = evaluate_on_grid(estimate, grid);
  const auto truth = true_density_on_grid(cfg, 0, grid);
  for (auto kind : all_divergence_kinds)
    out.mean_divergence[static_cast<std::size_t>(kind)] = divergence(kind, fitted, truth);
  return out;
}

} // namespace

void
validate(const CauchyStudyConfig& cfg)
{
  if (cfg.t0 < 2 || cfg.n <= cfg.t0)
    throw ParameterError("Cauchy study needs n > t0 >= 2");
  if (!(cfg.scale > 0.0))
    throw ParameterError("Cauchy scale must be positive");
  if (!(cfg.window_half_width > 0.0) || cfg.window_points < 2)
    throw ParameterError("divergence window must be non-empty");
}

std::vector<double>
sample_cauchy_path(const CauchyStudyConfig& cfg, std::string_view stream)
{
  validate(cfg);
  auto gen = make_stream(cfg.seed, stream);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> path(static_cast<std::size_t>(cfg.n));
  for (long t = 1; t <= cfg.n; ++t)
    path[static_cast<std::size_t>(t - 1)] =
      location(cfg, t) + cfg.scale * std::tan(std::numbers::pi * (uniform(gen) - 0.5));
  return path;
}

GriddedDistribution
true_density_on_grid(const CauchyStudyConfig& cfg, long t, const EvalGrid& grid)
{
  if (t > cfg.n)
    throw ParameterError("time index beyond the simulated horizon");
  const auto z = ((grid.points().array() - location(cfg, t)) / cfg.scale).eval();
  Eigen::VectorXd pdf = (1.0 / (std::numbers::pi * cfg.scale * (1.0 + z.square()))).matrix();
  Eigen::VectorXd cdf = (0.5 + z.atan() / std::numbers::pi).matrix();
  return GriddedDistribution(grid, std::move(pdf), std::move(cdf));
}

DynamicComparison
run_dynamic_comparison(const CauchyStudyConfig& cfg)
{
  const auto path = sample_cauchy_path(cfg, "dynamic");
  auto problem = make_problem(path, cfg.t0, SelectionCriterion::PitDNu, false, cfg.nu, cfg.kernel);
  problem.search = cfg.search;
  const auto pit_sel = select(problem);
  problem.criterion = SelectionCriterion::Likelihood;
  const auto lik_sel = select(problem);

  DynamicComparison out;
  out.pit = track_dynamic(cfg, path, pit_sel, SelectionCriterion::PitDNu, &out.final_pit_pdf,
                          &out.final_grid, &out.final_true_pdf);
  out.likelihood = track_dynamic(cfg, path, lik_sel, SelectionCriterion::Likelihood,
                                 &out.final_likelihood_pdf, &out.final_grid, &out.final_true_pdf);
  return out;
}

StaticComparison
run_static_comparison(const CauchyStudyConfig& cfg)
{
  CauchyStudyConfig iid = cfg;
  iid.drift_rate = 0.0;
  const auto path = sample_cauchy_path(iid, "static");
  auto problem = make_problem(path, cfg.t0, SelectionCriterion::PitDNu, false, cfg.nu, cfg.kernel);
  problem.search = cfg.search;
  const auto pit_sel = select_static(problem);
  problem.criterion = SelectionCriterion::Likelihood;
  const auto lik_sel = select_static(problem);

  StaticComparison out;
  out.pit = compare_static(iid, path, pit_sel, SelectionCriterion::PitDNu);
  out.likelihood = compare_static(iid, path, lik_sel, SelectionCriterion::Likelihood);
  return out;
}

ComparisonReport
run_method_comparison(const CauchyStudyConfig& cfg)
{
  validate(cfg);
  return { cfg, run_dynamic_comparison(cfg), run_static_comparison(cfg) };
}

} // namespace tvkde
