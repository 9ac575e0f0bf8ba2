#include "tvkde/divergence.hpp"

#include <string>

namespace tvkde {

std::string_view
to_string(DivergenceKind kind)
{
  switch (kind) {
    case DivergenceKind::KS:
      return "ks";
    case DivergenceKind::Hellinger:
      return "hellinger";
    case DivergenceKind::Wasserstein1:
      return "wasserstein";
    case DivergenceKind::KL:
      return "kl";
  }
  return "ks";
}

DivergenceKind
parse_divergence(std::string_view name)
{
  for (auto kind : all_divergence_kinds)
    if (to_string(kind) == name)
      return kind;
  throw ParameterError("unknown divergence '" + std::string(name) +
                       "' (expected ks, hellinger, wasserstein or kl)");
}

EvalGrid
series_grid(std::span<const double> returns, double h, const DivergenceSeriesOptions& options)
{
  if (returns.empty())
    throw InsufficientDataError("series grid needs observations");
  const Eigen::Map<const Eigen::VectorXd> x(returns.data(),
                                            static_cast<Eigen::Index>(returns.size()));
  const double lo = x.minCoeff() - 5.0 * h;
  const double hi = x.maxCoeff() + 5.0 * h;
  Eigen::Index points = options.grid_points;
  if (options.refine_for_bandwidth) {
    constexpr Eigen::Index cap = Eigen::Index{ 1 } << 20;
    while ((hi - lo) / static_cast<double>(points - 1) > 0.25 * h && points < cap)
      points *= 2;
  }
  return EvalGrid::linspace(lo, hi, points);
}

std::vector<DivergenceSeries>
divergence_series(std::span<const double> returns,
                  long t0,
                  double h,
                  double omega,
                  const KernelSpec& kernel,
                  std::span<const DivergenceKind> kinds,
                  const DivergenceSeriesOptions& options)
{
  const auto T = static_cast<long>(returns.size());
  if (t0 < 2 || T < t0)
    throw InsufficientDataError("divergence series needs 2 <= t0 <= T");
  const DynamicDensity start(returns.first(static_cast<std::size_t>(t0)), h, omega, kernel);
  GriddedTrack track(start, series_grid(returns, h, options));
  const GriddedDistribution reference = track.current();

  std::vector<DivergenceSeries> out;
  for (auto kind : kinds)
    out.push_back({ kind, t0, Eigen::VectorXd::Zero(T - t0 + 1) });

  for (long t = t0 + 1; t <= T; ++t) {
    track.update(returns[static_cast<std::size_t>(t - 1)]);
    for (auto& series : out)
      series.values[t - t0] = divergence(series.kind, track.current(), reference);
  }
  return out;
}

Peak
peak_date(const DivergenceSeries& series)
{
  if (series.values.size() == 0)
    throw DataError("peak of an empty series");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < series.values.size(); ++i)
    if (series.values[i] > series.values[best])
      best = i;
  return { best, series.reference_index + static_cast<long>(best), series.values[best] };
}

} // namespace tvkde
