#include "tvkde/montecarlo_bands.hpp"

#include "tvkde/errors.hpp"
#include "tvkde/parallel.hpp"
#include "tvkde/random.hpp"

#include <algorithm>
#include <cmath>

namespace tvkde {

void
validate(const NullSimConfig& cfg)
{
  if (cfg.n_paths < 100)
    throw ParameterError("null simulation needs at least 100 paths");
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma))
    throw ParameterError("null volatility must be positive");
  if (cfg.t0 < 2 || cfg.path_length < cfg.t0)
    throw ParameterError("null paths need 2 <= t0 <= path length");
  for (double p : cfg.levels)
    if (!(p > 0.0 && p < 1.0))
      throw ParameterError("confidence levels must lie in (0, 1)");
}

Eigen::VectorXd
simulate_null_path(const NullSimConfig& cfg, long index)
{
  auto gen = make_stream(cfg.seed, "null-path", static_cast<std::uint64_t>(index));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd path(cfg.path_length);
  for (auto& x : path)
    x = cfg.sigma * normal(gen);
  return path;
}

PathMatrix
simulate_null_paths(const NullSimConfig& cfg)
{
  validate(cfg);
  PathMatrix paths(cfg.n_paths, cfg.path_length);
  parallel_for(cfg.n_paths, [&](long i) { paths.row(i) = simulate_null_path(cfg, i).transpose(); });
  return paths;
}

double
upper_quantile(std::span<double> values, double p)
{
  if (values.empty())
    throw DataError("quantile of an empty sample");
  const auto n = static_cast<double>(values.size());
  // The small offset keeps products such as 0.95 * 1000 on their integer.
  auto rank = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   values.end());
  return values[rank - 1];
}

std::vector<Eigen::MatrixXd>
null_divergence_samples(const NullSimConfig& cfg,
                        std::span<const DivergenceKind> kinds,
                        long first_path)
{
  validate(cfg);
  const long dates = cfg.path_length - cfg.t0 + 1;
  std::vector<Eigen::MatrixXd> samples(kinds.size(), Eigen::MatrixXd(cfg.n_paths, dates));
  parallel_for(cfg.n_paths, [&](long i) {
    const Eigen::VectorXd path = simulate_null_path(cfg, first_path + i);
    const auto series = divergence_series(std::span<const double>(path.data(), path.size()),
                                          cfg.t0, cfg.h, cfg.omega, cfg.kernel, kinds,
                                          cfg.grid);
    for (std::size_t k = 0; k < kinds.size(); ++k)
      samples[k].row(i) = series[k].values.transpose();
  });
  return samples;
}

std::vector<ConfidenceBands>
confidence_bands(const NullSimConfig& cfg, std::span<const DivergenceKind> kinds)
{
  const auto samples = null_divergence_samples(cfg, kinds);
  std::vector<ConfidenceBands> out;
  const long dates = cfg.path_length - cfg.t0 + 1;
  std::vector<double> column(static_cast<std::size_t>(cfg.n_paths));
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    ConfidenceBands bands{ kinds[k], cfg.t0, cfg.levels,
                           Eigen::MatrixXd(dates, static_cast<Eigen::Index>(cfg.levels.size())) };
    for (long d = 0; d < dates; ++d) {
      for (std::size_t l = 0; l < cfg.levels.size(); ++l) {
        Eigen::Map<Eigen::VectorXd>(column.data(), cfg.n_paths) = samples[k].col(d);
        bands.curves(d, static_cast<Eigen::Index>(l)) = upper_quantile(column, cfg.levels[l]);
      }
    }
    out.push_back(std::move(bands));
  }
  return out;
}

} // namespace tvkde
