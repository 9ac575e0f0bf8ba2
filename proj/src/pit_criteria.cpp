#include "tvkde/pit_criteria.hpp"

#include "tvkde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace tvkde {

namespace {

double
divisor(Eigen::Index terms, KsNormalization normalization)
{
  return static_cast<double>(normalization == KsNormalization::AsPrinted ? terms + 1
                                                                         : terms);
}

// k on an already sorted sample: every member of a run of equal values
// shares the count of values <= it.
double
ks_sorted(const double* sorted, Eigen::Index n, double denom)
{
  double worst = 0.0;
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i])
      ++j;
    const double count = static_cast<double>(j + 1);
    worst = std::max(worst, std::abs(sorted[i] - count / denom));
    i = j + 1;
  }
  return worst;
}

class Fenwick
{
public:
  explicit Fenwick(std::size_t n)
    : tree_(n + 1, 0)
  {
  }

  void add(std::size_t pos)
  {
    for (++pos; pos < tree_.size(); pos += pos & (~pos + 1))
      ++tree_[pos];
  }

  // Number of inserted ranks <= pos.
  long prefix(std::size_t pos) const
  {
    long total = 0;
    for (++pos; pos > 0; pos -= pos & (~pos + 1))
      total += tree_[pos];
    return total;
  }

private:
  std::vector<long> tree_;
};

} // namespace

PitSeries::PitSeries(Eigen::VectorXd z, long first_index_minus_one, long last_index)
  : values(std::move(z))
  , t0(first_index_minus_one)
  , T(last_index)
{
  if (values.size() < 1 || T - t0 != values.size())
    throw DataError("PIT series length must equal T - t0 >= 1");
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0))
      throw InvariantError("PIT values must lie in [0, 1]");
}

PitSeries
compute_pits(std::span<const double> returns,
             long t0,
             double h,
             double omega,
             const KernelSpec& kernel,
             DensityOptions options)
{
  const auto T = static_cast<long>(returns.size());
  if (t0 < 2)
    throw InsufficientDataError("t0 must be at least 2");
  if (T <= t0)
    throw InsufficientDataError("need observations after t0 to compute PITs");
  DynamicDensity density(returns.first(static_cast<std::size_t>(t0)), h, omega, kernel, options);
  Eigen::VectorXd z(T - t0);
  for (long t = t0; t < T; ++t) {
    const double x = returns[static_cast<std::size_t>(t)];
    z[t - t0] = std::clamp(density.cdf(x), 0.0, 1.0);
    density.update(x);
  }
  return PitSeries(std::move(z), t0, T);
}

PitSeries
compute_static_pits(std::span<const double> returns,
                    long t0,
                    double h,
                    const KernelSpec& kernel)
{
  const auto T = static_cast<long>(returns.size());
  if (t0 < 1)
    throw InsufficientDataError("t0 must be at least 1");
  if (T <= t0)
    throw InsufficientDataError("need observations after t0 to compute PITs");
  const StaticDensity density(
    Eigen::Map<const Eigen::VectorXd>(returns.data(), t0), h, kernel);
  Eigen::VectorXd z(T - t0);
  for (long t = t0; t < T; ++t)
    z[t - t0] =
      std::clamp(static_pdf_cdf(density, returns[static_cast<std::size_t>(t)]).second, 0.0, 1.0);
  return PitSeries(std::move(z), t0, T);
}

double
ks_uniform(const Eigen::Ref<const Eigen::VectorXd>& z, KsNormalization normalization)
{
  if (z.size() == 0)
    throw DataError("uniformity statistic of an empty series");
  std::vector<double> sorted(z.data(), z.data() + z.size());
  std::sort(sorted.begin(), sorted.end());
  return ks_sorted(sorted.data(), z.size(), divisor(z.size(), normalization));
}

double
ks_lagged(const Eigen::Ref<const Eigen::VectorXd>& z, int tau, KsNormalization normalization)
{
  if (tau < 1)
    throw DomainError("lag must be at least 1");
  if (z.size() <= tau)
    throw DomainError("series must be longer than the lag");
  const Eigen::Index m = z.size() - tau;
  const double denom = divisor(m, normalization);
  const auto first = z.head(m);
  const auto second = z.segment(tau, m);

  // Compress the second coordinate to ranks of its distinct values.
  std::vector<double> levels(second.data(), second.data() + m);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<std::size_t> rank(static_cast<std::size_t>(m));
  for (Eigen::Index s = 0; s < m; ++s)
    rank[s] = static_cast<std::size_t>(
      std::lower_bound(levels.begin(), levels.end(), second[s]) - levels.begin());

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{ 0 });
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return first[a] < first[b];
  });

  // Sweep in increasing first coordinate; a run of ties is inserted before
  // any of its members is queried so that "<=" holds on both axes.
  Fenwick tree(levels.size());
  double worst = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && first[order[j + 1]] == first[order[i]])
      ++j;
    for (std::size_t k = i; k <= j; ++k)
      tree.add(rank[order[k]]);
    for (std::size_t k = i; k <= j; ++k) {
      const Eigen::Index s = order[k];
      const double count = static_cast<double>(tree.prefix(rank[s]));
      worst = std::max(worst, std::abs(first[s] * second[s] - count / denom));
    }
    i = j + 1;
  }
  return worst;
}

double
d_nu(const Eigen::Ref<const Eigen::VectorXd>& z, const CriterionConfig& cfg)
{
  if (cfg.nu < 0)
    throw DomainError("nu must be non-negative");
  if (cfg.nu >= z.size())
    throw DomainError("nu must be smaller than the PIT series length");
  const Eigen::Index n = z.size();
  double worst = std::sqrt(static_cast<double>(n)) * ks_uniform(z, cfg.normalization);
  for (int tau = 1; tau <= cfg.nu; ++tau)
    worst = std::max(worst,
                     std::sqrt(static_cast<double>(n - tau)) *
                       ks_lagged(z, tau, cfg.normalization));
  return worst;
}

double
d_nu_alt(const Eigen::Ref<const Eigen::VectorXd>& z, const CriterionConfig& cfg)
{
  const Eigen::Index n = z.size();
  if (n == 0)
    throw DataError("criterion of an empty series");
  if (cfg.nu > n)
    throw DomainError("nu must not exceed the PIT series length");
  const Eigen::Index min_len = std::max<Eigen::Index>(cfg.nu, 1);

  // For each start, grow the window one point at a time and keep it sorted.
  double worst = 0.0;
  std::vector<double> window;
  window.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index s = 0; s + min_len <= n; ++s) {
    window.clear();
    for (Eigen::Index t = s; t < n; ++t) {
      window.insert(std::upper_bound(window.begin(), window.end(), z[t]), z[t]);
      const auto len = static_cast<Eigen::Index>(window.size());
      if (len < min_len)
        continue;
      const double k = ks_sorted(window.data(), len, divisor(len, cfg.normalization));
      worst = std::max(worst, std::sqrt(static_cast<double>(len)) * k);
    }
  }
  return worst;
}

double
pit_criterion(const PitSeries& pits, const CriterionConfig& cfg)
{
  return cfg.variant == CriterionVariant::DNu ? d_nu(pits, cfg) : d_nu_alt(pits, cfg);
}

} // namespace tvkde
