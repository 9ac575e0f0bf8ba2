#pragma once

#include "tvkde/dynamic_density.hpp"
#include "tvkde/errors.hpp"
#include "tvkde/gridded.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <string_view>
#include <vector>

namespace tvkde {

enum class DivergenceKind
{
  KS,
  Hellinger,
  Wasserstein1,
  KL
};

inline constexpr DivergenceKind all_divergence_kinds[] = {
  DivergenceKind::KS, DivergenceKind::Hellinger, DivergenceKind::Wasserstein1,
  DivergenceKind::KL
};

std::string_view
to_string(DivergenceKind kind);

DivergenceKind
parse_divergence(std::string_view name);

namespace detail {

template <std::floating_point Scalar>
void
require_same_grid(const BasicGriddedDistribution<Scalar>& a,
                  const BasicGriddedDistribution<Scalar>& b)
{
  if (!(a.grid() == b.grid()))
    throw GridError("divergences need both distributions on the same grid");
}

} // namespace detail

//! sup |F_a - F_b| over the grid.
template <std::floating_point Scalar>
Scalar
ks_distance(const BasicGriddedDistribution<Scalar>& a,
            const BasicGriddedDistribution<Scalar>& b)
{
  detail::require_same_grid(a, b);
  return (a.cdf() - b.cdf()).cwiseAbs().maxCoeff();
}

//! sqrt(1/2 int (sqrt f_a - sqrt f_b)^2), trapezoid rule.
template <std::floating_point Scalar>
Scalar
hellinger(const BasicGriddedDistribution<Scalar>& a,
          const BasicGriddedDistribution<Scalar>& b)
{
  detail::require_same_grid(a, b);
  const auto diff = (a.pdf().array().sqrt() - b.pdf().array().sqrt()).square().matrix().eval();
  return std::sqrt(std::max(Scalar(0), Scalar(0.5) * trapezoid(a.grid().points(), diff)));
}

//! 1-Wasserstein distance as the L1 distance between the cdfs.
template <std::floating_point Scalar>
Scalar
wasserstein1(const BasicGriddedDistribution<Scalar>& a,
             const BasicGriddedDistribution<Scalar>& b)
{
  detail::require_same_grid(a, b);
  return trapezoid(a.grid().points(), (a.cdf() - b.cdf()).cwiseAbs());
}

//! int f_a log(f_a / f_b). Both densities are floored at 1e-12 inside the
//! log and points with f_a <= 1e-12 contribute nothing. Small negative
//! quadrature residue (down to -1e-6) is reported as 0.
template <std::floating_point Scalar>
Scalar
kl_divergence(const BasicGriddedDistribution<Scalar>& a,
              const BasicGriddedDistribution<Scalar>& b)
{
  detail::require_same_grid(a, b);
  constexpr Scalar floor = Scalar(1e-12);
  const auto pa = a.pdf().array();
  const auto pb = b.pdf().array();
  const auto integrand =
    (pa > floor)
      .select(pa * (pa.max(floor) / pb.max(floor)).log(), Scalar(0))
      .matrix()
      .eval();
  const Scalar value = trapezoid(a.grid().points(), integrand);
  return (value < Scalar(0) && value >= Scalar(-1e-6)) ? Scalar(0) : value;
}

template <std::floating_point Scalar>
Scalar
divergence(DivergenceKind kind,
           const BasicGriddedDistribution<Scalar>& a,
           const BasicGriddedDistribution<Scalar>& b)
{
  switch (kind) {
    case DivergenceKind::KS:
      return ks_distance(a, b);
    case DivergenceKind::Hellinger:
      return hellinger(a, b);
    case DivergenceKind::Wasserstein1:
      return wasserstein1(a, b);
    case DivergenceKind::KL:
      return kl_divergence(a, b);
  }
  return Scalar(0);
}

//! Divergence of the density at each date t0..T against the density at t0.
struct DivergenceSeries
{
  DivergenceKind kind;
  long reference_index;
  //! values[k] belongs to time index reference_index + k.
  Eigen::VectorXd values;
};

struct DivergenceSeriesOptions
{
  Eigen::Index grid_points = 2048;
  //! Refine the grid (up to 2^20 points) so the step stays below h / 4.
  bool refine_for_bandwidth = true;
};

//! Common grid for a whole series: full-sample range +/- 5h.
EvalGrid
series_grid(std::span<const double> returns, double h, const DivergenceSeriesOptions& options = {});

//! Builds f_{t0} from X_1..X_t0, advances it recursively through X_T and
//! records each requested divergence of f_t against f_{t0} on a grid fixed
//! from the full sample.
std::vector<DivergenceSeries>
divergence_series(std::span<const double> returns,
                  long t0,
                  double h,
                  double omega,
                  const KernelSpec& kernel,
                  std::span<const DivergenceKind> kinds,
                  const DivergenceSeriesOptions& options = {});

struct Peak
{
  //! Offset into the series values.
  Eigen::Index offset;
  long time_index;
  double value;
};

//! Date of the largest value; the earliest one on ties.
Peak
peak_date(const DivergenceSeries& series);

} // namespace tvkde
