#pragma once

#include "tvkde/errors.hpp"
#include "tvkde/gridded.hpp"
#include "tvkde/kernels.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace tvkde {

struct DensityOptions
{
  //! Drop the oldest observations once their weight falls below
  //! `weight_floor`. Off by default.
  bool prune = false;
  double weight_floor = 1e-15;
};

//! Mixing coefficients of one recursive step:
//! f_{t+1} = retain * f_t + fresh * K_h(. - x_new).
template <std::floating_point Scalar>
struct StepWeights
{
  Scalar retain;
  Scalar fresh;
};

//! Step coefficients for discount `omega` when `t` observations have been
//! absorbed. omega == 1 is the equal-weight estimator growing by one point.
template <std::floating_point Scalar>
StepWeights<Scalar>
step_weights(Scalar omega, long t)
{
  if (omega < Scalar(1))
    return { omega, Scalar(1) - omega };
  const Scalar n = static_cast<Scalar>(t);
  return { n / (n + Scalar(1)), Scalar(1) / (n + Scalar(1)) };
}

namespace detail {

template <std::floating_point Scalar>
void
validate_parameters(Scalar h, Scalar omega)
{
  if (!(h > Scalar(0)) || !std::isfinite(h))
    throw ParameterError("bandwidth must be positive and finite");
  if (!(omega > Scalar(0) && omega <= Scalar(1)))
    throw ParameterError("discount factor must lie in (0, 1]");
}

// Index range [lo, hi) of grid points inside [center - radius, center + radius].
template <typename Vector, std::floating_point Scalar>
std::pair<Eigen::Index, Eigen::Index>
support_range(const Vector& points, Scalar center, Scalar radius)
{
  const auto* begin = points.data();
  const auto* end = begin + points.size();
  const auto lo = std::lower_bound(begin, end, center - radius) - begin;
  const auto hi = std::upper_bound(begin, end, center + radius) - begin;
  return { lo, hi };
}

} // namespace detail

//! Exponentially discounted kernel density
//!   f_t(x) = (1/h) sum_i w_{t,i} K((x - X_i)/h)
//! with exact initial weights (1-omega) omega^{t0-i} / (1 - omega^{t0}) and
//! recursive updates thereafter. The full observation history is kept so
//! the density and cdf can be evaluated exactly anywhere.
template <std::floating_point Scalar = double>
class BasicDynamicDensity
{
public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using ConstMap = Eigen::Map<const Vector>;

  BasicDynamicDensity(std::span<const Scalar> observations,
                      Scalar bandwidth,
                      Scalar discount,
                      KernelSpec kernel = {},
                      DensityOptions options = {})
    : h_(bandwidth)
    , omega_(discount)
    , kernel_(kernel)
    , options_(options)
  {
    detail::validate_parameters(h_, omega_);
    const auto t0 = static_cast<long>(observations.size());
    if (t0 < 2)
      throw InsufficientDataError("dynamic density needs at least 2 observations");
    for (Scalar x : observations)
      if (!std::isfinite(x))
        throw DataError("observations must be finite");

    obs_.assign(observations.begin(), observations.end());
    weights_.resize(obs_.size());
    if (omega_ < Scalar(1)) {
      const Scalar norm =
        (Scalar(1) - omega_) / -std::expm1(static_cast<Scalar>(t0) * std::log(omega_));
      for (long i = 0; i < t0; ++i)
        weights_[i] = norm * std::pow(omega_, static_cast<Scalar>(t0 - 1 - i));
    } else {
      std::fill(weights_.begin(), weights_.end(), Scalar(1) / static_cast<Scalar>(t0));
    }
    t_ = t0;
    prune();
  }

  //! Absorbs one observation: existing weights are scaled by `retain` and
  //! the new point enters with weight `fresh`.
  void update(Scalar x_new)
  {
    if (!std::isfinite(x_new))
      throw DataError("new observation must be finite");
    const auto s = step_weights(omega_, t_);
    for (auto& w : weights_)
      w *= s.retain;
    obs_.push_back(x_new);
    weights_.push_back(s.fresh);
    ++t_;
    prune();
  }

  Scalar pdf(Scalar x) const
  {
    return (weights().array() *
            kernel_eval(kernel_, (x - observations().array()) / h_))
             .sum() /
           h_;
  }

  Scalar cdf(Scalar x) const
  {
    return (weights().array() *
            kernel_cdf(kernel_, (x - observations().array()) / h_))
      .sum();
  }

  //! log f_t(x). For the Gaussian kernel this is evaluated by log-sum-exp
  //! and stays finite where the direct sum underflows.
  Scalar log_pdf(Scalar x) const
  {
    if (kernel_.kind == KernelKind::Epanechnikov)
      return std::log(pdf(x));
    Scalar peak = -std::numeric_limits<Scalar>::infinity();
    const auto n = static_cast<Eigen::Index>(obs_.size());
    Vector terms(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar u = (x - obs_[i]) / h_;
      terms[i] = std::log(weights_[i]) - Scalar(0.5) * u * u;
      peak = std::max(peak, terms[i]);
    }
    if (!std::isfinite(peak))
      return peak;
    const Scalar sum = (terms.array() - peak).exp().sum();
    return peak + std::log(sum) - std::log(h_) +
           std::log(detail::inv_sqrt_2pi<Scalar>);
  }

  StepWeights<Scalar> next_step() const { return step_weights(omega_, t_); }

  Scalar bandwidth() const { return h_; }
  Scalar discount() const { return omega_; }
  const KernelSpec& kernel() const { return kernel_; }
  const DensityOptions& options() const { return options_; }

  //! Number of observations absorbed so far (the time index t).
  long time() const { return t_; }

  ConstMap observations() const
  {
    return ConstMap(obs_.data(), static_cast<Eigen::Index>(obs_.size()));
  }

  ConstMap weights() const
  {
    return ConstMap(weights_.data(), static_cast<Eigen::Index>(weights_.size()));
  }

  Scalar weight_sum() const { return weights().sum(); }

private:
  void prune()
  {
    if (!options_.prune)
      return;
    const auto floor = static_cast<Scalar>(options_.weight_floor);
    std::size_t drop = 0;
    while (drop + 1 < weights_.size() && weights_[drop] < floor)
      ++drop;
    if (drop > 0) {
      obs_.erase(obs_.begin(), obs_.begin() + static_cast<std::ptrdiff_t>(drop));
      weights_.erase(weights_.begin(), weights_.begin() + static_cast<std::ptrdiff_t>(drop));
    }
  }

  Scalar h_;
  Scalar omega_;
  KernelSpec kernel_;
  DensityOptions options_;
  std::vector<Scalar> obs_;
  std::vector<Scalar> weights_;
  long t_ = 0;
};

using DynamicDensity = BasicDynamicDensity<double>;

//! Builds the density at t0 from the first t0 observations.
template <std::floating_point Scalar>
BasicDynamicDensity<Scalar>
init_dynamic(std::span<const Scalar> observations,
             Scalar h,
             Scalar omega,
             KernelSpec kernel = {},
             DensityOptions options = {})
{
  return BasicDynamicDensity<Scalar>(observations, h, omega, kernel, options);
}

inline DynamicDensity
init_dynamic(const std::vector<double>& observations,
             double h,
             double omega,
             KernelSpec kernel = {},
             DensityOptions options = {})
{
  return DynamicDensity(std::span<const double>(observations), h, omega, kernel, options);
}

//! Equal-weight kernel density on a fixed sample.
template <std::floating_point Scalar = double>
struct BasicStaticDensity
{
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicStaticDensity(Vector obs, Scalar bandwidth, KernelSpec k = {})
    : h(bandwidth)
    , kernel(k)
    , observations(std::move(obs))
  {
    if (!(h > Scalar(0)) || !std::isfinite(h))
      throw ParameterError("bandwidth must be positive and finite");
    if (observations.size() < 1)
      throw InsufficientDataError("static density needs at least 1 observation");
    if (!observations.allFinite())
      throw DataError("observations must be finite");
  }

  Scalar h;
  KernelSpec kernel;
  Vector observations;
};

using StaticDensity = BasicStaticDensity<double>;

//! (pdf, cdf) of the equal-weight estimator at x.
template <std::floating_point Scalar>
std::pair<Scalar, Scalar>
static_pdf_cdf(const BasicStaticDensity<Scalar>& s, Scalar x)
{
  const auto u = ((x - s.observations.array()) / s.h).eval();
  const auto n = static_cast<Scalar>(s.observations.size());
  return { kernel_eval(s.kernel, u).sum() / (n * s.h),
           kernel_cdf(s.kernel, u).sum() / n };
}

namespace detail {

// Accumulates w * K_h(. - center) into pdf/cdf over the grid. Compact
// kernels only touch their support; the returned index is the first grid
// point right of the support, where the cdf has fully absorbed w (the caller
// adds that jump). Returns -1 for kernels with unbounded support.
template <std::floating_point Scalar, typename Vector>
Eigen::Index
accumulate_kernel(const KernelSpec& kernel,
                  const Vector& points,
                  Scalar center,
                  Scalar h,
                  Scalar w,
                  Vector& pdf,
                  Vector& cdf)
{
  const Scalar radius = static_cast<Scalar>(kernel.support_radius());
  if (std::isfinite(radius)) {
    const auto [lo, hi] = support_range(points, center, radius * h);
    if (hi > lo) {
      const auto u = ((points.segment(lo, hi - lo).array() - center) / h).eval();
      pdf.segment(lo, hi - lo).array() += (w / h) * kernel_eval(kernel, u);
      cdf.segment(lo, hi - lo).array() += w * kernel_cdf(kernel, u);
    }
    return hi;
  }
  const auto u = ((points.array() - center) / h).eval();
  pdf.array() += (w / h) * kernel_eval(kernel, u);
  cdf.array() += w * kernel_cdf(kernel, u);
  return -1;
}

template <typename Vector>
void
resolve_steps(Vector& cdf, const Vector& step)
{
  typename Vector::Scalar running(0);
  for (Eigen::Index j = 0; j < cdf.size(); ++j) {
    running += step[j];
    cdf[j] += running;
  }
}

template <typename Vector>
void
clamp_cdf(Vector& cdf)
{
  cdf = cdf.cwiseMax(typename Vector::Scalar(0)).cwiseMin(typename Vector::Scalar(1));
}

} // namespace detail

//! Tabulates the current pdf and cdf on `grid`.
template <std::floating_point Scalar>
BasicGriddedDistribution<Scalar>
evaluate_on_grid(const BasicDynamicDensity<Scalar>& d, const BasicEvalGrid<Scalar>& grid)
{
  using Vector = typename BasicDynamicDensity<Scalar>::Vector;
  const Vector& points = grid.points();
  Vector pdf = Vector::Zero(points.size());
  Vector cdf = Vector::Zero(points.size());
  Vector step = Vector::Zero(points.size() + 1);
  const auto obs = d.observations();
  const auto w = d.weights();
  for (Eigen::Index i = 0; i < obs.size(); ++i) {
    const auto hi =
      detail::accumulate_kernel(d.kernel(), points, obs[i], d.bandwidth(), w[i], pdf, cdf);
    if (hi >= 0)
      step[hi] += w[i];
  }
  detail::resolve_steps(cdf, step);
  detail::clamp_cdf(cdf);
  return BasicGriddedDistribution<Scalar>(grid, std::move(pdf), std::move(cdf));
}

//! Tabulates the equal-weight estimator on `grid`.
template <std::floating_point Scalar>
BasicGriddedDistribution<Scalar>
evaluate_on_grid(const BasicStaticDensity<Scalar>& s, const BasicEvalGrid<Scalar>& grid)
{
  using Vector = typename BasicStaticDensity<Scalar>::Vector;
  const Vector& points = grid.points();
  Vector pdf = Vector::Zero(points.size());
  Vector cdf = Vector::Zero(points.size());
  Vector step = Vector::Zero(points.size() + 1);
  const Scalar w = Scalar(1) / static_cast<Scalar>(s.observations.size());
  for (Eigen::Index i = 0; i < s.observations.size(); ++i) {
    const auto hi =
      detail::accumulate_kernel(s.kernel, points, s.observations[i], s.h, w, pdf, cdf);
    if (hi >= 0)
      step[hi] += w;
  }
  detail::resolve_steps(cdf, step);
  detail::clamp_cdf(cdf);
  return BasicGriddedDistribution<Scalar>(grid, std::move(pdf), std::move(cdf));
}

//! Default grid: [min(X) - 5h, max(X) + 5h] with `points` equally spaced
//! points.
template <typename Derived>
BasicEvalGrid<typename Derived::Scalar>
default_grid(const Eigen::DenseBase<Derived>& observations,
             typename Derived::Scalar h,
             Eigen::Index points = 2048)
{
  using Scalar = typename Derived::Scalar;
  const Scalar lo = observations.minCoeff() - Scalar(5) * h;
  const Scalar hi = observations.maxCoeff() + Scalar(5) * h;
  return BasicEvalGrid<Scalar>::linspace(lo, hi, points);
}

//! A dynamic density tabulated on a fixed grid and advanced by the
//! recursion itself, O(grid size) per step.
template <std::floating_point Scalar = double>
class BasicGriddedTrack
{
public:
  using Vector = typename BasicGriddedDistribution<Scalar>::Vector;

  BasicGriddedTrack(const BasicDynamicDensity<Scalar>& start, BasicEvalGrid<Scalar> grid)
    : h_(start.bandwidth())
    , omega_(start.discount())
    , kernel_(start.kernel())
    , t_(start.time())
    , current_(evaluate_on_grid(start, grid))
  {
  }

  void update(Scalar x_new)
  {
    if (!std::isfinite(x_new))
      throw DataError("new observation must be finite");
    const auto s = step_weights(omega_, t_);
    Vector& pdf = current_.pdf_mut();
    Vector& cdf = current_.cdf_mut();
    const Vector& points = current_.grid().points();
    pdf *= s.retain;
    cdf *= s.retain;
    const auto hi = detail::accumulate_kernel(kernel_, points, x_new, h_, s.fresh, pdf, cdf);
    if (hi >= 0)
      cdf.tail(points.size() - hi).array() += s.fresh;
    detail::clamp_cdf(cdf);
    ++t_;
  }

  const BasicGriddedDistribution<Scalar>& current() const { return current_; }
  long time() const { return t_; }

private:
  Scalar h_;
  Scalar omega_;
  KernelSpec kernel_;
  long t_;
  BasicGriddedDistribution<Scalar> current_;
};

using GriddedTrack = BasicGriddedTrack<double>;

} // namespace tvkde
