#include "tvkde/param_selection.hpp"

#include "tvkde/dynamic_density.hpp"
#include "tvkde/errors.hpp"
#include "tvkde/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tvkde {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

double
logit(double u)
{
  return std::log(u / (1.0 - u));
}

double
sigmoid(double x)
{
  return 1.0 / (1.0 + std::exp(-x));
}

std::vector<double>
h_nodes(const SelectionProblem& p)
{
  const int n = p.search.h_nodes;
  std::vector<double> nodes(static_cast<std::size_t>(n));
  const double lo = std::log(p.h_bounds.lower);
  const double hi = std::log(p.h_bounds.upper);
  for (int i = 0; i < n; ++i)
    nodes[i] = n == 1 ? p.h_bounds.lower : std::exp(lo + (hi - lo) * i / (n - 1));
  // exp(log(x)) may miss the endpoints by an ulp.
  nodes.front() = p.h_bounds.lower;
  if (n > 1)
    nodes.back() = p.h_bounds.upper;
  return nodes;
}

// Closed bounds: endpoints included. Open lower bound: n equal steps above it.
std::vector<double>
omega_nodes(const SelectionProblem& p)
{
  const int n = p.search.omega_nodes;
  const double lo = p.omega_bounds.lower;
  const double hi = p.omega_bounds.upper;
  std::vector<double> nodes(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    if (p.omega_lower_open())
      nodes[j] = lo + (hi - lo) * (j + 1) / n;
    else
      nodes[j] = n == 1 ? hi : lo + (hi - lo) * j / (n - 1);
  }
  nodes.back() = hi;
  return nodes;
}

bool
h_in_bounds(const SelectionProblem& p, double h)
{
  return h >= p.h_bounds.lower && h <= p.h_bounds.upper;
}

bool
omega_in_bounds(const SelectionProblem& p, double omega)
{
  const bool above = p.omega_lower_open() ? omega > p.omega_bounds.lower
                                          : omega >= p.omega_bounds.lower;
  return above && omega <= p.omega_bounds.upper;
}

double
negated_log_likelihood(const Eigen::VectorXd& log_densities)
{
  double total = 0.0;
  for (double v : log_densities) {
    if (!std::isfinite(v))
      return infinity;
    total -= v;
  }
  return total;
}

double
finite_or_inf(double v)
{
  return std::isnan(v) ? infinity : v;
}

} // namespace

std::string_view
to_string(SelectionCriterion criterion)
{
  switch (criterion) {
    case SelectionCriterion::PitDNu:
      return "pit";
    case SelectionCriterion::PitDNuAlt:
      return "pit-alt";
    case SelectionCriterion::Likelihood:
      return "likelihood";
  }
  return "pit";
}

SelectionCriterion
parse_criterion(std::string_view name)
{
  if (name == "pit")
    return SelectionCriterion::PitDNu;
  if (name == "pit-alt")
    return SelectionCriterion::PitDNuAlt;
  if (name == "likelihood")
    return SelectionCriterion::Likelihood;
  throw ParameterError("unknown criterion '" + std::string(name) +
                       "' (expected pit, pit-alt or likelihood)");
}

CriterionConfig
SelectionProblem::criterion_config() const
{
  CriterionConfig cfg;
  cfg.nu = nu;
  cfg.variant = criterion == SelectionCriterion::PitDNuAlt ? CriterionVariant::DNuAlt
                                                           : CriterionVariant::DNu;
  cfg.normalization = normalization;
  return cfg;
}

double
robust_scale(std::span<const double> values)
{
  const auto n = values.size();
  if (n < 2)
    throw InsufficientDataError("scale estimate needs at least 2 values");
  const Eigen::Map<const Eigen::VectorXd> x(values.data(), static_cast<Eigen::Index>(n));
  const double mean = x.mean();
  const double sd = std::sqrt((x.array() - mean).square().sum() / static_cast<double>(n - 1));

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double iqr_scale = (quantile(0.75) - quantile(0.25)) / 1.349;
  const double scale = iqr_scale > 0.0 ? std::min(sd, iqr_scale) : sd;
  if (!(scale > 0.0))
    throw ParameterError("cannot derive a bandwidth scale from a constant series");
  return scale;
}

Bounds
default_h_bounds(std::span<const double> returns)
{
  const double s = robust_scale(returns);
  return { 1e-4 * s, 10.0 * s };
}

Bounds
default_omega_bounds(bool constrained, int nu)
{
  if (constrained) {
    if (nu < 1)
      throw ParameterError("nu must be at least 1");
    return { 1.0 - 1.0 / nu, 1.0 };
  }
  return { 0.5, 1.0 };
}

SelectionProblem
make_problem(std::vector<double> returns,
             long t0,
             SelectionCriterion criterion,
             bool constrained,
             int nu,
             KernelSpec kernel)
{
  SelectionProblem p;
  p.h_bounds = default_h_bounds(returns);
  p.omega_bounds = default_omega_bounds(constrained, nu);
  p.returns = std::move(returns);
  p.t0 = t0;
  p.criterion = criterion;
  p.constrained = constrained;
  p.nu = nu;
  p.kernel = kernel;
  return p;
}

void
validate(const SelectionProblem& p)
{
  if (p.nu < 1)
    throw ParameterError("nu must be at least 1");
  if (!(p.h_bounds.lower > 0.0) || !(p.h_bounds.upper >= p.h_bounds.lower) ||
      !std::isfinite(p.h_bounds.upper))
    throw ParameterError("bandwidth bounds must satisfy 0 < lower <= upper < inf");
  if (!(p.omega_bounds.lower > 0.0) || !(p.omega_bounds.upper <= 1.0) ||
      !(p.omega_bounds.lower < p.omega_bounds.upper))
    throw ParameterError("discount bounds must satisfy 0 < lower < upper <= 1");
  if (p.constrained && p.omega_bounds.lower < 1.0 - 1.0 / p.nu)
    throw ParameterError("constrained problem needs omega lower bound >= 1 - 1/nu");
  if (p.search.h_nodes < 1 || p.search.omega_nodes < 1)
    throw ParameterError("search grid needs at least one node per axis");
  if (p.t0 < 2)
    throw InsufficientDataError("t0 must be at least 2");
  const auto T = static_cast<long>(p.returns.size());
  if (T - p.t0 < p.nu + 2)
    throw InsufficientDataError("need T - t0 >= nu + 2 observations after t0");
}

Eigen::VectorXd
predictive_log_densities(std::span<const double> returns,
                         long t0,
                         double h,
                         double omega,
                         const KernelSpec& kernel)
{
  const auto T = static_cast<long>(returns.size());
  if (T <= t0)
    throw InsufficientDataError("need observations after t0");
  DynamicDensity density(returns.first(static_cast<std::size_t>(t0)), h, omega, kernel);
  Eigen::VectorXd out(T - t0);
  for (long s = t0; s < T; ++s) {
    const double x = returns[static_cast<std::size_t>(s)];
    out[s - t0] = density.log_pdf(x);
    density.update(x);
  }
  return out;
}

double
objective(const SelectionProblem& p, double h, double omega)
{
  if (!h_in_bounds(p, h) || !omega_in_bounds(p, omega))
    throw ParameterError("objective evaluated outside the declared bounds");
  const std::span<const double> x(p.returns);
  if (p.criterion == SelectionCriterion::Likelihood)
    return negated_log_likelihood(predictive_log_densities(x, p.t0, h, omega, p.kernel));
  return finite_or_inf(
    pit_criterion(compute_pits(x, p.t0, h, omega, p.kernel), p.criterion_config()));
}

double
static_objective(const SelectionProblem& p, double h)
{
  if (!h_in_bounds(p, h))
    throw ParameterError("objective evaluated outside the declared bounds");
  const std::span<const double> x(p.returns);
  if (p.criterion == SelectionCriterion::Likelihood) {
    // omega = 1 without updates is the fixed equal-weight estimator.
    const DynamicDensity fixed(x.first(static_cast<std::size_t>(p.t0)), h, 1.0, p.kernel);
    double total = 0.0;
    for (std::size_t s = static_cast<std::size_t>(p.t0); s < x.size(); ++s) {
      const double v = fixed.log_pdf(x[s]);
      if (!std::isfinite(v))
        return infinity;
      total -= v;
    }
    return total;
  }
  return finite_or_inf(
    pit_criterion(compute_static_pits(x, p.t0, h, p.kernel), p.criterion_config()));
}

SelectionResult
select(const SelectionProblem& p)
{
  validate(p);
  SelectionResult result;
  const auto hs = h_nodes(p);
  const auto omegas = omega_nodes(p);

  // Stage 1: grid. Ascending h then omega with strict improvement, so ties
  // resolve to the smallest h, then the smallest omega.
  std::vector<double> values(hs.size() * omegas.size());
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = 0; j < omegas.size(); ++j)
      values[i * omegas.size() + j] = objective(p, hs[i], omegas[j]);

  std::size_t best_i = 0, best_j = 0;
  double best = infinity;
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = 0; j < omegas.size(); ++j) {
      const double v = values[i * omegas.size() + j];
      result.search_trace.push_back({ hs[i], omegas[j], v });
      if (v < best) {
        best = v;
        best_i = i;
        best_j = j;
      }
    }
  if (!std::isfinite(best))
    throw SelectionError("objective is infinite at every grid node");

  // Stage 2: Nelder-Mead in (log h, logit((omega - lo) / (hi - lo))).
  const double lo = p.omega_bounds.lower;
  const double span = p.omega_bounds.upper - lo;
  constexpr double edge = 1e-6;
  const double u0 = std::clamp((omegas[best_j] - lo) / span, edge, 1.0 - edge);

  auto transformed = [&](const Eigen::VectorXd& theta) {
    const double h = std::exp(theta[0]);
    const double omega = lo + span * sigmoid(theta[1]);
    if (!h_in_bounds(p, h) || !omega_in_bounds(p, omega))
      return infinity;
    const double v = objective(p, h, omega);
    result.search_trace.push_back({ h, omega, v });
    return v;
  };

  Eigen::VectorXd start(2);
  start << std::log(hs[best_i]), logit(u0);
  Eigen::VectorXd steps(2);
  const double log_h_step =
    hs.size() > 1 ? std::log(hs[1] / hs[0]) : 0.1;
  const double u_step = 1.0 / std::max(1, p.search.omega_nodes - 1);
  steps << (log_h_step > 0.0 ? log_h_step : 0.1),
    std::clamp(u_step / (u0 * (1.0 - u0)), 0.2, 2.0);
  if (start[0] + steps[0] > std::log(p.h_bounds.upper))
    steps[0] = -steps[0];

  NelderMeadOptions nm;
  nm.max_iterations = p.search.max_iterations;
  nm.tolerance = p.search.tolerance;
  nelder_mead(transformed, start, steps, nm);

  // Best evaluated point; the grid comes first in the trace, so exact ties
  // keep the grid winner.
  const TracePoint* winner = nullptr;
  for (const auto& tp : result.search_trace)
    if (winner == nullptr || tp.value < winner->value)
      winner = &tp;
  result.h_opt = winner->h;
  result.omega_opt = winner->omega;
  result.criterion_value = winner->value;
  result.evaluations = result.search_trace.size();
  return result;
}

SelectionResult
select_static(const SelectionProblem& p)
{
  validate(p);
  SelectionResult result;
  result.static_framework = true;
  result.omega_opt = 1.0;
  const auto hs = h_nodes(p);

  double best = infinity;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double v = static_objective(p, hs[i]);
    result.search_trace.push_back({ hs[i], 1.0, v });
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  if (!std::isfinite(best))
    throw SelectionError("objective is infinite at every grid node");

  auto transformed = [&](const Eigen::VectorXd& theta) {
    const double h = std::exp(theta[0]);
    if (!h_in_bounds(p, h))
      return infinity;
    const double v = static_objective(p, h);
    result.search_trace.push_back({ h, 1.0, v });
    return v;
  };
  Eigen::VectorXd start(1);
  start << std::log(hs[best_i]);
  Eigen::VectorXd steps(1);
  steps << (hs.size() > 1 ? std::log(hs[1] / hs[0]) : 0.1);
  if (start[0] + steps[0] > std::log(p.h_bounds.upper))
    steps[0] = -steps[0];
  NelderMeadOptions nm;
  nm.max_iterations = p.search.max_iterations;
  nm.tolerance = p.search.tolerance;
  nelder_mead(transformed, start, steps, nm);

  const TracePoint* winner = nullptr;
  for (const auto& tp : result.search_trace)
    if (winner == nullptr || tp.value < winner->value)
      winner = &tp;
  result.h_opt = winner->h;
  result.criterion_value = winner->value;
  result.evaluations = result.search_trace.size();
  return result;
}

SelectionResult
select_static(std::span<const double> returns,
              long t0,
              SelectionCriterion criterion,
              int nu,
              const KernelSpec& kernel)
{
  auto p = make_problem(std::vector<double>(returns.begin(), returns.end()), t0, criterion,
                        false, nu, kernel);
  return select_static(p);
}

} // namespace tvkde
