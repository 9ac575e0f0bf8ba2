#pragma once

#include "tvkde/kernels.hpp"
#include "tvkde/pit_criteria.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tvkde {

enum class SelectionCriterion
{
  PitDNu,     //!< minimize d_nu of the PITs
  PitDNuAlt,  //!< minimize the windowed alternative
  Likelihood  //!< maximize the predictive log-likelihood
};

std::string_view
to_string(SelectionCriterion criterion);

SelectionCriterion
parse_criterion(std::string_view name);

struct Bounds
{
  double lower;
  double upper;
};

struct SearchOptions
{
  int h_nodes = 21;
  int omega_nodes = 21;
  int max_iterations = 200;
  double tolerance = 1e-4;
};

//! Everything needed to select (h, omega) on one return series.
struct SelectionProblem
{
  std::vector<double> returns;
  long t0 = 0;
  SelectionCriterion criterion = SelectionCriterion::PitDNu;
  //! Restricts omega to (1 - 1/nu, 1].
  bool constrained = false;
  int nu = 22;
  Bounds h_bounds{ 0.0, 0.0 };
  Bounds omega_bounds{ 0.5, 1.0 };
  KernelSpec kernel;
  KsNormalization normalization = KsNormalization::AsPrinted;
  SearchOptions search;

  //! The omega lower bound is excluded in the constrained problem.
  bool omega_lower_open() const { return constrained; }
  CriterionConfig criterion_config() const;
};

//! Scale used for default bandwidth bounds: min(sd, IQR / 1.349).
double
robust_scale(std::span<const double> values);

//! [1e-4, 10] times the robust scale of the series.
Bounds
default_h_bounds(std::span<const double> returns);

//! (1 - 1/nu, 1] when constrained, [0.5, 1] otherwise.
Bounds
default_omega_bounds(bool constrained, int nu);

//! A problem with default bounds filled in.
SelectionProblem
make_problem(std::vector<double> returns,
             long t0,
             SelectionCriterion criterion,
             bool constrained = false,
             int nu = 22,
             KernelSpec kernel = {});

//! Throws ParameterError / InsufficientDataError when the problem violates
//! its invariants.
void
validate(const SelectionProblem& problem);

struct TracePoint
{
  double h;
  double omega;
  double value;
};

struct SelectionResult
{
  double h_opt = 0.0;
  //! 1 by convention for the static framework.
  double omega_opt = 1.0;
  double criterion_value = 0.0;
  std::size_t evaluations = 0;
  std::vector<TracePoint> search_trace;
  bool static_framework = false;
};

//! log f_s(X_{s+1}) for s = t0..T-1 with out-of-sample recursion.
Eigen::VectorXd
predictive_log_densities(std::span<const double> returns,
                         long t0,
                         double h,
                         double omega,
                         const KernelSpec& kernel);

//! Value minimized by `select`: the PIT criterion, or the negated
//! predictive log-likelihood (+inf when some forecast density is zero).
double
objective(const SelectionProblem& problem, double h, double omega);

//! Static-framework objective: the density is estimated once on X_1..X_t0.
double
static_objective(const SelectionProblem& problem, double h);

//! Grid search over (log h, omega) followed by Nelder-Mead refinement in
//! (log h, logit of rescaled omega). Deterministic.
SelectionResult
select(const SelectionProblem& problem);

//! One-dimensional search over h in the static framework.
SelectionResult
select_static(const SelectionProblem& problem);

SelectionResult
select_static(std::span<const double> returns,
              long t0,
              SelectionCriterion criterion,
              int nu,
              const KernelSpec& kernel);

} // namespace tvkde
