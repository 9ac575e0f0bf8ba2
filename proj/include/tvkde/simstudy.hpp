#pragma once

#include "tvkde/divergence.hpp"
#include "tvkde/param_selection.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace tvkde {

//! Cauchy observations with location t * drift_rate and fixed scale.
struct CauchyStudyConfig
{
  long n = 2000;
  long t0 = 1000;
  double drift_rate = 0.01;
  double scale = 1.0;
  std::uint64_t seed = 0;
  //! Compactly supported kernels make the likelihood criterion infinite on
  //! Cauchy data, so the study defaults to the Gaussian kernel.
  KernelSpec kernel = KernelSpec::gaussian();
  int nu = 22;
  //! Divergences against the truth use [location - w, location + w].
  double window_half_width = 50.0;
  Eigen::Index window_points = 4096;
  SearchOptions search;
};

void
validate(const CauchyStudyConfig& cfg);

//! X_t = t * drift_rate + scale * tan(pi (U_t - 1/2)), t = 1..n. `stream`
//! names an independent random substream of cfg.seed.
std::vector<double>
sample_cauchy_path(const CauchyStudyConfig& cfg, std::string_view stream = "dynamic");

//! Exact pdf and cdf of the observation at time t on `grid`.
GriddedDistribution
true_density_on_grid(const CauchyStudyConfig& cfg, long t, const EvalGrid& grid);

struct MethodOutcome
{
  SelectionCriterion criterion = SelectionCriterion::PitDNu;
  double h = 0.0;
  double omega = 1.0;
  double criterion_value = 0.0;
  //! Time average (dynamic) or single value (static), indexed by
  //! DivergenceKind.
  std::array<double, 4> mean_divergence{};
  //! Dynamic framework only: row k compares f_hat_{t0+k} with f_{t0+k+1};
  //! one column per DivergenceKind.
  Eigen::MatrixXd series;
};

struct DynamicComparison
{
  MethodOutcome pit;
  MethodOutcome likelihood;
  //! Final-date overlay: f_hat_{n-1} of both methods against f_n.
  Eigen::VectorXd final_grid;
  Eigen::VectorXd final_true_pdf;
  Eigen::VectorXd final_pit_pdf;
  Eigen::VectorXd final_likelihood_pdf;
};

struct StaticComparison
{
  MethodOutcome pit;
  MethodOutcome likelihood;
};

struct ComparisonReport
{
  CauchyStudyConfig config;
  DynamicComparison dynamic_study;
  StaticComparison static_study;
};

//! Selects (h, omega) with the PIT criterion and with the likelihood on a
//! drifting Cauchy path, then tracks both estimates against the true
//! next-step density.
DynamicComparison
run_dynamic_comparison(const CauchyStudyConfig& cfg);

//! Same comparison for a fixed estimate built on the first t0 draws of an
//! iid path with location 0; only h is selected.
StaticComparison
run_static_comparison(const CauchyStudyConfig& cfg);

ComparisonReport
run_method_comparison(const CauchyStudyConfig& cfg);

} // namespace tvkde
