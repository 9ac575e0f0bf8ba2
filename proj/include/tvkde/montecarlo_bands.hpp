#pragma once

#include "tvkde/divergence.hpp"
#include "tvkde/kernels.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace tvkde {

//! Null hypothesis: iid N(0, sigma^2) returns, pushed through the same
//! density and divergence pipeline as the real series.
struct NullSimConfig
{
  long n_paths = 1000;
  long path_length = 0;
  long t0 = 0;
  double sigma = 1.0;
  double h = 1.0;
  double omega = 1.0;
  KernelSpec kernel;
  std::vector<double> levels{ 0.95, 0.99, 0.999 };
  std::uint64_t seed = 0;
  DivergenceSeriesOptions grid;
};

void
validate(const NullSimConfig& cfg);

using PathMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

//! Path `index` of the null; depends only on (seed, index).
Eigen::VectorXd
simulate_null_path(const NullSimConfig& cfg, long index);

//! All paths, one per row.
PathMatrix
simulate_null_paths(const NullSimConfig& cfg);

//! Per-date quantile curves of one divergence under the null.
struct ConfidenceBands
{
  DivergenceKind kind;
  long reference_index;
  std::vector<double> levels;
  //! Row k is time index reference_index + k; one column per level.
  Eigen::MatrixXd curves;
};

//! Empirical p-quantile as the order statistic of 1-based rank ceil(p n).
double
upper_quantile(std::span<double> values, double p);

std::vector<ConfidenceBands>
confidence_bands(const NullSimConfig& cfg, std::span<const DivergenceKind> kinds);

//! Divergence series of every null path: result[kind](path, date).
std::vector<Eigen::MatrixXd>
null_divergence_samples(const NullSimConfig& cfg,
                        std::span<const DivergenceKind> kinds,
                        long first_path = 0);

} // namespace tvkde
