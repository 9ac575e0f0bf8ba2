#pragma once

#include "tvkde/dynamic_density.hpp"
#include "tvkde/kernels.hpp"

#include <Eigen/Core>

#include <span>

namespace tvkde {

//! Divisor of the empirical-cdf term in the uniformity statistics. The
//! default divides a sum of n indicators by n + 1; `Ecdf` divides by n.
enum class KsNormalization
{
  AsPrinted,
  Ecdf
};

enum class CriterionVariant
{
  DNu,    //!< max over lags 0..nu of sqrt(n - tau) * k'_tau
  DNuAlt  //!< worst sqrt(length) * k over windows of length >= nu
};

//! Probability integral transforms Z_{t0+1..T} of one-step-ahead forecasts.
struct PitSeries
{
  PitSeries(Eigen::VectorXd z, long first_index_minus_one, long last_index);

  Eigen::VectorXd values;
  long t0;
  long T;

  Eigen::Index size() const { return values.size(); }
};

struct CriterionConfig
{
  int nu = 22;
  CriterionVariant variant = CriterionVariant::DNu;
  KsNormalization normalization = KsNormalization::AsPrinted;
};

//! Z_t = F_{t-1}(X_t) for t = t0+1..T. The density absorbs X_t only after
//! Z_t has been recorded.
PitSeries
compute_pits(std::span<const double> returns,
             long t0,
             double h,
             double omega,
             const KernelSpec& kernel,
             DensityOptions options = {});

//! PITs of X_{t0+1..T} under the fixed equal-weight estimator built on
//! X_1..X_t0.
PitSeries
compute_static_pits(std::span<const double> returns,
                    long t0,
                    double h,
                    const KernelSpec& kernel);

//! k = max_s |Z_s - #{u : Z_u <= Z_s} / divisor|. Sort-based, O(n log n).
double
ks_uniform(const Eigen::Ref<const Eigen::VectorXd>& z,
           KsNormalization normalization = KsNormalization::AsPrinted);

inline double
ks_uniform(const PitSeries& pits,
           KsNormalization normalization = KsNormalization::AsPrinted)
{
  return ks_uniform(pits.values, normalization);
}

//! k_tau: largest gap between the empirical copula of the lag-tau pairs
//! (Z_s, Z_{s+tau}), evaluated at the pairs themselves, and the independence
//! product Z_s Z_{s+tau}. Dominance counts use a Fenwick tree, O(n log n).
double
ks_lagged(const Eigen::Ref<const Eigen::VectorXd>& z,
          int tau,
          KsNormalization normalization = KsNormalization::AsPrinted);

inline double
ks_lagged(const PitSeries& pits,
          int tau,
          KsNormalization normalization = KsNormalization::AsPrinted)
{
  return ks_lagged(pits.values, tau, normalization);
}

//! Size-adapted uniformity and independence statistic
//! max_{0 <= tau <= nu} sqrt(n - tau) k'_tau with k'_0 = k.
double
d_nu(const Eigen::Ref<const Eigen::VectorXd>& z, const CriterionConfig& cfg);

inline double
d_nu(const PitSeries& pits, const CriterionConfig& cfg)
{
  return d_nu(pits.values, cfg);
}

//! Worst size-adapted uniformity statistic over all windows of at least nu
//! consecutive PITs.
double
d_nu_alt(const Eigen::Ref<const Eigen::VectorXd>& z, const CriterionConfig& cfg);

inline double
d_nu_alt(const PitSeries& pits, const CriterionConfig& cfg)
{
  return d_nu_alt(pits.values, cfg);
}

//! Dispatches on `cfg.variant`.
double
pit_criterion(const PitSeries& pits, const CriterionConfig& cfg);

} // namespace tvkde
