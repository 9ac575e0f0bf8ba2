#pragma once

// Independent reference implementations used only by the tests. They are
// written as direct sums and double/triple loops so that they share no code
// with the library.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double
epanechnikov_pdf(double u)
{
  return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

inline double
epanechnikov_cdf(double u)
{
  if (u <= -1.0)
    return 0.0;
  if (u >= 1.0)
    return 1.0;
  return 0.5 + 0.75 * u - 0.25 * u * u * u;
}

inline double
normal_pdf(double u)
{
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

inline double
normal_cdf(double u)
{
  return 0.5 * (1.0 + std::erf(u / std::numbers::sqrt2));
}

inline double
kernel_pdf(bool gaussian, double u)
{
  return gaussian ? normal_pdf(u) : epanechnikov_pdf(u);
}

inline double
kernel_cdf(bool gaussian, double u)
{
  return gaussian ? normal_cdf(u) : epanechnikov_cdf(u);
}

// Weight of X_i (1-based) at time t after exact initialization on X_1..X_t0
// followed by t - t0 recursive updates.
inline double
recursive_weight(long i, long t0, long t, double omega)
{
  if (omega == 1.0)
    return 1.0 / static_cast<double>(t);
  const double base = (1.0 - omega) * std::pow(omega, static_cast<double>(t - i));
  return i <= t0 ? base / (1.0 - std::pow(omega, static_cast<double>(t0))) : base;
}

struct DirectDensity
{
  std::vector<double> x;
  std::vector<double> w;
  double h;
  bool gaussian;

  double pdf(double at) const
  {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      sum += w[i] * kernel_pdf(gaussian, (at - x[i]) / h);
    return sum / h;
  }

  double cdf(double at) const
  {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      sum += w[i] * kernel_cdf(gaussian, (at - x[i]) / h);
    return sum;
  }
};

inline DirectDensity
direct_density(const std::vector<double>& data, long t0, long t, double h, double omega, bool gaussian)
{
  DirectDensity d{ {}, {}, h, gaussian };
  for (long i = 1; i <= t; ++i) {
    d.x.push_back(data[static_cast<std::size_t>(i - 1)]);
    d.w.push_back(recursive_weight(i, t0, t, omega));
  }
  return d;
}

// Uniformity statistic as a double loop over (s, u).
inline double
ks_brute(const std::vector<double>& z, bool ecdf = false)
{
  const auto n = z.size();
  const double denom = static_cast<double>(ecdf ? n : n + 1);
  double worst = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    long count = 0;
    for (std::size_t u = 0; u < n; ++u)
      count += z[u] <= z[s];
    worst = std::max(worst, std::abs(z[s] - static_cast<double>(count) / denom));
  }
  return worst;
}

inline double
ks_lagged_brute(const std::vector<double>& z, std::size_t tau, bool ecdf = false)
{
  const auto m = z.size() - tau;
  const double denom = static_cast<double>(ecdf ? m : m + 1);
  double worst = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    long count = 0;
    for (std::size_t u = 0; u < m; ++u)
      count += (z[u] <= z[s]) && (z[u + tau] <= z[s + tau]);
    worst = std::max(worst, std::abs(z[s] * z[s + tau] - static_cast<double>(count) / denom));
  }
  return worst;
}

inline double
d_nu_brute(const std::vector<double>& z, std::size_t nu, bool ecdf = false)
{
  double worst = std::sqrt(static_cast<double>(z.size())) * ks_brute(z, ecdf);
  for (std::size_t tau = 1; tau <= nu; ++tau)
    worst = std::max(worst, std::sqrt(static_cast<double>(z.size() - tau)) *
                              ks_lagged_brute(z, tau, ecdf));
  return worst;
}

// Every admissible subinterval, each scored with the double loop.
inline double
d_nu_alt_brute(const std::vector<double>& z, std::size_t nu, bool ecdf = false)
{
  double worst = 0.0;
  const std::size_t min_len = std::max<std::size_t>(nu, 1);
  for (std::size_t s = 0; s < z.size(); ++s)
    for (std::size_t t = s + min_len; t <= z.size(); ++t) {
      const std::vector<double> window(z.begin() + static_cast<std::ptrdiff_t>(s),
                                       z.begin() + static_cast<std::ptrdiff_t>(t));
      worst = std::max(worst, std::sqrt(static_cast<double>(window.size())) * ks_brute(window, ecdf));
    }
  return worst;
}

inline std::vector<double>
uniform_sample(std::mt19937_64& gen, std::size_t n)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out)
    v = u(gen);
  return out;
}

inline std::vector<double>
normal_sample(std::mt19937_64& gen, std::size_t n, double sigma = 1.0)
{
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> out(n);
  for (auto& v : out)
    v = g(gen);
  return out;
}

} // namespace oracle
