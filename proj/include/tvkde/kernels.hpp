#pragma once

#include "tvkde/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <string_view>

namespace tvkde {

enum class KernelKind
{
  Epanechnikov,
  Gaussian
};

//! Symmetric unit-mass smoothing kernel K and its primitive (the kernel cdf).
struct KernelSpec
{
  KernelKind kind = KernelKind::Epanechnikov;

  static constexpr KernelSpec epanechnikov() { return { KernelKind::Epanechnikov }; }
  static constexpr KernelSpec gaussian() { return { KernelKind::Gaussian }; }

  //! Half-width of the support; infinite for the Gaussian kernel.
  double support_radius() const
  {
    return kind == KernelKind::Epanechnikov
             ? 1.0
             : std::numeric_limits<double>::infinity();
  }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

inline std::string_view
to_string(KernelKind kind)
{
  return kind == KernelKind::Epanechnikov ? "epanechnikov" : "gaussian";
}

inline KernelSpec
parse_kernel(std::string_view name)
{
  if (name == "epanechnikov")
    return KernelSpec::epanechnikov();
  if (name == "gaussian")
    return KernelSpec::gaussian();
  throw ParameterError("unknown kernel '" + std::string(name) +
                       "' (expected epanechnikov or gaussian)");
}

namespace detail {

template <std::floating_point Scalar>
constexpr Scalar inv_sqrt_2pi = Scalar(0.398942280401432677939946059934381868);

template <std::floating_point Scalar>
Scalar
epanechnikov_pdf(Scalar u)
{
  return std::abs(u) < Scalar(1) ? Scalar(0.75) * (Scalar(1) - u * u)
                                 : Scalar(0);
}

// Clamped outside [-1, 1] so the cubic never leaves [0, 1].
template <std::floating_point Scalar>
Scalar
epanechnikov_cdf(Scalar u)
{
  if (u <= Scalar(-1))
    return Scalar(0);
  if (u >= Scalar(1))
    return Scalar(1);
  return Scalar(0.5) + Scalar(0.75) * (u - u * u * u / Scalar(3));
}

template <std::floating_point Scalar>
Scalar
gaussian_pdf(Scalar u)
{
  return inv_sqrt_2pi<Scalar> * std::exp(Scalar(-0.5) * u * u);
}

template <std::floating_point Scalar>
Scalar
gaussian_cdf(Scalar u)
{
  // erfc keeps full relative accuracy in the lower tail.
  return Scalar(0.5) * std::erfc(-u * Scalar(0.707106781186547524400844362104849));
}

template <std::floating_point Scalar>
Scalar
kernel_pdf_unchecked(KernelKind kind, Scalar u)
{
  return kind == KernelKind::Epanechnikov ? epanechnikov_pdf(u)
                                          : gaussian_pdf(u);
}

template <std::floating_point Scalar>
Scalar
kernel_cdf_unchecked(KernelKind kind, Scalar u)
{
  return kind == KernelKind::Epanechnikov ? epanechnikov_cdf(u)
                                          : gaussian_cdf(u);
}

template <std::floating_point Scalar>
void
require_finite(Scalar u)
{
  if (!std::isfinite(u))
    throw DomainError("kernel argument must be finite");
}

} // namespace detail

//! K(u).
template <std::floating_point Scalar>
Scalar
kernel_eval(const KernelSpec& spec, Scalar u)
{
  detail::require_finite(u);
  return detail::kernel_pdf_unchecked(spec.kind, u);
}

//! Primitive of K with limits 0 at -inf and 1 at +inf.
template <std::floating_point Scalar>
Scalar
kernel_cdf(const KernelSpec& spec, Scalar u)
{
  detail::require_finite(u);
  return detail::kernel_cdf_unchecked(spec.kind, u);
}

//! Coefficient-wise K over an array expression. The result is a lazy
//! expression; evaluate it before the operand goes out of scope.
template <typename Derived>
auto
kernel_eval(const KernelSpec& spec, const Eigen::ArrayBase<Derived>& u)
{
  using Scalar = typename Derived::Scalar;
  const KernelKind kind = spec.kind;
  return u.derived().unaryExpr(
    [kind](Scalar v) { return detail::kernel_pdf_unchecked(kind, v); });
}

//! Coefficient-wise kernel cdf over an array expression.
template <typename Derived>
auto
kernel_cdf(const KernelSpec& spec, const Eigen::ArrayBase<Derived>& u)
{
  using Scalar = typename Derived::Scalar;
  const KernelKind kind = spec.kind;
  return u.derived().unaryExpr(
    [kind](Scalar v) { return detail::kernel_cdf_unchecked(kind, v); });
}

} // namespace tvkde
