#pragma once

#include "tvkde/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>

namespace tvkde {

//! Strictly increasing abscissae on which densities are tabulated.
template <std::floating_point Scalar = double>
class BasicEvalGrid
{
public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BasicEvalGrid(Vector points)
    : points_(std::move(points))
  {
    if (points_.size() < 2)
      throw GridError("evaluation grid needs at least 2 points");
    for (Eigen::Index i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i]))
        throw GridError("evaluation grid contains a non-finite point");
      if (i > 0 && !(points_[i] > points_[i - 1]))
        throw GridError("evaluation grid must be strictly increasing");
    }
  }

  //! `size` equally spaced points covering [lower, upper].
  static BasicEvalGrid linspace(Scalar lower, Scalar upper, Eigen::Index size)
  {
    if (size < 2 || !(upper > lower))
      throw GridError("linspace grid needs size >= 2 and upper > lower");
    return BasicEvalGrid(Vector::LinSpaced(size, lower, upper));
  }

  const Vector& points() const { return points_; }
  Eigen::Index size() const { return points_.size(); }
  Scalar operator[](Eigen::Index i) const { return points_[i]; }
  Scalar front() const { return points_[0]; }
  Scalar back() const { return points_[points_.size() - 1]; }

  friend bool operator==(const BasicEvalGrid& a, const BasicEvalGrid& b)
  {
    return a.points_.size() == b.points_.size() &&
           (a.points_.array() == b.points_.array()).all();
  }

private:
  Vector points_;
};

using EvalGrid = BasicEvalGrid<double>;

//! Trapezoid rule for samples `values` at abscissae `x`.
template <typename DerivedX, typename DerivedY>
typename DerivedY::Scalar
trapezoid(const Eigen::DenseBase<DerivedX>& x, const Eigen::DenseBase<DerivedY>& values)
{
  const Eigen::Index n = x.size();
  if (n < 2)
    return typename DerivedY::Scalar(0);
  const auto dx = x.tail(n - 1).array() - x.head(n - 1).array();
  const auto mid = values.tail(n - 1).array() + values.head(n - 1).array();
  return typename DerivedY::Scalar(0.5) * (dx * mid).sum();
}

//! Cumulative trapezoid integral starting at 0 on the first point.
template <typename DerivedX, typename DerivedY>
Eigen::Matrix<typename DerivedY::Scalar, Eigen::Dynamic, 1>
cumulative_trapezoid(const Eigen::DenseBase<DerivedX>& x,
                     const Eigen::DenseBase<DerivedY>& values)
{
  using Scalar = typename DerivedY::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(x.size());
  if (x.size() == 0)
    return out;
  out[0] = Scalar(0);
  for (Eigen::Index i = 1; i < x.size(); ++i)
    out[i] = out[i - 1] + Scalar(0.5) * (x[i] - x[i - 1]) * (values[i] + values[i - 1]);
  return out;
}

//! A density tabulated on a grid together with its cdf.
//!
//! The constructor enforces the structural invariants (matching sizes,
//! non-negative pdf, cdf in [0, 1] and nondecreasing). Whether the grid
//! covers the probability mass is a separate check, `covers_mass`, because
//! windowed comparisons against heavy-tailed references legitimately miss
//! part of the mass.
template <std::floating_point Scalar = double>
class BasicGriddedDistribution
{
public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Grid = BasicEvalGrid<Scalar>;

  BasicGriddedDistribution(Grid grid, Vector pdf, Vector cdf)
    : grid_(std::move(grid))
    , pdf_(std::move(pdf))
    , cdf_(std::move(cdf))
  {
    if (pdf_.size() != grid_.size() || cdf_.size() != grid_.size())
      throw GridError("pdf and cdf must have one value per grid point");
    // Tolerances absorb rounding of recursively updated values.
    constexpr Scalar slack = Scalar(1e-12);
    for (Eigen::Index i = 0; i < pdf_.size(); ++i) {
      if (!(pdf_[i] >= Scalar(0)))
        throw GridError("pdf must be non-negative and finite");
      if (!(cdf_[i] >= -slack && cdf_[i] <= Scalar(1) + slack))
        throw GridError("cdf must lie in [0, 1]");
      if (i > 0 && cdf_[i] < cdf_[i - 1] - slack)
        throw GridError("cdf must be nondecreasing");
    }
  }

  const Grid& grid() const { return grid_; }
  const Vector& pdf() const { return pdf_; }
  const Vector& cdf() const { return cdf_; }

  //! Mutable access for recursive in-place updates; callers keep the
  //! invariants.
  Vector& pdf_mut() { return pdf_; }
  Vector& cdf_mut() { return cdf_; }

  Scalar mass() const { return trapezoid(grid_.points(), pdf_); }

  //! Trapezoid mass within 5e-3 of one, cdf <= 0.01 at the left end and
  //! >= 0.99 at the right end.
  bool covers_mass() const
  {
    const Scalar m = mass();
    return m >= Scalar(1 - 5e-3) && m <= Scalar(1 + 5e-3) &&
           cdf_[0] <= Scalar(0.01) && cdf_[cdf_.size() - 1] >= Scalar(0.99);
  }

  //! Contiguous window [first, first + count).
  BasicGriddedDistribution segment(Eigen::Index first, Eigen::Index count) const
  {
    return BasicGriddedDistribution(Grid(grid_.points().segment(first, count)),
                                    pdf_.segment(first, count),
                                    cdf_.segment(first, count));
  }

private:
  Grid grid_;
  Vector pdf_;
  Vector cdf_;
};

using GriddedDistribution = BasicGriddedDistribution<double>;

} // namespace tvkde
