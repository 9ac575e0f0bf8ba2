#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace tvkde {

struct NelderMeadOptions
{
  int max_iterations = 200;
  //! Stop once every vertex lies within this sup-norm distance of the best.
  double tolerance = 1e-4;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult
{
  Eigen::VectorXd x;
  double value;
  int iterations;
  int evaluations;
};

//! Derivative-free simplex minimization started from `x0` with initial
//! edge lengths `steps` along the coordinate axes. The objective may return
//! +inf for inadmissible points. Deterministic: ties among vertices keep
//! their previous order.
inline NelderMeadResult
nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
            const Eigen::VectorXd& x0,
            const Eigen::VectorXd& steps,
            const NelderMeadOptions& opt = {})
{
  const Eigen::Index dim = x0.size();
  int evaluations = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<Eigen::VectorXd> vertex(dim + 1, x0);
  std::vector<double> value(dim + 1);
  value[0] = eval(x0);
  for (Eigen::Index i = 0; i < dim; ++i) {
    vertex[i + 1][i] += steps[i];
    value[i + 1] = eval(vertex[i + 1]);
  }

  std::vector<std::size_t> order(dim + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    std::vector<Eigen::VectorXd> v2;
    std::vector<double> f2;
    for (auto k : order) {
      v2.push_back(vertex[k]);
      f2.push_back(value[k]);
    }
    vertex.swap(v2);
    value.swap(f2);
  };

  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    sort_simplex();
    double spread = 0.0;
    for (Eigen::Index i = 1; i <= dim; ++i)
      spread = std::max(spread, (vertex[i] - vertex[0]).cwiseAbs().maxCoeff());
    if (spread < opt.tolerance)
      break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      centroid += vertex[i];
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd& worst = vertex[dim];
    const Eigen::VectorXd reflected = centroid + opt.reflection * (centroid - worst);
    const double f_reflected = eval(reflected);

    if (f_reflected < value[0]) {
      const Eigen::VectorXd expanded = centroid + opt.expansion * (reflected - centroid);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        vertex[dim] = expanded;
        value[dim] = f_expanded;
      } else {
        vertex[dim] = reflected;
        value[dim] = f_reflected;
      }
      continue;
    }
    if (f_reflected < value[dim - 1]) {
      vertex[dim] = reflected;
      value[dim] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < value[dim];
    const Eigen::VectorXd contracted =
      outside ? Eigen::VectorXd(centroid + opt.contraction * (reflected - centroid))
              : Eigen::VectorXd(centroid + opt.contraction * (worst - centroid));
    const double f_contracted = eval(contracted);
    if (outside ? f_contracted <= f_reflected : f_contracted < value[dim]) {
      vertex[dim] = contracted;
      value[dim] = f_contracted;
      continue;
    }

    for (Eigen::Index i = 1; i <= dim; ++i) {
      vertex[i] = vertex[0] + opt.shrink * (vertex[i] - vertex[0]);
      value[i] = eval(vertex[i]);
    }
  }
  sort_simplex();
  return { vertex[0], value[0], iter, evaluations };
}

} // namespace tvkde
