#include "oracles.hpp"

#include "tvkde/divergence.hpp"
#include "tvkde/errors.hpp"

#include <doctest.h>

using namespace tvkde;

namespace {

GriddedDistribution
normal_on(const EvalGrid& grid, double mean, double sd = 1.0)
{
  Eigen::VectorXd pdf(grid.size()), cdf(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double u = (grid[i] - mean) / sd;
    pdf[i] = oracle::normal_pdf(u) / sd;
    cdf[i] = oracle::normal_cdf(u);
  }
  return GriddedDistribution(grid, pdf, cdf);
}

// Triangular density on [a, a + 1].
GriddedDistribution
triangle_on(const EvalGrid& grid, double a)
{
  Eigen::VectorXd pdf(grid.size()), cdf(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double u = grid[i] - a;
    if (u <= 0.0) {
      pdf[i] = 0.0;
      cdf[i] = 0.0;
    } else if (u < 0.5) {
      pdf[i] = 4.0 * u;
      cdf[i] = 2.0 * u * u;
    } else if (u < 1.0) {
      pdf[i] = 4.0 * (1.0 - u);
      cdf[i] = 1.0 - 2.0 * (1.0 - u) * (1.0 - u);
    } else {
      pdf[i] = 0.0;
      cdf[i] = 1.0;
    }
  }
  return GriddedDistribution(grid, pdf, cdf);
}

} // namespace

TEST_SUITE("divergence")
{
  TEST_CASE("closed forms for two unit normals")
  {
    const auto grid = EvalGrid::linspace(-12.0, 13.0, 20001);
    const auto a = normal_on(grid, 0.0);
    const auto b = normal_on(grid, 1.0);
    CHECK(ks_distance(a, b) == doctest::Approx(2.0 * oracle::normal_cdf(0.5) - 1.0).epsilon(1e-6));
    CHECK(hellinger(a, b) == doctest::Approx(std::sqrt(1.0 - std::exp(-0.125))).epsilon(1e-6));
    CHECK(wasserstein1(a, b) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(kl_divergence(a, b) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(kl_divergence(b, a) == doctest::Approx(0.5).epsilon(1e-6));
  }

  TEST_CASE("identity and non-negativity")
  {
    const auto grid = EvalGrid::linspace(-10.0, 10.0, 4001);
    const auto a = normal_on(grid, 0.3, 1.2);
    for (auto kind : all_divergence_kinds)
      CHECK(divergence(kind, a, a) == 0.0);
    const auto b = normal_on(grid, -0.4, 0.8);
    for (auto kind : all_divergence_kinds)
      CHECK(divergence(kind, a, b) > 0.0);
  }

  TEST_CASE("symmetry and asymmetry")
  {
    const auto grid = EvalGrid::linspace(-15.0, 15.0, 8001);
    const auto a = normal_on(grid, 0.0, 1.0);
    const auto b = normal_on(grid, 0.0, 1.5);
    CHECK(ks_distance(a, b) == doctest::Approx(ks_distance(b, a)).epsilon(1e-14));
    CHECK(hellinger(a, b) == doctest::Approx(hellinger(b, a)).epsilon(1e-14));
    CHECK(wasserstein1(a, b) == doctest::Approx(wasserstein1(b, a)).epsilon(1e-14));
    // KL(N(0,s1^2) || N(0,s2^2)) = log(s2 / s1) + s1^2 / (2 s2^2) - 1/2.
    CHECK(kl_divergence(a, b) == doctest::Approx(std::log(1.5) + 1.0 / 4.5 - 0.5).epsilon(1e-6));
    CHECK(kl_divergence(b, a) == doctest::Approx(-std::log(1.5) + 1.125 - 0.5).epsilon(1e-3));
    CHECK(kl_divergence(a, b) != doctest::Approx(kl_divergence(b, a)));
  }

  TEST_CASE("disjoint supports")
  {
    const auto grid = EvalGrid::linspace(-1.0, 4.0, 5001);
    const auto a = triangle_on(grid, 0.0);
    const auto b = triangle_on(grid, 2.0);
    CHECK(ks_distance(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hellinger(a, b) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(wasserstein1(a, b) == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(kl_divergence(a, b) > 25.0);
  }

  TEST_CASE("translation invariance")
  {
    const double shift = 7.25;
    const auto g = EvalGrid::linspace(-10.0, 10.0, 4001);
    const EvalGrid moved(g.points().array() + shift);
    const auto a = normal_on(g, 0.0, 1.0);
    const auto b = normal_on(g, 0.5, 1.5);
    const auto c = normal_on(moved, shift, 1.0);
    const auto d = normal_on(moved, 0.5 + shift, 1.5);
    for (auto kind : all_divergence_kinds)
      CHECK(divergence(kind, c, d) == doctest::Approx(divergence(kind, a, b)).epsilon(1e-8));
  }

  TEST_CASE("grid refinement converges")
  {
    double previous = 0.0;
    for (Eigen::Index points : { 501, 1001, 2001, 4001 }) {
      const auto g = EvalGrid::linspace(-12.0, 13.0, points);
      const double h = hellinger(normal_on(g, 0.0), normal_on(g, 1.0));
      if (points > 501)
        CHECK(std::abs(h - previous) < 1e-4);
      previous = h;
    }
  }

  TEST_CASE("tail outlier moves W1 far more than KS")
  {
    const auto grid = EvalGrid::linspace(-10.0, 110.0, 120001);
    const auto base = normal_on(grid, 0.0);
    const auto far = normal_on(grid, 100.0);
    const Eigen::VectorXd pdf = 0.99 * base.pdf() + 0.01 * far.pdf();
    const Eigen::VectorXd cdf = 0.99 * base.cdf() + 0.01 * far.cdf();
    const GriddedDistribution mixed(grid, pdf, cdf);
    CHECK(ks_distance(base, mixed) == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(wasserstein1(base, mixed) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(wasserstein1(base, mixed) / ks_distance(base, mixed) > 50.0);
  }

  TEST_CASE("grids must match")
  {
    const auto a = normal_on(EvalGrid::linspace(-5.0, 5.0, 101), 0.0);
    const auto b = normal_on(EvalGrid::linspace(-5.0, 5.0, 102), 0.0);
    CHECK_THROWS_AS(hellinger(a, b), GridError);
    CHECK_THROWS_AS(parse_divergence("tv"), ParameterError);
    CHECK(parse_divergence("wasserstein") == DivergenceKind::Wasserstein1);
  }

  TEST_CASE("divergence series")
  {
    std::mt19937_64 gen(4);
    auto x = oracle::normal_sample(gen, 400);
    for (std::size_t i = 300; i < 320; ++i)
      x[i] = (i % 2 == 0 ? 8.0 : -8.0);
    const auto series = divergence_series(x, 200, 0.4, 0.95, KernelSpec::epanechnikov(),
                                          all_divergence_kinds);
    REQUIRE(series.size() == 4);
    for (const auto& s : series) {
      CHECK(s.reference_index == 200);
      CHECK(s.values.size() == 201);
      CHECK(s.values[0] == 0.0);
      CHECK(s.values.minCoeff() >= 0.0);
      const auto peak = peak_date(s);
      CHECK(peak.time_index >= 300);
      CHECK(peak.time_index <= 340);
      CHECK(peak.value == s.values.maxCoeff());
    }

    const auto grid = series_grid(x, 0.4);
    CHECK(grid.front() == doctest::Approx(-8.0 - 2.0));
    CHECK(grid.back() == doctest::Approx(8.0 + 2.0));
    CHECK((grid.back() - grid.front()) / static_cast<double>(grid.size() - 1) <= 0.1);

    // Direct evaluation of the density at the last date on the same grid.
    const std::span<const double> all(x);
    DynamicDensity d(all.first(200), 0.4, 0.95);
    const auto ref = evaluate_on_grid(d, grid);
    for (std::size_t t = 200; t < x.size(); ++t)
      d.update(x[t]);
    const auto last = evaluate_on_grid(d, grid);
    CHECK(series[1].values[200] == doctest::Approx(hellinger(last, ref)).epsilon(1e-9));
  }

  TEST_CASE("peak ties resolve to the earliest date")
  {
    DivergenceSeries s{ DivergenceKind::KS, 10, Eigen::VectorXd(5) };
    s.values << 0.0, 0.3, 0.7, 0.7, 0.1;
    const auto p = peak_date(s);
    CHECK(p.offset == 2);
    CHECK(p.time_index == 12);
    s.values.resize(0);
    CHECK_THROWS_AS(peak_date(s), DataError);
  }
}
