#include "oracles.hpp"

#include "tvkde/dynamic_density.hpp"
#include "tvkde/errors.hpp"

#include <doctest.h>

#include <limits>

using namespace tvkde;

namespace {

std::vector<double>
draws(std::uint64_t seed, std::size_t n, double sigma = 1.0)
{
  std::mt19937_64 gen(seed);
  return oracle::normal_sample(gen, n, sigma);
}

DynamicDensity
advance(const std::vector<double>& x, long t0, long t, double h, double omega, KernelSpec k)
{
  const std::span<const double> all(x);
  DynamicDensity d(all.first(static_cast<std::size_t>(t0)), h, omega, k);
  for (long s = t0; s < t; ++s)
    d.update(x[static_cast<std::size_t>(s)]);
  return d;
}

} // namespace

TEST_SUITE("dynamic_density")
{
  TEST_CASE("exact initial weights")
  {
    const std::vector<double> four{ 0.1, 0.2, 0.3, 0.4 };
    const auto flat = init_dynamic(four, 1.0, 1.0);
    for (double w : flat.weights())
      CHECK(w == doctest::Approx(0.25).epsilon(1e-15));

    const std::vector<double> three{ 1.0, 2.0, 3.0 };
    const auto d = init_dynamic(three, 1.0, 0.5);
    CHECK(d.weights()[0] == doctest::Approx(1.0 / 7).epsilon(1e-14));
    CHECK(d.weights()[1] == doctest::Approx(2.0 / 7).epsilon(1e-14));
    CHECK(d.weights()[2] == doctest::Approx(4.0 / 7).epsilon(1e-14));
    CHECK(d.time() == 3);

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> om(0.05, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = draws(100 + trial, 2 + trial * 7);
      const auto dd = init_dynamic(x, 0.3, om(gen));
      CHECK(std::abs(dd.weight_sum() - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("parameter and data errors")
  {
    const std::vector<double> x{ 0.0, 1.0, 2.0 };
    CHECK_THROWS_AS(init_dynamic(x, 0.0, 0.9), ParameterError);
    CHECK_THROWS_AS(init_dynamic(x, -1.0, 0.9), ParameterError);
    CHECK_THROWS_AS(init_dynamic(x, 1.0, 0.0), ParameterError);
    CHECK_THROWS_AS(init_dynamic(x, 1.0, 1.01), ParameterError);
    CHECK_THROWS_AS(init_dynamic(std::vector<double>{ 1.0 }, 1.0, 0.9), InsufficientDataError);
    auto d = init_dynamic(x, 1.0, 0.9);
    CHECK_THROWS_AS(d.update(std::numeric_limits<double>::quiet_NaN()), DataError);
  }

  TEST_CASE("recursion equals the closed-form weighted sum")
  {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
      const bool gaussian = trial % 2 == 1;
      const long T = 20 + static_cast<long>(unit(gen) * 480);
      const long t0 = 2 + static_cast<long>(unit(gen) * (T - 2));
      const double h = 0.05 + 2.0 * unit(gen);
      const double omega = trial % 5 == 0 ? 1.0 : 0.5 + 0.5 * unit(gen);
      const auto x = draws(500 + trial, static_cast<std::size_t>(T));
      const auto kernel = gaussian ? KernelSpec::gaussian() : KernelSpec::epanechnikov();
      const auto d = advance(x, t0, T, h, omega, kernel);
      const auto ref = oracle::direct_density(x, t0, T, h, omega, gaussian);
      for (int i = 0; i < 50; ++i) {
        const double at = -4.0 + 8.0 * i / 49.0;
        CHECK(std::abs(d.pdf(at) - ref.pdf(at)) <= 1e-10);
        CHECK(std::abs(d.cdf(at) - ref.cdf(at)) <= 1e-10);
      }
      // Weights grow toward the present within the initial block and
      // within the recursively added block.
      for (long i = 1; i < T; ++i)
        if (i != t0)
          CHECK(d.weights()[i - 1] <= d.weights()[i] * (1.0 + 1e-12));
    }
  }

  TEST_CASE("omega = 1 keeps equal weights")
  {
    const auto x = draws(3, 30);
    const auto d = advance(x, 10, 30, 0.5, 1.0, KernelSpec::epanechnikov());
    for (double w : d.weights())
      CHECK(w == doctest::Approx(1.0 / 30).epsilon(1e-13));
  }

  TEST_CASE("point evaluations")
  {
    const std::vector<double> zeros{ 0.0, 0.0 };
    const auto single = init_dynamic(zeros, 1.0, 0.8);
    CHECK(single.pdf(0.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(single.pdf(1.5) == 0.0);
    CHECK(single.cdf(-1.0) == 0.0);
    CHECK(single.cdf(1.0) == 1.0);

    const std::vector<double> pair{ -1.0, 1.0 };
    CHECK(init_dynamic(pair, 1.0, 1.0).cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));

    const auto x = draws(9, 60);
    const auto d = advance(x, 40, 60, 0.4, 0.93, KernelSpec::epanechnikov());
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> pick(-2.0, 2.0);
    const double step = 1e-6;
    for (int i = 0; i < 20; ++i) {
      const double at = pick(gen);
      const double fd = (d.cdf(at + step) - d.cdf(at - step)) / (2 * step);
      CHECK(std::abs(fd - d.pdf(at)) <= 1e-4);
    }
    std::vector<double> sorted(200);
    for (auto& v : sorted)
      v = pick(gen);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
      CHECK(d.cdf(sorted[i - 1]) <= d.cdf(sorted[i]) + 1e-14);
  }

  TEST_CASE("gaussian log density stays finite far in the tail")
  {
    const auto x = draws(21, 50);
    const auto d = init_dynamic(x, 0.2, 0.95, KernelSpec::gaussian());
    CHECK(d.log_pdf(0.3) == doctest::Approx(std::log(d.pdf(0.3))).epsilon(1e-12));
    CHECK(std::isfinite(d.log_pdf(1e3)));
    CHECK(d.log_pdf(1e3) < -1e6);
    const auto e = init_dynamic(x, 0.2, 0.95, KernelSpec::epanechnikov());
    CHECK(std::isinf(e.log_pdf(1e3)));
  }

  TEST_CASE("static estimator")
  {
    const StaticDensity one(Eigen::VectorXd::Zero(1), 2.0);
    CHECK(static_pdf_cdf(one, 0.0).first == doctest::Approx(0.375).epsilon(1e-15));

    const auto x = draws(31, 100);
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), 100);
    for (const auto& k : { KernelSpec::epanechnikov(), KernelSpec::gaussian() }) {
      const StaticDensity s(xv, 0.5, k);
      const auto d = init_dynamic(x, 0.5, 1.0, k);
      for (double at = -3.0; at <= 3.0; at += 0.1) {
        const auto [p, c] = static_pdf_cdf(s, at);
        CHECK(std::abs(p - d.pdf(at)) <= 1e-12);
        CHECK(std::abs(c - d.cdf(at)) <= 1e-12);
      }
      const auto g = evaluate_on_grid(s, default_grid(xv, 0.5));
      CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-3));
    }
    CHECK_THROWS_AS(StaticDensity(Eigen::VectorXd(0), 1.0), InsufficientDataError);
    CHECK_THROWS_AS(StaticDensity(Eigen::VectorXd::Zero(3), 0.0), ParameterError);
  }

  TEST_CASE("grid evaluation")
  {
    const auto x = draws(41, 80);
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), 80);
    for (const auto& k : { KernelSpec::epanechnikov(), KernelSpec::gaussian() }) {
      const auto d = advance(x, 50, 80, 0.3, 0.9, k);
      const auto grid = default_grid(xv, 0.3);
      const auto g = evaluate_on_grid(d, grid);
      CHECK(g.cdf()[g.cdf().size() - 1] >= g.cdf()[0]);
      CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-3));
      const auto cum = cumulative_trapezoid(grid.points(), g.pdf());
      CHECK((cum - g.cdf()).cwiseAbs().maxCoeff() <= 2e-3);
      for (Eigen::Index i = 0; i < grid.size(); i += 97) {
        CHECK(std::abs(g.pdf()[i] - d.pdf(grid[i])) <= 1e-12);
        CHECK(std::abs(g.cdf()[i] - d.cdf(grid[i])) <= 1e-12);
      }
    }
  }

  TEST_CASE("grid validation")
  {
    Eigen::VectorXd bad(3);
    bad << 0.0, 2.0, 1.0;
    CHECK_THROWS_AS(EvalGrid{ bad }, GridError);
    CHECK_THROWS_AS(EvalGrid{ Eigen::VectorXd::Zero(1) }, GridError);
    CHECK_THROWS_AS(EvalGrid::linspace(1.0, 0.0, 10), GridError);
  }

  TEST_CASE("affine equivariance")
  {
    const auto x = draws(51, 120);
    const double a = 3.5;
    const double b = -2.0;
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [&](double v) { return a * v + b; });
    for (const auto& k : { KernelSpec::epanechnikov(), KernelSpec::gaussian() }) {
      const auto d = advance(x, 60, 120, 0.4, 0.97, k);
      const auto e = advance(y, 60, 120, a * 0.4, 0.97, k);
      for (double at = -3.0; at <= 3.0; at += 0.05) {
        CHECK(std::abs(e.pdf(a * at + b) - d.pdf(at) / a) <= 1e-10);
        CHECK(std::abs(e.cdf(a * at + b) - d.cdf(at)) <= 1e-10);
      }
    }
  }

  TEST_CASE("one update moves the cdf by at most 1 - omega")
  {
    const auto x = draws(61, 40);
    for (double omega : { 0.5, 0.9, 0.99 }) {
      auto d = init_dynamic(x, 0.3, omega);
      std::vector<double> before;
      for (double at = -4.0; at <= 4.0; at += 0.01)
        before.push_back(d.cdf(at));
      d.update(3.0);
      std::size_t i = 0;
      for (double at = -4.0; at <= 4.0; at += 0.01)
        CHECK(std::abs(d.cdf(at) - before[i++]) <= (1.0 - omega) + 1e-14);
    }
  }

  TEST_CASE("gridded track follows the recursion")
  {
    const auto x = draws(71, 300);
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), 300);
    for (const auto& k : { KernelSpec::epanechnikov(), KernelSpec::gaussian() }) {
      for (double omega : { 0.9, 1.0 }) {
        const std::span<const double> all(x);
        DynamicDensity d(all.first(100), 0.25, omega, k);
        const auto grid = default_grid(xv, 0.25, 1024);
        GriddedTrack track(d, grid);
        for (long t = 100; t < 300; ++t) {
          d.update(x[static_cast<std::size_t>(t)]);
          track.update(x[static_cast<std::size_t>(t)]);
        }
        const auto direct = evaluate_on_grid(d, grid);
        CHECK(track.time() == d.time());
        CHECK((track.current().pdf() - direct.pdf()).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((track.current().cdf() - direct.cdf()).cwiseAbs().maxCoeff() <= 1e-10);
      }
    }
  }

  TEST_CASE("pruning drops negligible weights only")
  {
    const auto x = draws(81, 400);
    const std::span<const double> all(x);
    DensityOptions opt;
    opt.prune = true;
    DynamicDensity pruned(all.first(20), 0.3, 0.8, KernelSpec::epanechnikov(), opt);
    DynamicDensity full(all.first(20), 0.3, 0.8);
    for (std::size_t t = 20; t < x.size(); ++t) {
      pruned.update(x[t]);
      full.update(x[t]);
    }
    CHECK(pruned.observations().size() < full.observations().size());
    for (double at = -3.0; at <= 3.0; at += 0.1)
      CHECK(std::abs(pruned.cdf(at) - full.cdf(at)) <= 1e-12);
  }
}
