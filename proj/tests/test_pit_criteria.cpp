#include "oracles.hpp"

#include "tvkde/errors.hpp"
#include "tvkde/pit_criteria.hpp"

#include <doctest.h>

#include <numeric>

using namespace tvkde;

namespace {

Eigen::VectorXd
vec(const std::vector<double>& v)
{
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Quantized uniforms produce ties, which exercise the "<=" handling.
std::vector<double>
pit_sample(std::mt19937_64& gen, std::size_t n, bool with_ties)
{
  auto z = oracle::uniform_sample(gen, n);
  if (with_ties)
    for (auto& v : z)
      v = std::round(v * 20.0) / 20.0;
  return z;
}

} // namespace

TEST_SUITE("pit_criteria")
{
  TEST_CASE("uniformity statistic examples")
  {
    CHECK(ks_uniform(vec({ 0.25, 0.5, 0.75 })) == doctest::Approx(0.0));
    CHECK(ks_uniform(vec({ 0.9 })) == doctest::Approx(0.4));
    CHECK(ks_uniform(vec(std::vector<double>(9, 1.0))) == doctest::Approx(0.1));
    CHECK(ks_uniform(vec({ 0.9 }), KsNormalization::Ecdf) == doctest::Approx(0.1));
    CHECK_THROWS_AS(ks_uniform(Eigen::VectorXd(0)), DataError);
  }

  TEST_CASE("statistics match the brute-force loops")
  {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 60; ++trial) {
      const auto n = static_cast<std::size_t>(30 + trial * 2);
      const auto z = pit_sample(gen, n, trial % 3 == 0);
      const bool ecdf = trial % 4 == 1;
      const auto norm = ecdf ? KsNormalization::Ecdf : KsNormalization::AsPrinted;
      CHECK(ks_uniform(vec(z), norm) == oracle::ks_brute(z, ecdf));
      for (int tau : { 1, 5, 22 })
        CHECK(ks_lagged(vec(z), tau, norm) == oracle::ks_lagged_brute(z, tau, ecdf));
      CriterionConfig cfg{ 22, CriterionVariant::DNu, norm };
      CHECK(d_nu(vec(z), cfg) == oracle::d_nu_brute(z, 22, ecdf));
      if (n <= 60) {
        cfg.nu = 10;
        CHECK(d_nu_alt(vec(z), cfg) == oracle::d_nu_alt_brute(z, 10, ecdf));
      }
    }
  }

  TEST_CASE("lagged statistic examples")
  {
    const std::vector<double> pair{ 0.3, 0.6 };
    // One pair: indicator sum 1, divisor 2.
    CHECK(ks_lagged(vec(pair), 1) == doctest::Approx(std::abs(0.3 * 0.6 - 0.5)));

    std::vector<double> comonotone(100);
    for (std::size_t i = 0; i < 100; ++i)
      comonotone[i] = (static_cast<double>(i % 50) + 0.5) / 50.0;
    CHECK(ks_lagged(vec(comonotone), 50) > 0.2);

    std::mt19937_64 gen(3);
    const auto iid = oracle::uniform_sample(gen, 2000);
    CHECK(ks_lagged(vec(iid), 1) <= 3.0 / std::sqrt(2000.0));

    CHECK_THROWS_AS(ks_lagged(vec(pair), 0), DomainError);
    CHECK_THROWS_AS(ks_lagged(vec(pair), 2), DomainError);
  }

  TEST_CASE("d_nu properties")
  {
    std::mt19937_64 gen(5);
    const auto z = oracle::uniform_sample(gen, 200);
    const double root_n = std::sqrt(200.0);
    CriterionConfig cfg;
    cfg.nu = 0;
    CHECK(d_nu(vec(z), cfg) == doctest::Approx(root_n * ks_uniform(vec(z))));
    cfg.nu = 22;
    CHECK(d_nu(vec(z), cfg) >= root_n * ks_uniform(vec(z)));
    CHECK(d_nu(vec(z), cfg) <= root_n);

    auto increasing = z;
    std::sort(increasing.begin(), increasing.end());
    auto shuffled = increasing;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    CHECK(d_nu(vec(increasing), cfg) > d_nu(vec(shuffled), cfg));
    CHECK(ks_uniform(vec(increasing)) == ks_uniform(vec(shuffled)));
    CHECK(ks_lagged(vec(increasing), 1) != ks_lagged(vec(shuffled), 1));

    CHECK_THROWS_AS(d_nu(vec(std::vector<double>(22, 0.5)), cfg), DomainError);
  }

  TEST_CASE("d_nu_alt properties")
  {
    std::mt19937_64 gen(8);
    const auto z = oracle::uniform_sample(gen, 80);
    CriterionConfig cfg;
    cfg.nu = 22;
    cfg.variant = CriterionVariant::DNuAlt;
    const double full = std::sqrt(80.0) * ks_uniform(vec(z));
    CHECK(d_nu_alt(vec(z), cfg) >= full);
    cfg.nu = 80;
    CHECK(d_nu_alt(vec(z), cfg) == doctest::Approx(full));

    std::vector<double> regimes(80, 0.9);
    std::fill(regimes.begin() + 40, regimes.end(), 0.1);
    cfg.nu = 22;
    CHECK(d_nu_alt(vec(regimes), cfg) > 1.4 * std::sqrt(80.0) * ks_uniform(vec(regimes)));
    cfg.nu = 81;
    CHECK_THROWS_AS(d_nu_alt(vec(z), cfg), DomainError);
  }

  TEST_CASE("PIT series")
  {
    std::mt19937_64 gen(12);
    const auto x = oracle::normal_sample(gen, 1200);
    const auto pits = compute_pits(x, 200, 0.35, 0.995, KernelSpec::epanechnikov());
    CHECK(pits.size() == 1000);
    CHECK(pits.t0 == 200);
    CHECK(pits.T == 1200);
    CHECK(pits.values.minCoeff() >= 0.0);
    CHECK(pits.values.maxCoeff() <= 1.0);
    // Asymptotic 1% critical value of sqrt(n) * KS is 1.63.
    CHECK(std::sqrt(1000.0) * ks_uniform(pits) < 1.63);

    const std::vector<double> flat(50, 0.7);
    const auto constant = compute_pits(flat, 10, 0.5, 0.9, KernelSpec::epanechnikov());
    for (double v : constant.values)
      CHECK(v == doctest::Approx(0.5));

    // Z_t uses the density through t - 1 only.
    const std::span<const double> all(x);
    DynamicDensity d(all.first(200), 0.35, 0.995);
    CHECK(pits.values[0] == doctest::Approx(d.cdf(x[200])).epsilon(1e-12));
    d.update(x[200]);
    CHECK(pits.values[1] == doctest::Approx(d.cdf(x[201])).epsilon(1e-12));

    const auto fixed = compute_static_pits(x, 200, 0.35, KernelSpec::epanechnikov());
    const StaticDensity s(Eigen::Map<const Eigen::VectorXd>(x.data(), 200), 0.35);
    CHECK(fixed.values[500] == doctest::Approx(static_pdf_cdf(s, x[700]).second).epsilon(1e-12));

    CHECK_THROWS_AS(PitSeries(vec({ 0.2, 1.5 }), 0, 2), InvariantError);
    CHECK_THROWS_AS(PitSeries(vec({ 0.2 }), 0, 2), DataError);
  }
}
