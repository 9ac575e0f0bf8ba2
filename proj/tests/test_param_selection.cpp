#include "oracles.hpp"

#include "tvkde/errors.hpp"
#include "tvkde/param_selection.hpp"

#include <doctest.h>

#include <limits>

using namespace tvkde;

namespace {

// Volatility switch halfway: a series on which discounting pays off.
std::vector<double>
regime_series(std::uint64_t seed, std::size_t n)
{
  std::mt19937_64 gen(seed);
  auto x = oracle::normal_sample(gen, n);
  for (std::size_t i = n / 2; i < n; ++i)
    x[i] *= 3.0;
  return x;
}

SelectionProblem
small_problem(SelectionCriterion criterion, bool constrained, int nodes)
{
  auto p = make_problem(regime_series(7, 300), 100, criterion, constrained, 5);
  p.search.h_nodes = nodes;
  p.search.omega_nodes = nodes;
  p.search.max_iterations = 60;
  return p;
}

} // namespace

TEST_SUITE("param_selection")
{
  TEST_CASE("default bounds")
  {
    const auto x = regime_series(1, 400);
    const auto p = make_problem(x, 200, SelectionCriterion::PitDNu);
    const double scale = robust_scale(x);
    CHECK(p.h_bounds.lower == doctest::Approx(1e-4 * scale));
    CHECK(p.h_bounds.upper == doctest::Approx(10.0 * scale));
    CHECK(p.omega_bounds.lower == 0.5);
    CHECK(p.omega_bounds.upper == 1.0);
    const auto c = default_omega_bounds(true, 22);
    CHECK(c.lower == doctest::Approx(1.0 - 1.0 / 22));
    CHECK(c.upper == 1.0);
    CHECK_THROWS_AS(robust_scale(std::vector<double>(10, 2.0)), ParameterError);
  }

  TEST_CASE("objective is the PIT criterion of the computed PITs")
  {
    const auto p = small_problem(SelectionCriterion::PitDNu, false, 5);
    const auto pits = compute_pits(p.returns, p.t0, 0.8, 0.97, p.kernel);
    const std::vector<double> z(pits.values.data(), pits.values.data() + pits.size());
    CHECK(objective(p, 0.8, 0.97) == oracle::d_nu_brute(z, 5));
  }

  TEST_CASE("likelihood objective")
  {
    auto p = small_problem(SelectionCriterion::Likelihood, false, 5);
    p.kernel = KernelSpec::gaussian();
    double total = 0.0;
    for (std::size_t s = static_cast<std::size_t>(p.t0); s < p.returns.size(); ++s) {
      const auto ref = oracle::direct_density(p.returns, p.t0, static_cast<long>(s), 0.7, 0.98, true);
      total -= std::log(ref.pdf(p.returns[s]));
    }
    CHECK(objective(p, 0.7, 0.98) == doctest::Approx(total).epsilon(1e-10));

    // A compact kernel assigns zero density to far outliers.
    auto q = small_problem(SelectionCriterion::Likelihood, false, 5);
    q.returns.back() = 1e6;
    CHECK(std::isinf(objective(q, 0.7, 0.98)));
  }

  TEST_CASE("selection stays within bounds and beats its own grid")
  {
    for (auto criterion : { SelectionCriterion::PitDNu, SelectionCriterion::Likelihood }) {
      auto p = small_problem(criterion, false, 5);
      p.kernel = KernelSpec::gaussian();
      const auto r = select(p);
      CHECK(r.h_opt >= p.h_bounds.lower);
      CHECK(r.h_opt <= p.h_bounds.upper);
      CHECK(r.omega_opt >= p.omega_bounds.lower);
      CHECK(r.omega_opt <= p.omega_bounds.upper);
      CHECK(r.evaluations == r.search_trace.size());
      CHECK(objective(p, r.h_opt, r.omega_opt) == r.criterion_value);

      // Exhaustive 5x5 argmin with ties going to the smallest h, then omega.
      double exhaustive = std::numeric_limits<double>::infinity();
      double arg_h = 0.0, arg_omega = 0.0;
      const double ratio = std::log(p.h_bounds.upper / p.h_bounds.lower);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          const double h =
            i == 4 ? p.h_bounds.upper : p.h_bounds.lower * std::exp(ratio * i / 4.0);
          const double omega = 0.5 + 0.5 * j / 4.0;
          const double v = objective(p, h, omega);
          if (v < exhaustive) {
            exhaustive = v;
            arg_h = h;
            arg_omega = omega;
          }
        }
      REQUIRE(r.search_trace.size() >= 25);
      const auto stage1 = std::min_element(
        r.search_trace.begin(), r.search_trace.begin() + 25,
        [](const TracePoint& a, const TracePoint& b) { return a.value < b.value; });
      CHECK(stage1->value == doctest::Approx(exhaustive).epsilon(1e-12));
      CHECK(stage1->h == doctest::Approx(arg_h).epsilon(1e-12));
      CHECK(stage1->omega == arg_omega);
      CHECK(r.criterion_value <= exhaustive);
      for (const auto& tp : r.search_trace)
        CHECK(r.criterion_value <= tp.value);
    }
  }

  TEST_CASE("constrained selection")
  {
    const auto free = small_problem(SelectionCriterion::PitDNu, false, 5);
    const auto p = small_problem(SelectionCriterion::PitDNu, true, 5);
    const auto r = select(p);
    CHECK(r.omega_opt > 1.0 - 1.0 / 5);
    CHECK(r.omega_opt <= 1.0);
    // The constrained optimum is a feasible point of the free problem.
    CHECK(objective(free, r.h_opt, r.omega_opt) == r.criterion_value);
    CHECK_THROWS_AS(objective(p, 0.5, 0.7), ParameterError);
    CHECK_THROWS_AS(objective(p, p.h_bounds.upper * 2.0, 0.9), ParameterError);
  }

  TEST_CASE("selection is deterministic")
  {
    const auto p = small_problem(SelectionCriterion::PitDNu, false, 4);
    const auto a = select(p);
    const auto b = select(p);
    CHECK(a.h_opt == b.h_opt);
    CHECK(a.omega_opt == b.omega_opt);
    CHECK(a.criterion_value == b.criterion_value);
    CHECK(a.evaluations == b.evaluations);
  }

  TEST_CASE("static selection")
  {
    auto p = small_problem(SelectionCriterion::PitDNu, false, 9);
    const auto r = select_static(p);
    CHECK(r.static_framework);
    CHECK(r.omega_opt == 1.0);
    CHECK(static_objective(p, r.h_opt) == r.criterion_value);
    const double ratio = std::log(p.h_bounds.upper / p.h_bounds.lower);
    for (int i = 1; i < 8; ++i)
      CHECK(r.criterion_value <= static_objective(p, p.h_bounds.lower * std::exp(ratio * i / 8.0)));
  }

  TEST_CASE("selection errors")
  {
    auto p = small_problem(SelectionCriterion::Likelihood, false, 3);
    p.returns.back() = 1e6;
    CHECK_THROWS_AS(select(p), SelectionError);
    CHECK_THROWS_AS(select_static(p), SelectionError);

    auto short_tail = small_problem(SelectionCriterion::PitDNu, false, 3);
    short_tail.t0 = 296;
    CHECK_THROWS_AS(select(short_tail), InsufficientDataError);

    auto bad_bounds = small_problem(SelectionCriterion::PitDNu, false, 3);
    bad_bounds.h_bounds = { 1.0, 0.5 };
    CHECK_THROWS_AS(select(bad_bounds), ParameterError);
    CHECK_THROWS_AS(parse_criterion("median"), ParameterError);
  }
}
