#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "nrsense/errors.hpp"
#include "nrsense/quadrature.hpp"

using namespace nrsense;

TEST_CASE("Kronrod rule is exact for polynomials up to degree 22") {
  const auto r = gauss_kronrod15([](double x) { return std::pow(x, 22); }, 0.0, 1.0);
  CHECK(r.value == Catch::Approx(1.0 / 23.0).epsilon(1e-14));
  const auto cubic = gauss_kronrod15([](double x) { return x * x * x - 2.0 * x; }, -1.0, 3.0);
  CHECK(cubic.value == Catch::Approx(12.0).epsilon(1e-14));
  CHECK(cubic.abs_error < 1e-12);
}

TEST_CASE("adaptive integration of smooth and peaked integrands") {
  QuadratureOptions opts;
  opts.abs_tol = 1e-13;
  const auto sine = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, opts);
  CHECK(sine.converged);
  CHECK(sine.value == Catch::Approx(2.0).epsilon(1e-13));

  const auto peak = integrate_adaptive([](double x) { return 1e-4 / (x * x + 1e-8); }, -1.0, 1.0, opts);
  CHECK(peak.converged);
  CHECK(peak.value == Catch::Approx(2.0 * std::atan(1e4)).epsilon(1e-12));
}

TEST_CASE("integrable endpoint singularity") {
  QuadratureOptions opts;
  opts.abs_tol = 1e-10;
  const auto r = integrate_adaptive([](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0, 1.0, opts);
  CHECK(r.converged);
  CHECK(r.value == Catch::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("relative tolerance on a tiny integral") {
  QuadratureOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-12;
  const auto r = integrate_adaptive([](double x) { return 1e-200 * std::exp(-x); }, 0.0, 50.0, opts);
  CHECK(r.converged);
  CHECK(r.value == Catch::Approx(1e-200 * (1.0 - std::exp(-50.0))).epsilon(1e-12));
}

TEST_CASE("budget exhaustion is reported, not hidden") {
  QuadratureOptions opts;
  opts.abs_tol = 1e-15;
  opts.max_subdivisions = 3;
  const auto r = integrate_adaptive([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, opts);
  CHECK_FALSE(r.converged);
}

TEST_CASE("invalid intervals") {
  CHECK_THROWS_AS(integrate_adaptive([](double) { return 1.0; }, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(integrate_adaptive([](double) { return 1.0; }, 0.0, INFINITY), DomainError);
  QuadratureOptions opts;
  opts.initial_panels = 0;
  CHECK_THROWS_AS(integrate_adaptive([](double) { return 1.0; }, 0.0, 1.0, opts), DomainError);
}
