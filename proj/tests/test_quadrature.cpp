#include <doctest.h>

#include <cmath>

#include "critwave/errors.hpp"
#include "critwave/nonlinearity.hpp"
#include "critwave/quadrature.hpp"
#include "generators.hpp"

using namespace critwave;

TEST_CASE("adaptive: constants and polynomials") {
  CHECK(quad::integrate_adaptive([](double) { return 1.0; }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(quad::integrate_adaptive([](double y) { return y * y; }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("adaptive: W^{10/3} moment is stable under domain doubling") {
  auto f = [](double r) {
    const double w = ground_state(r).value;
    return std::pow(r, 4) * abs_pow_10_3(w);
  };
  // The tail beyond 200 is about 1.4e-8 relative, so compare 400 with 800.
  const double a = quad::integrate_adaptive(f, 0.0, 400.0, 1e-12);
  const double b = quad::integrate_adaptive(f, 0.0, 800.0, 1e-12);
  CHECK(std::abs(a - b) / b < 1e-8);
}

TEST_CASE("adaptive: breakpoints and reversed limits") {
  auto step = [](double x) { return x < 0.3 ? 1.0 : 2.0; };
  CHECK(quad::integrate_adaptive(step, 0.0, 1.0, 1e-12, {0.3}) ==
        doctest::Approx(0.3 + 1.4).epsilon(1e-13));
  CHECK(quad::integrate_adaptive([](double x) { return x; }, 1.0, 0.0, 1e-12) ==
        doctest::Approx(-0.5));
}

TEST_CASE("adaptive: rejects bad input and reports non-convergence") {
  CHECK_THROWS_AS(quad::integrate_adaptive([](double) { return 1.0; }, 0.0, 1.0, 0.0),
                  DomainError);
  CHECK_THROWS_AS(quad::integrate_adaptive([](double) { return 1.0; }, 0.0,
                                           std::numeric_limits<double>::infinity(), 1e-8),
                  DomainError);
  quad::Options tight;
  tight.max_depth = 3;
  try {
    quad::integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-14,
                             {}, tight);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.estimate() > 1.0);
    CHECK(e.error_bound() > 0.0);
  }
}

TEST_CASE("sqrt-singular weight") {
  quad::Integrand one = quad::make_integrand([](double) { return 1.0; });
  CHECK(quad::integrate_sqrt_singular(one, 0.0, 1.0, 1e-12) ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK_THROWS_AS(quad::integrate_sqrt_singular(one, 0.0, 1.1, 1e-12), DomainError);

  // Agreement with the plain rule on [a, b - ε] plus the analytic remainder
  // for a smooth f: ∫_{b-ε}^{b} f (1-y)^{-1/2} ≈ f(b) · 2(√(1-b+ε) - √(1-b)).
  quad::Integrand f = quad::make_integrand([](double y) { return std::cos(y); });
  const double b = 0.9, eps = 1e-6;
  const double plain = quad::integrate_adaptive(
      [](double y) { return std::cos(y) / std::sqrt(1.0 - y); }, 0.0, b - eps, 1e-13);
  const double rem = std::cos(b) * 2.0 * (std::sqrt(1.0 - b + eps) - std::sqrt(1.0 - b));
  CHECK(std::abs(quad::integrate_sqrt_singular(f, 0.0, b, 1e-12) - (plain + rem)) < 1e-10);
}

TEST_CASE("tail integrals") {
  quad::Integrand zero = quad::make_integrand([](double) { return 0.0; });
  zero.decay_exponent = 2.0;
  CHECK(quad::integrate_tail(zero, 0.0, 1e-12) == 0.0);

  quad::Integrand box = quad::make_integrand([](double r) { return r >= 1 && r <= 2 ? r : 0.0; });
  box.support_end = 2.0;
  box.breakpoints = {1.0};
  CHECK(quad::integrate_tail(box, 0.0, 1e-12) == doctest::Approx(1.5).epsilon(1e-13));

  quad::Integrand cube = quad::make_integrand([](double r) { return std::pow(r, -3); });
  cube.decay_exponent = 3.0;
  CHECK(quad::integrate_tail(cube, 1.0, 1e-12) == doctest::Approx(0.5).epsilon(1e-10));

  quad::Integrand slow = quad::make_integrand([](double r) { return 1.0 / r; });
  slow.decay_exponent = 1.0;
  CHECK_THROWS_AS(quad::integrate_tail(slow, 1.0, 1e-8), DomainError);
  quad::Integrand undeclared = quad::make_integrand([](double r) { return std::exp(-r); });
  CHECK_THROWS_AS(quad::integrate_tail(undeclared, 0.0, 1e-8), DomainError);
}

TEST_CASE("property: linearity on random polynomial pairs") {
  gen::Source src(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = src.polynomial(6), q = src.polynomial(6);
    const double alpha = src.uniform(-3, 3), beta = src.uniform(-3, 3);
    const double a = src.uniform(-2, 0), b = src.uniform(0.1, 2);
    const double tol = 1e-11;
    auto fp = [&](double x) { return gen::eval_poly(p, x); };
    auto fq = [&](double x) { return gen::eval_poly(q, x); };
    auto comb = [&](double x) { return alpha * fp(x) + beta * fq(x); };
    const double lhs = quad::integrate_adaptive(comb, a, b, tol);
    const double rhs = alpha * quad::integrate_adaptive(fp, a, b, tol) +
                       beta * quad::integrate_adaptive(fq, a, b, tol);
    CHECK(std::abs(lhs - rhs) <= 2.0 * tol * (1.0 + std::abs(alpha) + std::abs(beta)));
  }
}

TEST_CASE("property: determinism") {
  auto f = [](double x) { return std::sin(7 * x) * std::exp(-x); };
  const double a = quad::integrate_adaptive(f, 0.0, 5.0, 1e-12);
  const double b = quad::integrate_adaptive(f, 0.0, 5.0, 1e-12);
  CHECK(a == b);
}
