#include "critwave/nonlinearity.hpp"

#include "critwave/quadrature.hpp"

namespace critwave {

double ground_state_residual(double r) {
  if (!(r > 0.0)) throw DomainError("ground_state_residual: r must be > 0");
  const auto w = ground_state(r);
  return -ground_state_d2(r) - 4.0 / r * w.dr - F(w.value);
}

namespace {

// ρ⁴|W'|² ~ ρ^{-4} and ρ⁴ W^{10/3} ~ ρ^{-6} at infinity.
quad::Integrand weighted(double lambda, bool gradient) {
  quad::Integrand h;
  h.lo = 0.0;
  h.hint = quad::Smoothness::decaying_tail;
  h.decay_exponent = gradient ? 4.0 : 6.0;
  h.eval = [lambda, gradient](double rho) {
    const auto w = ground_state(rho, lambda);
    const double r4 = rho * rho * rho * rho;
    return gradient ? w.dr * w.dr * r4 : abs_pow_10_3(w.value) * r4;
  };
  return h;
}

}  // namespace

double ground_state_gradient_norm_sq(double lambda, double tol) {
  return sigma4<> * quad::integrate_tail(weighted(lambda, true), 0.0, tol);
}

double ground_state_potential_integral(double lambda, double tol) {
  return sigma4<> * quad::integrate_tail(weighted(lambda, false), 0.0, tol);
}

double ground_state_energy(double lambda, double tol) {
  return 0.5 * ground_state_gradient_norm_sq(lambda, tol) -
         0.3 * ground_state_potential_integral(lambda, tol);
}

}  // namespace critwave
