#ifndef CRITWAVE_NONLINEARITY_HPP
#define CRITWAVE_NONLINEARITY_HPP

// Scalar pieces of the 5D focusing energy-critical problem: the power
// nonlinearity F, the characteristic weight g, the ground state W and the
// constants built from them.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "critwave/errors.hpp"

namespace critwave {

/// Area of the unit sphere S^4.
template <typename Scalar = double>
inline constexpr Scalar sigma4 = Scalar(8) * std::numbers::pi_v<Scalar> *
                                 std::numbers::pi_v<Scalar> / Scalar(3);

/// F(u) = |u|^{4/3} u.
template <typename Scalar>
Scalar F(Scalar u) {
  using std::abs;
  using std::cbrt;
  const Scalar c = cbrt(abs(u));
  return c * c * c * c * u;
}

/// |u|^{10/3}, the potential density up to the factor 3/10.
template <typename Scalar>
Scalar abs_pow_10_3(Scalar u) {
  using std::abs;
  using std::cbrt;
  const Scalar a = abs(u);
  const Scalar c = cbrt(a);
  return a * a * a * c;
}

/// g(z) = 2z - |z|^{4/3} z.
template <typename Scalar>
Scalar g(Scalar z) {
  return Scalar(2) * z - F(z);
}

/// g'(z) = 2 - (7/3)|z|^{4/3}.
template <typename Scalar>
Scalar g_prime(Scalar z) {
  using std::abs;
  using std::cbrt;
  const Scalar c = cbrt(abs(z));
  return Scalar(2) - Scalar(7) / Scalar(3) * c * c * c * c;
}

/// Closed-form landmarks of g on (0, ∞).
struct GConstants {
  double z0;     // zero of g: 2^{3/4}
  double z_max;  // argmax: (6/7)^{3/4}
  double g_max;  // (8/7) z_max
};

inline GConstants g_constants() {
  const double z_max = std::pow(6.0 / 7.0, 0.75);
  return {std::pow(2.0, 0.75), z_max, 8.0 / 7.0 * z_max};
}

/// min{g(z_lo), g(z_hi)}: the minimum of g over [z_lo, z_hi] whenever g is
/// unimodal there, which holds for every range used in the Table 1 sweep.
inline double m_k(double z_lo, double z_hi) {
  if (!(z_lo >= 0.0 && z_lo < z_hi))
    throw DomainError("m_k: need 0 <= z_lo < z_hi");
  return std::min(g(z_lo), g(z_hi));
}

/// Value and radial derivative of W_λ(r) = λ^{-3/2} W(r/λ),
/// W(r) = (1 + r²/15)^{-3/2}.
template <typename Scalar>
struct GroundStateValue {
  Scalar value;
  Scalar dr;
};

template <typename Scalar>
GroundStateValue<Scalar> ground_state(Scalar r, Scalar lambda = Scalar(1)) {
  using std::pow;
  using std::sqrt;
  if (!(lambda > Scalar(0))) throw DomainError("ground_state: lambda must be > 0");
  if (r < Scalar(0)) throw DomainError("ground_state: r must be >= 0");
  const Scalar x = r / lambda;
  const Scalar base = Scalar(1) + x * x / Scalar(15);
  const Scalar scale = Scalar(1) / (lambda * sqrt(lambda));
  const Scalar w = pow(base, Scalar(-1.5));
  const Scalar dw = -x / Scalar(5) * pow(base, Scalar(-2.5));
  return {scale * w, scale * dw / lambda};
}

/// W''(r) for λ = 1.
template <typename Scalar>
Scalar ground_state_d2(Scalar r) {
  using std::pow;
  const Scalar q = Scalar(1) + r * r / Scalar(15);
  return -pow(q, Scalar(-2.5)) / Scalar(5) +
         r * r / Scalar(15) * pow(q, Scalar(-3.5));
}

/// -W'' - (4/r) W' - F(W); vanishes identically.
double ground_state_residual(double r);

/// E(W_λ, 0) = σ₄ ∫ (½|W'|² - (3/10) W^{10/3}) ρ⁴ dρ.
double ground_state_energy(double lambda = 1.0, double tol = 1e-12);

/// σ₄ ∫ |∇W_λ|² ρ⁴ dρ and σ₄ ∫ W_λ^{10/3} ρ⁴ dρ.
double ground_state_gradient_norm_sq(double lambda = 1.0, double tol = 1e-12);
double ground_state_potential_integral(double lambda = 1.0, double tol = 1e-12);

}  // namespace critwave

#endif  // CRITWAVE_NONLINEARITY_HPP
