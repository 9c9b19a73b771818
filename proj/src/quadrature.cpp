#include "critwave/quadrature.hpp"

namespace critwave::quad {

double integrate_adaptive(const Integrand& f, double a, double b, double tol,
                          const Options& opt) {
  if (!(a < b)) throw DomainError("integrate_adaptive: need a < b");
  if (a < f.lo || b > f.hi)
    throw DomainError("integrate_adaptive: [a,b] outside integrand domain");
  auto fn = [&f](double x) { return f.eval(x); };
  return integrate_adaptive(fn, a, b, tol, f.breakpoints, opt);
}

double integrate_sqrt_singular(const Integrand& f, double a, double b,
                               double tol, const Options& opt) {
  if (!(tol > 0.0)) throw DomainError("integrate_sqrt_singular: tol must be > 0");
  if (b > 1.0) throw DomainError("integrate_sqrt_singular: b must be <= 1");
  if (!(a < b)) throw DomainError("integrate_sqrt_singular: need a < b");
  const double tau_lo = std::sqrt(1.0 - b);
  const double tau_hi = std::sqrt(1.0 - a);
  std::vector<double> breaks;
  for (double y : f.breakpoints)
    if (y > a && y < b) breaks.push_back(std::sqrt(1.0 - y));
  auto g = [&f](double tau) { return 2.0 * f.eval(1.0 - tau * tau); };
  return integrate_adaptive(g, tau_lo, tau_hi, tol, breaks, opt);
}

double integrate_tail(const Integrand& f, double a, double tol,
                      const Options& opt) {
  if (!(tol > 0.0)) throw DomainError("integrate_tail: tol must be > 0");
  auto fn = [&f](double x) { return f.eval(x); };
  if (f.support_end) {
    if (a >= *f.support_end) return 0.0;
    return integrate_adaptive(fn, a, *f.support_end, tol, f.breakpoints, opt);
  }
  if (!f.decay_exponent)
    throw DomainError(
        "integrate_tail: integrand declares neither compact support nor decay");
  if (!(*f.decay_exponent > 1.0))
    throw DomainError("integrate_tail: declared decay exponent must exceed 1");

  // First chunk reaches past every declared breakpoint.
  double cut = std::max({a + 1.0, 2.0 * std::abs(a)});
  for (double x : f.breakpoints) cut = std::max(cut, x + 1.0);
  const double chunk_tol = 0.25 * tol;
  double total = integrate_adaptive(fn, a, cut, chunk_tol, f.breakpoints, opt);
  int quiet = 0;
  for (int k = 0; k < 200; ++k) {
    const double piece = integrate_adaptive(fn, cut, 2.0 * cut,
                                            chunk_tol * std::pow(0.5, k + 1),
                                            {}, opt);
    total += piece;
    cut *= 2.0;
    // Two successive small chunks guard against a sign change inside one.
    quiet = std::abs(piece) < tol ? quiet + 1 : 0;
    if (quiet >= 2) return total;
  }
  throw ConvergenceError("integrate_tail: cutoff doubling did not settle",
                         total, std::abs(total));
}

}  // namespace critwave::quad
