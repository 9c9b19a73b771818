#ifndef CRITWAVE_QUADRATURE_HPP
#define CRITWAVE_QUADRATURE_HPP

// One-dimensional quadrature: adaptive Gauss-Kronrod (7/15) bisection, the
// (1-y)^{-1/2} right-endpoint weight, and half-line tails with an explicit
// decay or support declaration.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "critwave/errors.hpp"

namespace critwave::quad {

enum class Smoothness { smooth, sqrt_singular_right, decaying_tail };

/// A deterministic scalar integrand together with what is known about it.
/// `breakpoints` lists interior points where f or a derivative jumps;
/// integration splits there. Tail integrals need either `support_end`
/// (f vanishes beyond it) or `decay_exponent` p > 1 with |f(r)| <~ r^{-p}.
struct Integrand {
  std::function<double(double)> eval;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  Smoothness hint = Smoothness::smooth;
  std::optional<double> support_end;
  std::optional<double> decay_exponent;
  std::vector<double> breakpoints;

  double operator()(double x) const { return eval(x); }
};

struct Options {
  int max_depth = 60;
  long max_intervals = 2'000'000;
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the Kronrod nodes with odd index (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double kronrod;
  double gauss;
  double abs_kronrod;
};

template <typename F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = kKronrodWeights[7] * fc;
  double g = kGaussWeights[3] * fc;
  double ak = kKronrodWeights[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    k += kKronrodWeights[j] * (f1 + f2);
    ak += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) g += kGaussWeights[j / 2] * (f1 + f2);
  }
  return {k * h, g * h, ak * std::abs(h)};
}

template <typename F>
void bisect(F& f, double a, double b, double density, int depth,
            const Options& opt, long& intervals, Estimate& acc) {
  const Panel p = gk15(f, a, b);
  ++intervals;
  const double err = std::abs(p.kronrod - p.gauss);
  const double local = density * (b - a);
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() *
                       p.abs_kronrod;
  if (err <= std::max(local, floor) || !std::isfinite(err)) {
    acc.value += p.kronrod;
    acc.error += std::min(err, std::max(local, floor));
    if (!std::isfinite(err)) acc.converged = false;
    return;
  }
  if (depth >= opt.max_depth || intervals >= opt.max_intervals) {
    acc.value += p.kronrod;
    acc.error += err;
    acc.converged = false;
    return;
  }
  const double m = 0.5 * (a + b);
  bisect(f, a, m, density, depth + 1, opt, intervals, acc);
  bisect(f, m, b, density, depth + 1, opt, intervals, acc);
}

}  // namespace detail

/// Adaptive estimate without throwing; `converged` reports whether every
/// panel met its share of `tol`.
template <typename F>
Estimate estimate_adaptive(F&& f, double a, double b, double tol,
                           const std::vector<double>& breaks = {},
                           const Options& opt = {}) {
  Estimate acc;
  if (a == b) return acc;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::vector<double> cuts{a};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double density = tol / (b - a);
  long intervals = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    detail::bisect(f, cuts[i], cuts[i + 1], density, 0, opt, intervals, acc);
  acc.value *= sign;
  return acc;
}

/// ∫_a^b f with |error| <~ tol. Throws ConvergenceError when the
/// subdivision budget is exhausted.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double tol,
                          const std::vector<double>& breaks = {},
                          const Options& opt = {}) {
  if (!(tol > 0.0)) throw DomainError("integrate_adaptive: tol must be > 0");
  if (std::isnan(a) || std::isnan(b) || std::isinf(a) || std::isinf(b))
    throw DomainError("integrate_adaptive: finite limits required");
  const Estimate e = estimate_adaptive(f, a, b, tol, breaks, opt);
  if (!e.converged)
    throw ConvergenceError("integrate_adaptive: subdivision limit reached",
                           e.value, e.error);
  return e.value;
}

double integrate_adaptive(const Integrand& f, double a, double b, double tol,
                          const Options& opt = {});

/// ∫_a^b f(y) (1-y)^{-1/2} dy for b <= 1, computed as
/// ∫ 2 f(1-τ²) dτ over τ ∈ [√(1-b), √(1-a)].
double integrate_sqrt_singular(const Integrand& f, double a, double b,
                               double tol, const Options& opt = {});

/// ∫_a^∞ f. Compact support integrates to `support_end`; otherwise the
/// cutoff doubles until a new chunk contributes less than tol.
double integrate_tail(const Integrand& f, double a, double tol,
                      const Options& opt = {});

/// Convenience: wraps a callable into an Integrand.
template <typename F>
Integrand make_integrand(F&& f) {
  Integrand h;
  h.eval = std::forward<F>(f);
  return h;
}

}  // namespace critwave::quad

#endif  // CRITWAVE_QUADRATURE_HPP
