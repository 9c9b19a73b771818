#include "critwave/radiation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "critwave/errors.hpp"
#include "critwave/nonlinearity.hpp"
#include "critwave/quadrature.hpp"

namespace critwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ∫_a^∞ f where |f(x)| <~ x^{-p}; a may be negative, the tail rule starts
// at max(a, cut) after every breakpoint.
double half_line(const std::function<double(double)>& f, double a, double p,
                 const std::vector<double>& breaks, double tol) {
  double cut = std::max(a, 1.0);
  for (double b : breaks) cut = std::max(cut, b);
  double total = 0.0;
  if (cut > a) total += quad::integrate_adaptive(f, a, cut, 0.5 * tol, breaks);
  quad::Integrand h;
  h.eval = f;
  h.decay_exponent = p;
  h.hint = quad::Smoothness::decaying_tail;
  total += quad::integrate_tail(h, cut, 0.5 * tol);
  return total;
}

std::vector<double> negated(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(-x);
  return out;
}

std::vector<double> radial_breaks(const std::vector<double>& s_breaks) {
  std::vector<double> out;
  for (double s : s_breaks)
    if (s != 0.0) out.push_back(std::abs(s));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

struct RadiationProfile::NormCache {
  std::once_flag once;
  double value = 0.0;
};

RadiationProfile RadiationProfile::closed_form(Fn g, double s_lo, double s_hi,
                                               std::vector<double> breakpoints) {
  if (!(s_lo <= s_hi)) throw DomainError("RadiationProfile: support needs lo <= hi");
  RadiationProfile p;
  p.fn_ = std::move(g);
  p.lo_ = s_lo;
  p.hi_ = s_hi;
  breakpoints.push_back(s_lo);
  breakpoints.push_back(s_hi);
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());
  p.breaks_ = std::move(breakpoints);
  p.norm_ = std::make_shared<NormCache>();
  return p;
}

RadiationProfile RadiationProfile::decaying(Fn g, double decay_exponent,
                                            std::vector<double> breakpoints) {
  if (!(decay_exponent > 0.5))
    throw DomainError("RadiationProfile: decay exponent must exceed 1/2 for L²");
  RadiationProfile p;
  p.fn_ = std::move(g);
  p.compact_ = false;
  p.lo_ = -kInf;
  p.hi_ = kInf;
  p.decay_ = decay_exponent;
  std::sort(breakpoints.begin(), breakpoints.end());
  p.breaks_ = std::move(breakpoints);
  p.norm_ = std::make_shared<NormCache>();
  return p;
}

RadiationProfile RadiationProfile::sampled(double s0, double ds,
                                           std::vector<double> values) {
  if (!(ds > 0.0)) throw DomainError("RadiationProfile: ds must be > 0");
  if (values.size() < 2) throw DomainError("RadiationProfile: need >= 2 samples");
  const std::size_t n = values.size();
  const double s_end = s0 + ds * static_cast<double>(n - 1);
  auto v = std::make_shared<const std::vector<double>>(std::move(values));
  Fn interp = [v, s0, ds, n, s_end](double s) {
    if (s < s0 || s > s_end) return 0.0;
    const double x = (s - s0) / ds;
    if (n < 4) {
      const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x), n - 2);
      const double f = x - static_cast<double>(i);
      return (1.0 - f) * (*v)[i] + f * (*v)[i + 1];
    }
    std::size_t i = static_cast<std::size_t>(std::floor(x));
    i = std::min(i, n - 2);
    std::size_t j0 = i == 0 ? 0 : i - 1;
    j0 = std::min(j0, n - 4);
    double acc = 0.0;
    for (std::size_t j = j0; j < j0 + 4; ++j) {
      double w = 1.0;
      for (std::size_t m = j0; m < j0 + 4; ++m)
        if (m != j)
          w *= (x - static_cast<double>(m)) /
               (static_cast<double>(j) - static_cast<double>(m));
      acc += w * (*v)[j];
    }
    return acc;
  };
  std::vector<double> breaks;
  breaks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) breaks.push_back(s0 + ds * static_cast<double>(i));
  RadiationProfile p = closed_form(std::move(interp), s0, s_end, std::move(breaks));
  p.sampled_ = true;
  return p;
}

RadiationProfile RadiationProfile::zero() {
  return closed_form([](double) { return 0.0; }, 0.0, 0.0);
}

double RadiationProfile::operator()(double s) const {
  if (compact_ && (s < lo_ || s > hi_)) return 0.0;
  return fn_(s);
}

double RadiationProfile::integrate_fn(const Fn& f, double a, double b, double tol,
                                      double decay) const {
  const double lo = std::max(a, lo_);
  const double hi = std::min(b, hi_);
  if (!(lo < hi)) return 0.0;
  if (std::isfinite(lo) && std::isfinite(hi))
    return quad::integrate_adaptive(f, lo, hi, tol, breaks_);
  if (!(decay > 1.0))
    throw DomainError("RadiationProfile: declared decay too slow for this integral");
  const double mid = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
  double total = 0.0;
  if (!std::isfinite(hi)) total += half_line(f, mid, decay, breaks_, 0.5 * tol);
  else if (mid < hi) total += quad::integrate_adaptive(f, mid, hi, 0.5 * tol, breaks_);
  if (!std::isfinite(lo)) {
    auto g = [&f](double x) { return f(-x); };
    total += half_line(g, -mid, decay, negated(breaks_), 0.5 * tol);
  }
  return total;
}

double RadiationProfile::norm_l2() const {
  std::call_once(norm_->once, [this] {
    auto sq = [this](double s) {
      const double v = (*this)(s);
      return v * v;
    };
    norm_->value = std::sqrt(integrate_fn(sq, -kInf, kInf, 1e-14,
                                          decay_ ? 2.0 * *decay_ : 0.0));
  });
  return norm_->value;
}

double RadiationProfile::moment(int k, double a, double b, double tol) const {
  if (k != 0 && k != 1) throw DomainError("moment: only k = 0, 1 supported");
  if (a > b) return -moment(k, b, a, tol);
  const double p = decay_ ? *decay_ - k : 0.0;
  if (k == 0) return integrate_fn([this](double s) { return (*this)(s); }, a, b, tol, p);
  return integrate_fn([this](double s) { return s * (*this)(s); }, a, b, tol, p);
}

double RadiationProfile::tail_norm_sq(double R, double tol) const {
  auto sq = [this](double s) {
    const double v = (*this)(s);
    return v * v;
  };
  const double p = decay_ ? 2.0 * *decay_ : 0.0;
  return integrate_fn(sq, R, kInf, 0.5 * tol, p) +
         integrate_fn(sq, -kInf, -R, 0.5 * tol, p);
}

RadiationProfile RadiationProfile::mirrored() const {
  RadiationProfile p = *this;
  Fn f = fn_;
  p.fn_ = [f](double s) { return f(-s); };
  p.lo_ = -hi_;
  p.hi_ = -lo_;
  p.breaks_ = negated(breaks_);
  std::sort(p.breaks_.begin(), p.breaks_.end());
  p.norm_ = std::make_shared<NormCache>();
  return p;
}

RadiationProfile RadiationProfile::shifted(double t0) const {
  RadiationProfile p = *this;
  Fn f = fn_;
  p.fn_ = [f, t0](double s) { return f(s + t0); };
  p.lo_ = lo_ - t0;
  p.hi_ = hi_ - t0;
  for (double& b : p.breaks_) b -= t0;
  p.norm_ = std::make_shared<NormCache>();
  return p;
}

RadialData RadialData::sampled(std::vector<double> r, std::vector<double> u0,
                               std::vector<double> u1,
                               std::optional<double> tail_exponent) {
  if (tail_exponent && !(*tail_exponent > 0.0))
    throw DomainError("RadialData::sampled: tail exponent must be > 0");
  if (r.size() < 2 || r.size() != u0.size() || r.size() != u1.size())
    throw DomainError("RadialData::sampled: grids must coincide and have >= 2 points");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1]))
      throw DomainError("RadialData::sampled: grid must be strictly increasing");
  auto grid = std::make_shared<const std::vector<double>>(std::move(r));
  const double p = tail_exponent.value_or(0.0);
  auto make = [grid, p](std::vector<double> vals) {
    auto v = std::make_shared<const std::vector<double>>(std::move(vals));
    return [grid, v, p](double x) {
      const auto& g = *grid;
      const std::size_t n = g.size();
      if (x > g.back()) return p > 0.0 ? v->back() * std::pow(g.back() / x, p) : 0.0;
      if (x < g.front()) return 0.0;
      std::size_t i = static_cast<std::size_t>(
          std::upper_bound(g.begin(), g.end(), x) - g.begin());
      i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
      if (n < 4) {
        const double f = (x - g[i]) / (g[i + 1] - g[i]);
        return (1.0 - f) * (*v)[i] + f * (*v)[i + 1];
      }
      std::size_t j0 = i == 0 ? 0 : i - 1;
      j0 = std::min(j0, n - 4);
      double acc = 0.0;
      for (std::size_t j = j0; j < j0 + 4; ++j) {
        double w = 1.0;
        for (std::size_t m = j0; m < j0 + 4; ++m)
          if (m != j) w *= (x - g[m]) / (g[j] - g[m]);
        acc += w * (*v)[j];
      }
      return acc;
    };
  };
  RadialData d;
  d.u0 = {make(std::move(u0)), *grid};
  d.u1 = {make(std::move(u1)), *grid};
  if (tail_exponent)
    d.decay_exponent = *tail_exponent;
  else
    d.compact_support_bound = grid->back();
  return d;
}

RadialData& RadialData::ensure_derivative() {
  if (du0) return *this;
  auto f = u0.f;
  du0 = {[f](double r) {
           const double h = 1e-5 * std::max(1.0, std::abs(r));
           return (f(r + h) - f(r - h)) / (2.0 * h);
         },
         u0.breakpoints};
  reduced_accuracy = true;
  return *this;
}

double free_wave(const RadiationProfile& G, double r, double t) {
  if (!(r > 0.0)) throw DomainError("free_wave: r must be > 0");
  const double m0 = G.moment(0, t - r, t + r);
  const double m1 = G.moment(1, t - r, t + r);
  return (m1 - t * m0) / (r * r * r);
}

double free_wave_velocity(const RadiationProfile& G, double r, double t) {
  if (!(r > 0.0)) throw DomainError("free_wave_velocity: r must be > 0");
  const double m0 = G.moment(0, t - r, t + r);
  return (G(t + r) + G(t - r)) / (r * r) - m0 / (r * r * r);
}

double free_wave_gradient(const RadiationProfile& G, double r, double t) {
  if (!(r > 0.0)) throw DomainError("free_wave_gradient: r must be > 0");
  const double m0 = G.moment(0, t - r, t + r);
  const double m1 = G.moment(1, t - r, t + r);
  const double r2 = r * r;
  return (G(t + r) - G(t - r)) / r2 - 3.0 * (m1 - t * m0) / (r2 * r2);
}

double positive_propagator(const RadialFunction& u1, double r, double t) {
  if (!(t >= 0.0 && r > t))
    throw DomainError("positive_propagator: need r > t >= 0");
  if (t == 0.0) return 0.0;
  auto kernel = [&](double rho) {
    return rho * (r * r + rho * rho - t * t) * u1(rho);
  };
  return quad::integrate_adaptive(kernel, r - t, r + t, 1e-14, u1.breakpoints) /
         (4.0 * r * r * r);
}

RadialData data_from_profile(const RadiationProfile& G) {
  double a = kInf;
  double m0 = 0.0, m1 = 0.0;
  if (G.compact()) {
    a = std::max(std::abs(G.support_lo()), std::abs(G.support_hi()));
    m0 = G.moment(0, -a, a);
    m1 = G.moment(1, -a, a);
  }
  // Moments are constant once [-r, r] covers the support.
  auto M = [G, a, m0, m1](int k, double r) {
    if (r >= a) return k == 0 ? m0 : m1;
    return G.moment(k, -r, r);
  };
  static constexpr double kTiny = 1e-8;
  RadialData d;
  const auto breaks = radial_breaks(G.breakpoints());
  d.u0 = {[M](double r) {
            r = std::max(r, kTiny);
            return M(1, r) / (r * r * r);
          },
          breaks};
  d.du0 = {[G, M](double r) {
             r = std::max(r, kTiny);
             const double r2 = r * r;
             return (G(r) - G(-r)) / r2 - 3.0 * M(1, r) / (r2 * r2);
           },
           breaks};
  d.u1 = {[G, M](double r) {
            r = std::max(r, kTiny);
            return (G(r) + G(-r)) / (r * r) - M(0, r) / (r * r * r);
          },
          breaks};
  if (G.compact() && m0 == 0.0 && m1 == 0.0)
    d.compact_support_bound = a;
  else
    d.decay_exponent = 3.0;
  return d;
}

RadiationProfile profile_from_data(const RadialData& data,
                                   std::optional<double> profile_decay) {
  RadialData d = data;
  d.ensure_derivative();
  std::optional<double> bound = d.compact_support_bound;
  if (!bound) {
    if (!d.decay_exponent)
      throw DomainError("profile_from_data: data declare neither compact support nor decay");
    if (!(*d.decay_exponent > 2.0))
      throw DomainError("profile_from_data: declared decay must exceed r^{-2}");
  }

  quad::Integrand flux;
  {
    auto u1 = d.u1;
    flux.eval = [u1](double rho) { return rho * u1(rho); };
    flux.breakpoints = d.u1.breakpoints;
    if (bound)
      flux.support_end = *bound;
    else
      flux.decay_exponent = *d.decay_exponent - 1.0;
  }
  auto u0 = d.u0, du0 = d.du0, u1 = d.u1;
  auto odd = [u0, du0](double r) { return 0.5 * (3.0 * r * u0(r) + r * r * du0(r)); };
  auto even = [u1, flux](double s) {
    return 0.5 * s * s * u1(s) - 0.5 * quad::integrate_tail(flux, s, 1e-13);
  };
  RadiationProfile::Fn g = [odd, even](double s) {
    if (s >= 0.0) return odd(s) + even(s);
    return -odd(-s) + even(-s);
  };

  std::vector<double> breaks;
  for (const auto* fn : {&d.u0, &d.u1})
    for (double b : fn->breakpoints) {
      breaks.push_back(b);
      breaks.push_back(-b);
    }
  if (bound) return RadiationProfile::closed_form(g, -*bound, *bound, std::move(breaks));
  return RadiationProfile::decaying(g, profile_decay.value_or(*d.decay_exponent - 2.0),
                                    std::move(breaks));
}

namespace {

double energy_from(const RadialData& data, double R, double tol) {
  RadialData d = data;
  d.ensure_derivative();
  quad::Integrand h;
  auto u1 = d.u1, du0 = d.du0;
  h.eval = [u1, du0](double rho) {
    const double a = du0(rho), b = u1(rho);
    const double r2 = rho * rho;
    return (a * a + b * b) * r2 * r2;
  };
  h.breakpoints = d.u0.breakpoints;
  h.breakpoints.insert(h.breakpoints.end(), d.u1.breakpoints.begin(),
                       d.u1.breakpoints.end());
  std::sort(h.breakpoints.begin(), h.breakpoints.end());
  if (d.compact_support_bound) {
    h.support_end = *d.compact_support_bound;
    return sigma4<> * quad::integrate_tail(h, R, tol);
  }
  if (!d.decay_exponent)
    throw DomainError("exterior_energy: data declare neither compact support nor decay");
  const double p = 2.0 * *d.decay_exponent - 4.0;
  std::vector<double> breaks;
  for (double b : h.breakpoints)
    if (b > R) breaks.push_back(b);
  return sigma4<> * half_line(h.eval, R, p, breaks, tol);
}

}  // namespace

double exterior_energy(const RadialData& d, double R, double tol) {
  if (!(R > 0.0)) throw DomainError("exterior_energy: R must be > 0");
  return energy_from(d, R, tol);
}

double energy_norm_sq(const RadialData& d, double tol) { return energy_from(d, 0.0, tol); }

double exterior_energy_identity(const RadiationProfile& G, double R) {
  if (!(R > 0.0)) throw DomainError("exterior_energy_identity: R must be > 0");
  const double m0 = G.moment(0, -R, R);
  const double m1 = G.moment(1, -R, R);
  return sigma4<> * (2.0 * G.tail_norm_sq(R) + m0 * m0 / R + 3.0 * m1 * m1 / (R * R * R));
}

ResiduePair residues(const RadiationProfile& G, double R) {
  if (!(R > 0.0)) throw DomainError("residues: R must be > 0");
  const double m0 = G.moment(0, -R, R);
  const double m1 = G.moment(1, -R, R);
  return {-m0 / std::sqrt(R), std::sqrt(3.0) * m1 / (R * std::sqrt(R)), R};
}

ResidueFlow residue_flow(const RadiationProfile& G_minus,
                         const RadiationProfile& G_plus, double r) {
  if (!(r > 0.0)) throw DomainError("residue_flow: r must be > 0");
  const ResiduePair tau = residues(G_minus, r);
  const double gm = G_minus(r), gp = G_plus(r);
  auto near = [r](const RadiationProfile& G) {
    for (double b : G.breakpoints())
      if (std::abs(std::abs(b) - r) <= 1e-12 * std::max(1.0, r)) return true;
    return false;
  };
  const double sr = std::sqrt(r);
  return {-tau.tau1 / (2.0 * r) - (gm + gp) / sr,
          -1.5 * tau.tau2 / r + std::sqrt(3.0) * (gm - gp) / sr,
          near(G_minus) || near(G_plus)};
}

AsymptoticNumbers asymptotic_numbers(const RadiationProfile& G) {
  if (!G.compact()) {
    const double p = G.decay_exponent().value_or(0.0);
    if (!(p > 2.0))
      throw DomainError("asymptotic_numbers: declared decay too slow for the limits");
  }
  return {-G.moment(0, -kInf, kInf), G.moment(1, -kInf, kInf)};
}

RadiationProfile shift_profile(const RadiationProfile& G, double t0) {
  if (t0 == 0.0) return G;
  return G.shifted(t0);
}

double nonlinear_profile_shift(const SourceTerm& src, double s, double tol) {
  if (!src.f) return 0.0;
  const bool bounded = std::isfinite(src.t_max) && std::isfinite(src.r_hi);
  if (!bounded && !(src.decay_exponent && *src.decay_exponent > 3.0))
    throw DomainError("nonlinear_profile_shift: unbounded source needs decay r^{-p}, p > 3");
  const double p = src.decay_exponent.value_or(0.0);

  // ½ (s+t)² F(t, t+s) along the outgoing ray.
  auto ray = [&](double t) {
    const double r = t + s;
    if (r < src.r_lo || r > src.r_hi || t > src.t_max) return 0.0;
    return 0.5 * r * r * src.f(t, r);
  };
  // ½ ∫_{t+s}^∞ ρ F(t, ρ) dρ.
  auto column = [&](double t) {
    const double from = std::max(t + s, src.r_lo);
    auto g = [&](double rho) { return rho * src.f(t, rho); };
    if (std::isfinite(src.r_hi)) {
      if (!(from < src.r_hi)) return 0.0;
      return 0.5 * quad::integrate_adaptive(g, from, src.r_hi, 0.1 * tol, src.r_breakpoints);
    }
    return 0.5 * half_line(g, from, p - 1.0, src.r_breakpoints, 0.1 * tol);
  };

  std::vector<double> t_breaks = src.t_breakpoints;
  t_breaks.push_back(src.r_lo - s);
  if (std::isfinite(src.r_hi)) t_breaks.push_back(src.r_hi - s);
  for (double rb : src.r_breakpoints) t_breaks.push_back(rb - s);
  std::sort(t_breaks.begin(), t_breaks.end());

  double first = 0.0, second = 0.0;
  if (std::isfinite(src.t_max)) {
    const double t_lo = std::max(0.0, src.r_lo - s);
    const double t_hi = std::isfinite(src.r_hi) ? std::min(src.t_max, src.r_hi - s) : src.t_max;
    if (t_lo < t_hi) first = quad::integrate_adaptive(ray, t_lo, t_hi, 0.5 * tol, t_breaks);
    if (src.t_max > 0.0)
      second = quad::integrate_adaptive(column, 0.0, src.t_max, 0.5 * tol, t_breaks);
  } else {
    first = half_line(ray, 0.0, p - 2.0, t_breaks, 0.5 * tol);
    second = half_line(column, 0.0, p - 2.0, t_breaks, 0.5 * tol);
  }
  return first - second;
}

RadiationProfile ground_state_profile() {
  return RadiationProfile::decaying(
      [](double s) { return 1.5 * s * std::pow(1.0 + s * s / 15.0, -2.5); }, 4.0);
}

double ground_state_tau2(double r) {
  if (!(r > 0.0)) throw DomainError("ground_state_tau2: r must be > 0");
  return std::sqrt(3.0) * r * std::sqrt(r) * ground_state(r).value;
}

double compute_c2(double rho) {
  if (!(rho > 0.0)) throw DomainError("compute_c2: rho must be > 0");
  const double r_peak = std::sqrt(15.0);
  const double peak = ground_state_tau2(r_peak);
  if (rho >= peak) throw NoSolution("compute_c2: rho at or above max tau2");
  double lo = r_peak, hi = 2.0 * r_peak;
  while (ground_state_tau2(hi) > rho) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ground_state_tau2(mid) > rho)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace critwave
