#include <doctest.h>

#include <cmath>
#include <limits>

#include "critwave/errors.hpp"
#include "critwave/nonlinearity.hpp"
#include "critwave/pdesim.hpp"
#include "critwave/profiles.hpp"
#include "critwave/radiation.hpp"
#include "generators.hpp"

using namespace critwave;
using namespace critwave::pde;

namespace {

RadiationProfile bump(double amp = 1.0) {
  return RadiationProfile::closed_form(
      [amp](double s) {
        const double q = 1.0 - s * s;
        return q > 0.0 ? amp * std::pow(q, 6) : 0.0;
      },
      -1.0, 1.0);
}

RadialData zero_data() {
  RadialData d;
  d.u0 = {[](double) { return 0.0; }, {}};
  d.u1 = {[](double) { return 0.0; }, {}};
  return d;
}

RadialData ground_state_data() {
  RadialData d;
  d.u0 = {[](double r) { return ground_state(r).value; }, {}};
  d.u1 = {[](double) { return 0.0; }, {}};
  return d;
}

SimConfig free_wave_config(const RadiationProfile& G, double dr) {
  SimConfig c;
  c.r_min = 0.5;
  c.r_max = 6.5;
  c.dr = dr;
  c.T = 2.0;
  c.nonlinearity = Nonlinearity::linear;
  c.boundary = Boundary::dirichlet_exact;
  c.exact_u = [G](double r, double t) { return free_wave(G, r, t); };
  return c;
}

double max_error_vs_free_wave(const RadiationProfile& G, double dr) {
  const auto cfg = free_wave_config(G, dr);
  const auto tr = simulate(data_from_profile(G), cfg);
  const auto u = tr.u(tr.index_at(cfg.T));
  double err = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j)
    err = std::max(err, std::abs(u[j] - free_wave(G, tr.r[j], cfg.T)));
  return err;
}

}  // namespace

TEST_CASE("config validation") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  c.r_min = 0.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = SimConfig{};
  c.cfl = 1.2;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = SimConfig{};
  c.dr = 0.03;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = SimConfig{};
  c.T = 0.005;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = SimConfig{};
  c.boundary = Boundary::dirichlet_exact;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = SimConfig{};
  c.r_max = 1.02;
  CHECK_THROWS_AS(c.validate(), DomainError);
  CHECK_THROWS_AS(simulate(RadialData{}, SimConfig{}), DomainError);
}

TEST_CASE("zero data stays zero") {
  SimConfig c;
  c.r_min = 1.0;
  c.r_max = 3.0;
  c.T = 0.5;
  const auto tr = simulate(zero_data(), c);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == doctest::Approx(0.5));
  for (const auto& w : tr.w) CHECK(w.cwiseAbs().maxCoeff() == 0.0);
  CHECK(energy(tr, 0.5, 1.0) == 0.0);
  c.boundary = Boundary::dirichlet_exact;
  c.exact_u = [](double, double) { return 0.0; };
  const auto v = virial(simulate(zero_data(), c), 0.2, 0.3);
  CHECK(v.J == 0.0);
  CHECK(v.dJ == 0.0);
  CHECK(v.d2J == 0.0);
}

TEST_CASE("ground state is stationary") {
  SimConfig c;
  c.r_min = 0.5;
  c.r_max = 10.5;
  c.dr = 0.01;
  c.T = 5.0;
  c.boundary = Boundary::dirichlet_exact;
  c.exact_u = [](double r, double) { return ground_state(r).value; };
  c.store_every = 50;
  const auto tr = simulate(ground_state_data(), c);
  REQUIRE_FALSE(tr.blowup);
  const auto u = tr.u(tr.index_at(5.0));
  double dev = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j)
    dev = std::max(dev, std::abs(u[j] - ground_state(tr.r[j]).value));
  CHECK(dev < 1e-3);
  const double E0 = energy(tr, 0.0, 0.5), E5 = energy(tr, 5.0, 0.5);
  CHECK(std::abs(E5 - E0) / std::abs(E0) < 1e-3);
  const auto v0 = virial(tr, 0.5, 2.0), v5 = virial(tr, 4.5, 2.0);
  CHECK(std::abs(v5.J - v0.J) / v0.J < 1e-4);
  CHECK(std::abs(v5.dJ) < 0.1);
}

TEST_CASE("free wave: second-order convergence") {
  const auto G = bump();
  const double e1 = max_error_vs_free_wave(G, 0.02);
  const double e2 = max_error_vs_free_wave(G, 0.01);
  const double e3 = max_error_vs_free_wave(G, 0.005);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
  CHECK(e2 / e3 >= 3.5);
  CHECK(e2 / e3 <= 4.5);
}

TEST_CASE("free wave: energy conserved before the cone reaches the ends") {
  const auto G = bump();
  SimConfig c;
  c.r_min = 0.5;
  c.r_max = 20.5;
  c.dr = 0.01;
  c.T = 2.0;
  c.nonlinearity = Nonlinearity::linear;
  c.store_every = 100;
  const auto tr = simulate(data_from_profile(G), c);
  // u1 ~ r^{-3} outside r = 1; compare on [3, hi] where hi is the trusted end.
  std::string warn;
  const double E0 = energy(tr, 0.0, 3.0, &warn);
  CHECK(warn.empty());
  const auto d = data_from_profile(G);
  const double hi = tr.trusted(0.0).second;
  const double exact0 = (exterior_energy(d, 3.0) - exterior_energy(d, hi)) / 2.0;
  CHECK(std::abs(E0 - exact0) / exact0 < 1e-4);
  // Energy in r > 3 + t is non-increasing for a linear wave.
  CHECK(energy(tr, 1.0, 4.0) <= E0 * (1.0 + 1e-4));
  energy(tr, 2.0, 0.0, &warn);
  CHECK_FALSE(warn.empty());
}

TEST_CASE("finite speed of propagation and odd symmetry") {
  RadialData d = zero_data();
  d.u1 = {[](double r) { return r > 1.0 && r < 2.0 ? std::pow(std::sin(M_PI * (r - 1.0)), 4) : 0.0; },
          {1.0, 2.0}};
  SimConfig c;
  c.r_min = 0.5;
  c.r_max = 8.5;
  c.dr = 0.01;
  c.T = 3.0;
  const auto f = simulate(d, c);
  c.T = -3.0;
  const auto b = simulate(d, c);
  REQUIRE(f.times.size() == b.times.size());
  CHECK(b.times.front() == doctest::Approx(-3.0));
  double asym = 0.0, leak = 0.0;
  for (std::size_t i = 0; i < f.times.size(); ++i) {
    const auto j = b.index_at(-f.times[i]);
    asym = std::max(asym, (f.w[i] + b.w[j]).cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < f.r.size(); ++k)
      if (f.r[k] > 2.0 + f.times[i] + 2.0 * c.dr) leak = std::max(leak, std::abs(f.w[i][k]));
  }
  CHECK(asym == 0.0);
  CHECK(leak == 0.0);
}

TEST_CASE("self-similar field") {
  const double nu = 0.05;
  const auto p = integrate_profile(nu, 1e-12);
  RadialData d = zero_data();
  d.u1 = {[nu](double r) { return nu * std::pow(r, -2.5); }, {}};
  double prev = 0.0;
  for (double dr : {0.01, 0.005}) {
    SimConfig c;
    c.r_min = 1.0;
    c.r_max = 3.0;
    c.dr = dr;
    c.T = 0.5;
    const auto tr = simulate(d, c);
    const auto u = tr.u(tr.index_at(0.5));
    const auto [lo, hi] = tr.trusted(0.5);
    double err = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j)
      if (tr.r[j] >= lo && tr.r[j] <= hi)
        err = std::max(err, std::abs(u[j] - std::pow(tr.r[j], -1.5) * p.phi_at(0.5 / tr.r[j])));
    CHECK(err < 1e-6);
    if (prev > 0.0) CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("scheme residual on random interior stencils") {
  RadialData d = zero_data();
  d.u0 = {[](double r) { return 0.4 * std::exp(-6.0 * (r - 2.0) * (r - 2.0)); }, {}};
  SimConfig c;
  c.r_min = 0.5;
  c.r_max = 4.5;
  c.dr = 0.01;
  c.T = 1.0;
  const auto tr = simulate(d, c);
  const double dt = c.dt(), h = c.dr;
  gen::Source src(17);
  for (int k = 0; k < 200; ++k) {
    const auto n = static_cast<std::size_t>(src.integer(1, static_cast<int>(tr.times.size()) - 2));
    const auto j = static_cast<Eigen::Index>(src.integer(1, static_cast<int>(tr.r.size()) - 2));
    const auto& wm = tr.w[n - 1];
    const auto& w0 = tr.w[n];
    const auto& wp = tr.w[n + 1];
    const double r2 = tr.r[j] * tr.r[j];
    const double q1 = 1.0 + dt * dt / r2;
    const double lhs = q1 * (wp[j] + wm[j]) - 2.0 * w0[j];
    const double rhs = dt * dt * ((w0[j + 1] - 2.0 * w0[j] + w0[j - 1]) / (h * h) + r2 * F(w0[j] / r2));
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }
}

TEST_CASE("characteristic identity converges at second order") {
  RadialData d;
  d.u0 = {[](double r) { return 0.5 * std::exp(-8.0 * (r - 2.0) * (r - 2.0)); }, {}};
  d.u1 = {[](double r) { return 0.3 * std::exp(-8.0 * (r - 2.2) * (r - 2.2)); }, {}};
  double diffs[3];
  int k = 0;
  for (double dr : {0.02, 0.01, 0.005}) {
    SimConfig c;
    c.r_min = 0.5;
    c.r_max = 8.5;
    c.dr = dr;
    c.T = 3.0;
    const auto [lhs, rhs] = characteristic_integral(simulate(d, c), 3.5);
    diffs[k++] = std::abs(lhs - rhs);
  }
  CHECK(diffs[0] / diffs[1] > 3.5);
  CHECK(diffs[1] / diffs[2] > 3.5);
  CHECK(diffs[2] < 1e-5);

  SimConfig z;
  z.r_min = 0.5;
  z.r_max = 4.5;
  z.dr = 0.01;
  z.T = 1.5;
  const auto [zl, zr] = characteristic_integral(simulate(zero_data(), z), 2.0);
  CHECK(zl == 0.0);
  CHECK(zr == 0.0);
  z.cfl = 0.5;
  CHECK_THROWS_AS(characteristic_integral(simulate(zero_data(), z), 2.0), DomainError);
}

TEST_CASE("characteristic identity for a linear free wave") {
  const auto G = bump();
  double prev = 0.0;
  for (double dr : {0.02, 0.01}) {
    SimConfig c;
    c.r_min = 0.5;
    c.r_max = 8.5;
    c.dr = dr;
    c.T = 3.0;
    c.nonlinearity = Nonlinearity::linear;
    const auto [lhs, rhs] = characteristic_integral(simulate(data_from_profile(G), c), 3.5);
    const double diff = std::abs(lhs - rhs);
    if (prev > 0.0) CHECK(prev / diff > 3.5);
    prev = diff;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("virial: J'' against second differences of J") {
  const auto G = RadiationProfile::closed_form(
      [](double s) { return std::abs(s) < 1 ? (1 + 0.5 * s) * std::pow(1 - s * s, 6) : 0.0; }, -1, 1);
  double prev = 0.0;
  for (double dr : {0.02, 0.01, 0.005}) {
    SimConfig c;
    c.r_min = 0.5;
    c.r_max = 8.5;
    c.dr = dr;
    c.T = 2.0;
    c.nonlinearity = Nonlinearity::linear;
    c.boundary = Boundary::dirichlet_exact;
    c.exact_u = [G](double r, double t) { return free_wave(G, r, t); };
    const auto tr = simulate(data_from_profile(G), c);
    const double dt = c.dt();
    const auto vm = virial(tr, 1.0 - dt, 1.5), v0 = virial(tr, 1.0, 1.5), vp = virial(tr, 1.0 + dt, 1.5);
    const double err = std::abs((vp.J - 2 * v0.J + vm.J) / (dt * dt) - v0.d2J);
    CHECK(std::abs((vp.J - vm.J) / (2 * dt) - v0.dJ) < 1e-3);
    if (prev > 0.0) CHECK(prev / err > 3.5);
    prev = err;
  }
  CHECK(virial_cutoff(1.0) == 1.0);
  CHECK(virial_cutoff(3.5) == 0.0);
  CHECK(virial_cutoff(2.5) == doctest::Approx(0.25));
  CHECK(virial_cutoff_prime(2.0) == 0.0);

  SimConfig dd;
  dd.r_min = 0.5;
  dd.r_max = 4.5;
  dd.T = 0.5;
  const auto tr = simulate(zero_data(), dd);
  CHECK_THROWS_AS(virial(tr, 0.5, 1.0), DomainError);   // domain-of-dependence run
  SimConfig ex = dd;
  ex.boundary = Boundary::dirichlet_exact;
  ex.exact_u = [](double, double) { return 0.0; };
  CHECK_THROWS_AS(virial(simulate(zero_data(), ex), 0.5, 2.0), DomainError);  // 3·scale > r_max
}

TEST_CASE("outgoing profile extraction") {
  const auto G = RadiationProfile::closed_form(
      [](double s) { return std::abs(s) < 1 ? (1 + s) * std::pow(1 - s * s, 6) : 0.0; }, -1, 1);
  SimConfig c;
  c.r_min = 0.1;
  c.r_max = 40.1;
  c.dr = 0.01;
  c.T = 19.0;
  c.nonlinearity = Nonlinearity::linear;
  c.store_every = 10;
  const auto tr = simulate(data_from_profile(G), c);
  for (double s : {0.2, 0.5, 0.8}) CHECK(std::abs(extract_outgoing(tr, s) - G(-s)) < 1e-3);
  CHECK_THROWS_AS(extract_outgoing(tr, 0.05), DomainError);
  CHECK_THROWS_AS(extract_outgoing(tr, 45.0), DomainError);

  const auto z = simulate(zero_data(), c);
  CHECK(extract_outgoing(z, 0.5) == 0.0);
}

TEST_CASE("small focusing data: extraction matches the first nonlinear correction") {
  const auto G = bump(1e-3);
  const auto d = data_from_profile(G);
  SimConfig c;
  c.r_min = 0.1;
  c.r_max = 40.1;
  c.dr = 0.01;
  c.T = 19.0;
  c.store_every = 10;
  c.nonlinearity = Nonlinearity::linear;
  const auto lin = simulate(d, c);
  c.nonlinearity = Nonlinearity::focusing;
  const auto nl = simulate(d, c);
  SourceTerm src;
  src.f = [G](double t, double r) { return r > 0.0 ? F(free_wave(G, r, t)) : 0.0; };
  src.t_max = std::numeric_limits<double>::infinity();
  src.r_lo = 0.0;
  src.r_hi = std::numeric_limits<double>::infinity();
  src.decay_exponent = 4.0;
  src.r_breakpoints = {1.0};
  for (double s : {0.3, 0.6}) {
    const double shift = nonlinear_profile_shift(src, s, 1e-14);
    const double seen = extract_outgoing(nl, s) - extract_outgoing(lin, s);
    CHECK(std::abs(seen - shift) < 0.05 * std::abs(shift));
  }
}

TEST_CASE("blow-up is reported with the last valid state") {
  RadialData d;
  d.u0 = {[](double r) { return 8.0 * std::exp(-20.0 * (r - 1.5) * (r - 1.5)); }, {}};
  d.u1 = {[](double) { return 0.0; }, {}};
  SimConfig c;
  c.r_min = 0.5;
  c.r_max = 2.5;
  c.dr = 0.01;
  c.T = 2.0;
  const auto tr = simulate(d, c);
  REQUIRE(tr.blowup);
  CHECK(tr.blowup->time > 0.0);
  CHECK(tr.blowup->time < 2.0);
  CHECK(tr.blowup->radius >= 0.5);
  CHECK(tr.blowup->radius <= 2.5);
  CHECK(tr.times.back() < tr.blowup->time);
  for (const auto& w : tr.w) CHECK(w.allFinite());
}
