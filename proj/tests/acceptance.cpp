// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "critwave/cli.hpp"
#include "critwave/nonlinearity.hpp"
#include "critwave/pdesim.hpp"
#include "critwave/profiles.hpp"
#include "critwave/radiation.hpp"
#include "critwave/verify.hpp"
#include "generators.hpp"

using namespace critwave;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Outcome table1_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto t = verify::build_table1(1e-10);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& ref = verify::reference_rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    const auto& r = t.rows.at(i);
    for (double d : {r.y_k - ref[i].y_k, r.lambda_k - ref[i].lambda_k, r.min_g - ref[i].min_g,
                     r.product - ref[i].product, r.contribution - ref[i].contribution})
      worst = std::max(worst, std::abs(d));
  }
  const auto rs = verify::reference_summary();
  for (double d : {t.summary.sup_phi - rs.sup_phi, t.summary.y0 - rs.y0,
                   t.summary.kappa0 - rs.kappa0, t.summary.g_minus - rs.g_minus,
                   t.summary.total - rs.total})
    worst = std::max(worst, std::abs(d));
  return {worst < 5e-5 && secs < 10.0, fmt2("max cell deviation %.2e, runtime %.3g s", worst, secs)};
}

Outcome main_inequality() {
  const auto t = verify::build_table1(1e-10);
  const auto item = verify::check_main_inequality(t.rows, t.summary);
  return {item.pass && item.computed > 0.25, fmt("total - g_- = %.6f", item.computed)};
}

Outcome upper_integral() {
  const auto p = integrate_profile(verify::kNu0, 1e-10);
  const double v = verify::upper_integral(p);
  return {std::abs(v - 1.85024) <= 1e-3 && v < 1.86, fmt("integral = %.6f", v)};
}

Outcome c1() {
  const auto t = verify::build_table1(1e-10);
  const double C1 = verify::compute_C1(t.rows);
  const double neut = verify::neutralization_margin(t.rows, t.summary);
  const bool ok = std::abs(C1 - 0.184221) <= 5e-4 && C1 / 3.0 > 0.055 && neut >= 0.0;
  return {ok, fmt2("C1 = %.6f, neutralization margin %.6f", C1, neut)};
}

Outcome pushup() {
  const double exact = verify::pushup_integral_exact();
  const double num = verify::pushup_integral(integrate_linear_profile(1e-11));
  const bool ok = std::abs(num - 0.604556) <= 1e-4 && 99.0 / 50.0 * num > 1.1 &&
                  std::abs(num - exact) < 1e-8;
  return {ok, fmt2("I_* = %.7f, closed-form gap %.2e", num, std::abs(num - exact))};
}

Outcome nu2() {
  const double v = find_nu2(1e-9);
  return {std::abs(v - 1.575) <= 0.005, fmt("nu2 = %.6f", v)};
}

Outcome drift() {
  double worst = 0.0;
  for (double nu : {0.05, 0.5, 1.0, 1.5, 1.575, 1.86, 1.9, 2.0, 2.5, 5.0})
    worst = std::max(worst, integrate_profile(nu, 1e-10).energy_drift());
  return {worst < 1e-8, fmt("max drift %.2e", worst)};
}

Outcome isometry() {
  gen::Source src(2024);
  double worst_iso = 0.0, worst_ext = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto G = gen::bump_profile(src.bumps());
    const auto d = data_from_profile(G);
    const double rhs = 2.0 * sigma4<> * G.norm_l2() * G.norm_l2();
    worst_iso = std::max(worst_iso, std::abs(energy_norm_sq(d) - rhs) / rhs);
    if (k < 5)
      for (double R : {0.5, 1.0, 2.0, 10.0}) {
        const double b = exterior_energy_identity(G, R);
        if (b > 1e-300) worst_ext = std::max(worst_ext, std::abs(exterior_energy(d, R) - b) / b);
      }
  }
  return {worst_iso < 1e-7 && worst_ext < 1e-8,
          fmt2("isometry %.2e, exterior identity %.2e", worst_iso, worst_ext)};
}

Outcome round_trip_and_residues() {
  gen::Source src(99);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const auto G = gen::bump_profile(src.bumps());
    const auto H = profile_from_data(data_from_profile(G));
    for (int i = 0; i <= 400; ++i) {
      const double s = G.support_lo() + (G.support_hi() - G.support_lo()) * i / 400.0;
      if (std::abs(s) >= 1e-3) worst = std::max(worst, std::abs(H(s) - G(s)));
    }
  }
  RadialData d;
  d.u0 = {[](double r) { return ground_state(r).value; }, {}};
  d.du0 = {[](double r) { return ground_state(r).dr; }, {}};
  d.u1 = {[](double) { return 0.0; }, {}};
  d.decay_exponent = 3.0;
  const auto GW = profile_from_data(d);
  double tau2_err = 0.0, tau1 = 0.0;
  for (double r : {1.0, 5.0, 20.0}) {
    const auto res = residues(GW, r);
    const double want = std::sqrt(3.0) * std::pow(r, 1.5) * ground_state(r).value;
    tau2_err = std::max(tau2_err, std::abs(res.tau2 - want) / want);
    tau1 = std::max(tau1, std::abs(res.tau1));
  }
  const bool ok = worst < 1e-8 && tau2_err < 1e-8 && tau1 < 1e-10;
  std::ostringstream os;
  os.precision(2);
  os << std::scientific << "round trip " << worst << ", tau2 " << tau2_err << ", |tau1| " << tau1;
  return {ok, os.str()};
}

Outcome translation() {
  gen::Source src(7);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const auto G = gen::bump_profile(src.bumps());
    const auto a = asymptotic_numbers(G);
    for (double t0 : {-3.0, 0.7, 10.0}) {
      const auto b = asymptotic_numbers(shift_profile(G, t0));
      worst = std::max({worst, std::abs(b.alpha1 - a.alpha1),
                        std::abs(b.alpha2 - (a.alpha2 + a.alpha1 * t0))});
    }
  }
  return {worst < 1e-10, fmt("max deviation %.2e", worst)};
}

Outcome simulator() {
  using namespace pde;
  const auto G = RadiationProfile::closed_form(
      [](double s) { return std::abs(s) < 1 ? std::pow(1 - s * s, 6) : 0.0; }, -1, 1);
  auto err_at = [&](double dr) {
    SimConfig c;
    c.r_min = 0.5;
    c.r_max = 6.5;
    c.dr = dr;
    c.T = 2.0;
    c.nonlinearity = Nonlinearity::linear;
    c.boundary = Boundary::dirichlet_exact;
    c.exact_u = [G](double r, double t) { return free_wave(G, r, t); };
    const auto tr = simulate(data_from_profile(G), c);
    const auto u = tr.u(tr.index_at(2.0));
    double e = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j)
      e = std::max(e, std::abs(u[j] - free_wave(G, tr.r[j], 2.0)));
    return e;
  };
  const double factor = err_at(0.01) / err_at(0.005);

  SimConfig w;
  w.r_min = 0.5;
  w.r_max = 10.5;
  w.dr = 0.01;
  w.T = 5.0;
  w.boundary = Boundary::dirichlet_exact;
  w.exact_u = [](double r, double) { return ground_state(r).value; };
  w.store_every = 50;
  RadialData dW;
  dW.u0 = {[](double r) { return ground_state(r).value; }, {}};
  dW.u1 = {[](double) { return 0.0; }, {}};
  const auto trW = simulate(dW, w);
  const double E0 = energy(trW, 0.0, 0.5);
  const double wdrift = std::abs(energy(trW, 5.0, 0.5) - E0) / std::abs(E0);

  RadialData dc;
  dc.u0 = {[](double r) { return 0.5 * std::exp(-8.0 * (r - 2.0) * (r - 2.0)); }, {}};
  dc.u1 = {[](double r) { return 0.3 * std::exp(-8.0 * (r - 2.2) * (r - 2.2)); }, {}};
  double diffs[3];
  int k = 0;
  for (double dr : {0.02, 0.01, 0.005}) {
    SimConfig c;
    c.r_min = 0.5;
    c.r_max = 8.5;
    c.dr = dr;
    c.T = 3.0;
    const auto [l, r] = characteristic_integral(simulate(dc, c), 3.5);
    diffs[k++] = std::abs(l - r);
  }
  const double o1 = std::log2(diffs[0] / diffs[1]), o2 = std::log2(diffs[1] / diffs[2]);

  RadialData ds;
  ds.u0 = {[](double) { return 0.0; }, {}};
  ds.u1 = {[](double r) { return r > 1 && r < 2 ? std::pow(std::sin(M_PI * (r - 1)), 4) : 0.0; }, {1, 2}};
  SimConfig c;
  c.r_min = 0.5;
  c.r_max = 8.5;
  c.dr = 0.01;
  c.T = 3.0;
  const auto f = simulate(ds, c);
  double leak = 0.0;
  for (std::size_t i = 0; i < f.times.size(); ++i)
    for (Eigen::Index j = 0; j < f.r.size(); ++j)
      if (f.r[j] > 2.0 + f.times[i] + 2.0 * c.dr) leak = std::max(leak, std::abs(f.w[i][j]));

  const bool ok = factor >= 3.5 && factor <= 4.5 && wdrift < 1e-3 && o1 > 1.8 && o2 > 1.8 &&
                  leak == 0.0;
  std::ostringstream os;
  os << "factor " << factor << ", W drift " << wdrift << ", characteristic orders " << o1 << ", "
     << o2 << ", leak " << leak;
  return {ok, os.str()};
}

Outcome virial_check() {
  using namespace pde;
  const auto G = RadiationProfile::closed_form(
      [](double s) { return std::abs(s) < 1 ? (1 + 0.5 * s) * std::pow(1 - s * s, 6) : 0.0; }, -1, 1);
  double errs[3];
  int k = 0;
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
    const auto m = virial(tr, 1.0 - dt, 1.5), z = virial(tr, 1.0, 1.5), p = virial(tr, 1.0 + dt, 1.5);
    errs[k++] = std::abs((p.J - 2 * z.J + m.J) / (dt * dt) - z.d2J);
  }
  const double o1 = std::log2(errs[0] / errs[1]), o2 = std::log2(errs[1] / errs[2]);
  return {o1 > 1.8 && o2 > 1.8 && o1 < 2.2 && o2 < 2.2,
          fmt2("observed orders %.3f, %.3f", o1, o2)};
}

Outcome negative_control() {
  const char* argv[] = {"critwave", "verify", "--nu0", "1.0"};
  std::ostringstream out, err;
  const int code = cli::parse_and_dispatch(4, argv, out, err);
  const bool failed = out.str().find("\"overall\": \"fail\"") != std::string::npos;
  return {code == cli::kVerificationFailure && failed, "exit code " + std::to_string(code)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Table 1 reproduction", table1_reproduction},
      {"main inequality", main_inequality},
      {"upper integral", upper_integral},
      {"C1 and neutralization", c1},
      {"push-up integral", pushup},
      {"nu2", nu2},
      {"profile drift", drift},
      {"radiation isometry and exterior identity", isometry},
      {"round trip and ground-state residues", round_trip_and_residues},
      {"translation law", translation},
      {"PDE simulator", simulator},
      {"virial", virial_check},
      {"negative control", negative_control},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
