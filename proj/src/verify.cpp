#include "critwave/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <ostream>

#include <json.hpp>

#include "critwave/errors.hpp"
#include "critwave/io.hpp"
#include "critwave/nonlinearity.hpp"
#include "critwave/quadrature.hpp"

namespace critwave::verify {

namespace {

constexpr int kRows = 16;
constexpr double kQuadTol = 1e-10;

double z_of(int k) { return (17.0 - k) / 10.0; }  // z_k for k >= 1

// Points in (0, y_end) where φ crosses z, found from node sign changes.
std::vector<double> crossings(const SelfSimilarProfile& p, double z) {
  const auto& path = p.path();
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    double a = path.theta()[i], b = path.theta()[i + 1];
    double fa = path.phi()[i] - z, fb = path.phi()[i + 1] - z;
    if (fa == 0.0) {
      out.push_back(std::sin(a));
      continue;
    }
    if (fa * fb > 0.0) {
      // A tangency inside the segment: check the interpolant's midpoint.
      const double m = 0.5 * (a + b);
      if ((path.phi_at(m) - z) * fa >= 0.0) continue;
      b = m;
      fb = path.phi_at(m) - z;
    }
    if (fb == 0.0) continue;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = path.phi_at(m) - z;
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    out.push_back(std::sin(0.5 * (a + b)));
  }
  return out;
}

ReportItem make(std::string name, double computed, std::optional<double> target,
                double tol, std::string predicate, bool pass, std::string note = {}) {
  return {std::move(name), computed, target, tol, std::move(predicate), pass,
          std::move(note)};
}

ReportItem near(std::string name, double computed, double target, double tol) {
  const bool ok = std::abs(computed - target) <= tol;
  return make(std::move(name), computed, target, tol, "|computed - target| <= tolerance",
              ok);
}

ReportItem failed(std::string name, const std::string& why) {
  return make(std::move(name), std::nan(""), std::nullopt, 0.0, "computation succeeds",
              false, why);
}

}  // namespace

const std::vector<ReferenceRow>& reference_rows() {
  static const std::vector<ReferenceRow> rows = {
      {0.928249, 1.349242, 0.000000, 1.080450, 0.000000},
      {0.874605, 1.368272, 0.205806, 1.175515, 0.019565},
      {0.814979, 1.390407, 0.424393, 1.267293, 0.038950},
      {0.752686, 1.414727, 0.607370, 1.355949, 0.053847},
      {0.689656, 1.440692, 0.755546, 1.441694, 0.064784},
      {0.626943, 1.468010, 0.869772, 1.524739, 0.072231},
      {0.565085, 1.496548, 0.950941, 1.605282, 0.076591},
      {0.504328, 1.526275, 1.000000, 1.683491, 0.078209},
      {0.444745, 1.557229, 1.005877, 1.759513, 0.076469},
      {0.386316, 1.589504, 0.964927, 1.833473, 0.071366},
      {0.328960, 1.623233, 0.896364, 1.905474, 0.064539},
      {0.272566, 1.658595, 0.801575, 1.975601, 0.056212},
      {0.217003, 1.695814, 0.682111, 2.043922, 0.046603},
      {0.162126, 1.735163, 0.539751, 2.110492, 0.035931},
      {0.107779, 1.776980, 0.376608, 2.175352, 0.024426},
      {0.053795, 1.821679, 0.195358, 2.238527, 0.012342},
  };
  return rows;
}

Table1Summary reference_summary() {
  return {kNu0, 1.860262, 0.964141, 0.018257, 0.535522, 0.792065, 0.0};
}

Table1 build_table1(double tol, double nu0) {
  if (!(tol > 0.0)) throw DomainError("build_table1: tol must be > 0");
  return build_table1(integrate_profile(nu0, tol));
}

Table1 build_table1(const SelfSimilarProfile& p) {
  const double z0 = g_constants().z0;
  Table1 t;
  Table1Summary& s = t.summary;
  s.nu0 = p.nu();
  s.sup_phi = p.sup_phi();
  s.g_minus = -g(s.sup_phi);
  s.y0 = inverse_phi(p, z0);
  s.kappa0 = (1.0 - s.y0) / (1.0 + s.y0);
  s.drift = p.energy_drift();
  s.total = 0.0;

  double product = 1.0;
  for (int k = 1; k <= kRows; ++k) {
    Table1Row row{};
    row.k = k;
    row.z_lo = z_of(k);
    row.z_hi = k == 1 ? z0 : z_of(k - 1);
    row.y_k = inverse_phi(p, row.z_lo);
    row.lambda_k = s.nu0 / std::sqrt(1.0 + row.y_k) + s.kappa0 * s.g_minus;
    // g(z0) vanishes exactly; the floating-point value does not.
    row.min_g = k == 1 ? std::min(g(row.z_lo), 0.0) : m_k(row.z_lo, row.z_hi);
    const double ratio =
        (2.0 * row.lambda_k - row.z_lo) / (2.0 * row.lambda_k - row.z_hi);
    row.product = product * ratio;
    row.contribution = row.min_g * (row.product - product);
    product = row.product;
    s.total += row.contribution;
    t.rows.push_back(row);
  }
  return t;
}

bool VerificationReport::overall() const {
  return !items.empty() &&
         std::all_of(items.begin(), items.end(), [](const ReportItem& i) { return i.pass; });
}

ReportItem check_main_inequality(const std::vector<Table1Row>& rows,
                                 const Table1Summary& summary) {
  double total = 0.0;
  for (const auto& r : rows) total += r.contribution;
  const double margin = total - summary.g_minus;
  std::string note = "rows 1.." + std::to_string(rows.empty() ? 0 : rows.back().k) +
                     ", total " + io::format_number(total) + " vs g_- " +
                     io::format_number(summary.g_minus);
  return make("main_inequality", margin, std::nullopt, 0.0, "total - g_- > 0",
              margin > 0.0, std::move(note));
}

double upper_integral(const SelfSimilarProfile& p, bool capped, double tol) {
  if (!p.is_global() || p.y_end() < 1.0)
    throw DomainError("upper_integral: profile does not reach y = 1");
  const double z_max = g_constants().z_max;
  quad::Integrand f;
  if (capped)
    f.eval = [&p, z_max](double y) { return g(std::min(p.phi_at(y), z_max)); };
  else
    f.eval = [&p](double y) { return g(p.phi_at(y)); };
  if (capped) f.breakpoints = crossings(p, z_max);
  return quad::integrate_sqrt_singular(f, 0.0, 1.0, tol);
}

ReportItem check_upper_integral(const SelfSimilarProfile& p, double tol) {
  const double v = upper_integral(p, true, tol);
  const bool ok = std::abs(v - 1.85024) <= 1e-3 && v < p.nu();
  return make("upper_integral", v, 1.85024, 1e-3,
              "|computed - target| <= tolerance and computed < nu0", ok,
              "nu0 = " + io::format_number(p.nu()));
}

double compute_C1(const std::vector<Table1Row>& rows) {
  if (rows.size() < kRows) throw DomainError("compute_C1: needs all 16 rows");
  double q = 1.0, c1 = 0.0;
  for (int k = 12; k <= kRows; ++k) {
    const Table1Row& r = rows[k - 1];
    const double next = q * (r.product / rows[k - 2].product);
    c1 += 2.0 * r.min_g * (next - q);
    q = next;
  }
  return c1;
}

double neutralization_margin(const std::vector<Table1Row>& rows,
                             const Table1Summary& summary) {
  if (rows.size() < 11) throw DomainError("neutralization_margin: needs rows 1..11");
  double s = 0.0;
  for (int k = 1; k <= 11; ++k) s += 2.0 * rows[k - 1].contribution;
  return s - 2.0 * summary.g_minus;
}

std::vector<ReportItem> check_C1(const Table1& table) {
  const double c1 = compute_C1(table.rows);
  const double third = c1 / 3.0;
  const double neut = neutralization_margin(table.rows, table.summary);
  return {near("C1", c1, 0.184221, 5e-4),
          make("C1_over_3", third, std::nullopt, 0.0, "C1/3 > 11 nu1/10 = 0.055",
               third > 1.1 * kNu1),
          make("neutralization", neut, std::nullopt, 0.0,
               "sum_{k<=11} 2 contribution_k - 2 g_- >= 0", neut >= 0.0)};
}

double pushup_integral(const LinearProfile& lin, double tol) {
  quad::Integrand f;
  f.eval = [&lin](double y) { return lin.phi_at(y); };
  return quad::integrate_sqrt_singular(f, 0.0, 8.0 / 9.0, tol);
}

double pushup_integral_exact(double tol) {
  quad::Integrand f;
  f.eval = [](double y) { return linear_profile_exact(y); };
  return quad::integrate_sqrt_singular(f, 0.0, 8.0 / 9.0, tol);
}

std::vector<ReportItem> check_pushup(double ode_tol, double tol) {
  const double I = pushup_integral(integrate_linear_profile(ode_tol), tol);
  const double exact = pushup_integral_exact(std::min(tol, 1e-12));
  const double factor = 99.0 / 50.0 * I;
  return {near("pushup_I_star", I, 0.604556, 1e-4),
          make("pushup_factor", factor, std::nullopt, 0.0, "(99/50) I_* > 11/10",
               factor > 1.1),
          make("pushup_closed_form", std::abs(I - exact), 0.0, 1e-8,
               "|I_* - closed-form I_*| < tolerance", std::abs(I - exact) < 1e-8)};
}

VerificationReport run_all(const RunOptions& opt) {
  const auto policy = opt.jobs > 1 ? std::launch::async : std::launch::deferred;
  auto profile = std::async(policy, [&] { return integrate_profile(opt.nu0, opt.tol); });
  auto pushup = std::async(policy, [&] { return check_pushup(opt.tol, kQuadTol); });
  auto nu2 = std::async(policy, [&] { return find_nu2(1e-9, std::min(opt.tol, 1e-11)); });

  VerificationReport rep;
  auto guard = [&rep](const std::vector<std::string>& names, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      for (const auto& n : names) rep.items.push_back(failed(n, e.what()));
    }
  };

  std::optional<SelfSimilarProfile> phi;
  std::string profile_error;
  try {
    phi.emplace(profile.get());
  } catch (const std::exception& e) {
    profile_error = e.what();
  }
  auto need_profile = [&] {
    if (!phi) throw Error("profile integration failed: " + profile_error);
  };

  guard({"table1_cells_max_deviation", "table1_sup_phi", "table1_y0", "table1_kappa0",
         "table1_g_minus", "table1_total", "table1_products_increasing",
         "table1_contributions_nonnegative", "main_inequality"},
        [&] {
          need_profile();
          Table1 t = build_table1(*phi);
          const auto& ref = reference_rows();
          double dev = 0.0;
          for (int k = 0; k < kRows; ++k) {
            const Table1Row& r = t.rows[k];
            for (auto [a, b] : {std::pair{r.y_k, ref[k].y_k}, {r.lambda_k, ref[k].lambda_k},
                                {r.min_g, ref[k].min_g}, {r.product, ref[k].product},
                                {r.contribution, ref[k].contribution}})
              dev = std::max(dev, std::abs(a - b));
          }
          const Table1Summary rs = reference_summary();
          std::vector<ReportItem> out;
          out.push_back(near("table1_cells_max_deviation", dev, 0.0, 5e-5));
          out.push_back(near("table1_sup_phi", t.summary.sup_phi, rs.sup_phi, 5e-5));
          out.push_back(near("table1_y0", t.summary.y0, rs.y0, 5e-5));
          out.push_back(near("table1_kappa0", t.summary.kappa0, rs.kappa0, 5e-5));
          out.push_back(near("table1_g_minus", t.summary.g_minus, rs.g_minus, 5e-5));
          out.push_back(near("table1_total", t.summary.total, rs.total, 5e-5));
          bool increasing = true, nonneg = true;
          for (int k = 0; k < kRows; ++k) {
            if (k > 0 && !(t.rows[k].product > t.rows[k - 1].product)) increasing = false;
            if (t.rows[k].contribution < 0.0) nonneg = false;
          }
          out.push_back(make("table1_products_increasing", increasing ? 1.0 : 0.0,
                             std::nullopt, 0.0, "product_k strictly increasing", increasing));
          out.push_back(make("table1_contributions_nonnegative", nonneg ? 1.0 : 0.0,
                             std::nullopt, 0.0, "contribution_k >= 0", nonneg));
          out.push_back(check_main_inequality(t.rows, t.summary));
          rep.items.insert(rep.items.end(), out.begin(), out.end());
          rep.table = std::move(t);
        });

  guard({"upper_integral"}, [&] {
    need_profile();
    rep.items.push_back(check_upper_integral(*phi, kQuadTol));
  });
  guard({"g_max"}, [&] {
    const auto gc = g_constants();
    rep.items.push_back(near("g_max", g(gc.z_max), 1.018080, 5e-6));
  });
  guard({"C1", "C1_over_3", "neutralization"}, [&] {
    if (!rep.table) throw Error("table unavailable");
    auto items = check_C1(*rep.table);
    rep.items.insert(rep.items.end(), items.begin(), items.end());
  });
  guard({"pushup_I_star", "pushup_factor", "pushup_closed_form"}, [&] {
    auto items = pushup.get();
    rep.items.insert(rep.items.end(), items.begin(), items.end());
  });
  guard({"nu2"}, [&] { rep.items.push_back(near("nu2", nu2.get(), 1.575, 5e-3)); });
  guard({"z0"}, [&] { rep.items.push_back(near("z0", g_constants().z0, 1.681793, 5e-7)); });
  guard({"profile_drift"}, [&] {
    need_profile();
    const double d = phi->energy_drift();
    rep.items.push_back(make("profile_drift", d, 0.0, 1e-8, "drift < tolerance", d < 1e-8));
  });
  return rep;
}

void write_table_csv(std::ostream& os, const Table1& t) {
  os << "k,range,y_k,lambda_k,min_g,product,contribution\n";
  for (const auto& r : t.rows) {
    os << r.k << ',' << io::format_number(r.z_lo) << '-' << io::format_number(r.z_hi) << ','
       << io::format_number(r.y_k) << ',' << io::format_number(r.lambda_k) << ','
       << io::format_number(r.min_g) << ',' << io::format_number(r.product) << ','
       << io::format_number(r.contribution) << '\n';
  }
}

std::string report_json(const VerificationReport& r) {
  using nlohmann::ordered_json;
  auto num = [](double x) -> ordered_json {
    if (!std::isfinite(x)) return nullptr;
    return x;
  };
  ordered_json j;
  j["overall"] = r.overall() ? "pass" : "fail";
  ordered_json items = ordered_json::array();
  for (const auto& i : r.items) {
    ordered_json o;
    o["name"] = i.name;
    o["computed"] = num(i.computed);
    o["target"] = i.target ? num(*i.target) : ordered_json(nullptr);
    o["tolerance"] = i.tolerance;
    o["predicate"] = i.predicate;
    o["pass"] = i.pass;
    if (!i.note.empty()) o["note"] = i.note;
    items.push_back(std::move(o));
  }
  j["items"] = std::move(items);
  if (r.table) {
    const auto& s = r.table->summary;
    ordered_json t;
    t["nu0"] = s.nu0;
    t["sup_phi"] = s.sup_phi;
    t["y0"] = s.y0;
    t["kappa0"] = s.kappa0;
    t["g_minus"] = s.g_minus;
    t["total"] = s.total;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.table->rows)
      rows.push_back({{"k", row.k}, {"z_lo", row.z_lo}, {"z_hi", row.z_hi},
                      {"y_k", row.y_k}, {"lambda_k", row.lambda_k},
                      {"min_g", row.min_g}, {"product", row.product},
                      {"contribution", row.contribution}});
    t["rows"] = std::move(rows);
    j["table1"] = std::move(t);
  }
  return j.dump(2) + "\n";
}

}  // namespace critwave::verify
