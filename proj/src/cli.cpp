#include "critwave/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "critwave/errors.hpp"
#include "critwave/io.hpp"
#include "critwave/nonlinearity.hpp"
#include "critwave/pdesim.hpp"
#include "critwave/profiles.hpp"
#include "critwave/verify.hpp"

namespace critwave::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using io::format_number;

namespace {

struct UsageError : Error {
  using Error::Error;
};

void check_input(const std::string& path) {
  if (path.empty()) return;
  if (!fs::is_regular_file(path)) throw UsageError("input file not found: " + path);
}

void check_output(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw UsageError("output directory does not exist: " + parent.string());
}

void emit(const std::string& path, std::ostream& out,
          const std::function<void(std::ostream&)>& producer) {
  if (path.empty())
    producer(out);
  else
    io::write_atomically(path, producer);
}

ordered_json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size()) throw UsageError("not a number: '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

// Uniform spacing of a grid column, or throws.
double uniform_step(const std::vector<double>& x, const std::string& what) {
  if (x.size() < 2) throw DomainError(what + ": need at least 2 rows");
  const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  if (!(h > 0.0)) throw DomainError(what + ": grid must be increasing");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs((x[i] - x[i - 1]) - h) > 1e-6 * h)
      throw DomainError(what + ": grid must be uniform");
  return h;
}

RadiationProfile profile_from_csv(const std::string& path) {
  const io::CsvTable t = io::read_csv(fs::path(path));
  const auto& s = t.column("s");
  const double ds = uniform_step(s, path);
  return RadiationProfile::sampled(s.front(), ds, t.column("G"));
}

RadialData data_from_csv(const std::string& path,
                         std::optional<double> tail = std::nullopt) {
  const io::CsvTable t = io::read_csv(fs::path(path));
  return RadialData::sampled(t.column("r"), t.column("u0"), t.column("u1"), tail);
}

int cmd_constants(const std::string& out_path, std::ostream& out) {
  const auto gc = g_constants();
  ordered_json j;
  j["z0"] = gc.z0;
  j["z_max"] = gc.z_max;
  j["g_max"] = gc.g_max;
  j["sigma4"] = sigma4<>;
  j["nu0"] = verify::kNu0;
  j["nu1"] = verify::kNu1;
  j["ground_state_energy"] = ground_state_energy();
  j["ground_state_tau2_max"] = ground_state_tau2(std::sqrt(15.0));
  emit(out_path, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kOk;
}

int cmd_profile(double nu, double tol, const std::string& out_path, std::ostream& out,
                std::ostream& err) {
  const SelfSimilarProfile p = integrate_profile(nu, tol);
  emit(out_path, out, [&](std::ostream& os) { write_profile_csv(os, p); });
  err << "profile nu=" << format_number(nu) << ": "
      << (p.is_global() ? "global" : "blow-up") << ", sup phi " << format_number(p.sup_phi())
      << ", y_end " << format_number(p.y_end()) << ", drift "
      << format_number(p.energy_drift()) << '\n';
  if (const auto* g = std::get_if<Global>(&p.category()))
    err << "  limit phi " << format_number(g->limit_phi) << ", limit flux "
        << format_number(g->limit_flux) << '\n';
  return kOk;
}

int cmd_table1(double tol, double nu0, const std::string& out_path, std::ostream& out,
               std::ostream& err) {
  const verify::Table1 t = verify::build_table1(tol, nu0);
  emit(out_path, out, [&](std::ostream& os) { verify::write_table_csv(os, t); });
  err << "total " << format_number(t.summary.total) << ", g_- "
      << format_number(t.summary.g_minus) << ", sup phi " << format_number(t.summary.sup_phi)
      << ", y0 " << format_number(t.summary.y0) << ", kappa0 "
      << format_number(t.summary.kappa0) << '\n';
  return kOk;
}

int cmd_verify(const verify::RunOptions& opt, const std::string& out_path,
               const std::string& table_path, std::ostream& out, std::ostream& err) {
  const verify::VerificationReport rep = verify::run_all(opt);
  const std::string json = verify::report_json(rep);
  emit(out_path, out, [&](std::ostream& os) { os << json; });
  if (!table_path.empty()) {
    if (!rep.table) {
      err << "table not written: it could not be built\n";
    } else {
      io::write_atomically(table_path,
                           [&](std::ostream& os) { verify::write_table_csv(os, *rep.table); });
    }
  }
  for (const auto& i : rep.items)
    err << (i.pass ? "PASS " : "FAIL ") << i.name << " = " << format_number(i.computed)
        << (i.note.empty() ? "" : "  (" + i.note + ")") << '\n';
  err << "overall: " << (rep.overall() ? "pass" : "fail") << '\n';
  return rep.overall() ? kOk : kVerificationFailure;
}

struct RadiationArgs {
  std::string action, in, out;
  std::optional<double> R, dr, rmax;
};

int cmd_radiation(const RadiationArgs& a, std::ostream& out, std::ostream& err) {
  if (a.action == "from-data") {
    // The r^{-3} continuation is exact outside the support of a compact profile.
    const RadialData d = data_from_csv(a.in, 3.0);
    const RadiationProfile G = profile_from_data(d);
    const io::CsvTable t = io::read_csv(fs::path(a.in));
    const auto& r = t.column("r");
    const double b = r.back();
    const double h = a.dr.value_or((r.back() - r.front()) / static_cast<double>(r.size() - 1));
    if (!(h > 0.0)) throw UsageError("--dr must be > 0");
    const long n = std::lround(b / h);
    emit(a.out, out, [&](std::ostream& os) {
      os << "s,G\n";
      for (long i = -n; i <= n; ++i) {
        const double s = static_cast<double>(i) * h;
        os << format_number(s) << ',' << format_number(G(s)) << '\n';
      }
    });
    err << "profile on [-" << format_number(b) << ", " << format_number(b) << "]\n";
    return kOk;
  }

  const RadiationProfile G = profile_from_csv(a.in);
  if (a.action == "to-data") {
    const double reach = std::max(std::abs(G.support_lo()), std::abs(G.support_hi()));
    const double rmax = a.rmax.value_or(2.0 * reach);
    const double h = a.dr.value_or(G.breakpoints().size() > 1
                                       ? G.breakpoints()[1] - G.breakpoints()[0]
                                       : 0.01);
    if (!(h > 0.0) || !(rmax > 0.0)) throw UsageError("--dr and --rmax must be > 0");
    const RadialData d = data_from_profile(G);
    emit(a.out, out, [&](std::ostream& os) {
      os << "r,u0,u1\n";
      for (long i = 1; static_cast<double>(i) * h <= rmax * (1.0 + 1e-12); ++i) {
        const double r = static_cast<double>(i) * h;
        os << format_number(r) << ',' << format_number(d.u0(r)) << ','
           << format_number(d.u1(r)) << '\n';
      }
    });
    return kOk;
  }
  if (a.action == "residues") {
    if (!a.R) throw UsageError("residues needs --R");
    const ResiduePair p = residues(G, *a.R);
    ordered_json j;
    j["R"] = *a.R;
    j["tau1"] = p.tau1;
    j["tau2"] = p.tau2;
    j["exterior_energy"] = exterior_energy_identity(G, *a.R);
    emit(a.out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    return kOk;
  }
  const AsymptoticNumbers an = asymptotic_numbers(G);
  ordered_json j;
  j["alpha1"] = an.alpha1;
  j["alpha2"] = an.alpha2;
  emit(a.out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kOk;
}

struct SimulateArgs {
  std::string preset, data, gspec, out, diag, extract;
  std::optional<double> nu, virial_scale;
  double rmin = 1.0, rmax = 2.0, dr = 0.01, T = 1.0, cfl = 1.0;
  int store_every = 0;
  bool linear = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.preset.empty() == a.data.empty())
    throw UsageError("simulate needs exactly one of --preset or --data");
  pde::SimConfig cfg;
  cfg.r_min = a.rmin;
  cfg.r_max = a.rmax;
  cfg.dr = a.dr;
  cfg.cfl = a.cfl;
  cfg.T = a.T;
  if (a.store_every > 0) {
    cfg.store_every = a.store_every;
  } else {
    const long steps = std::lround(std::abs(a.T) / (a.cfl * a.dr));
    cfg.store_every = static_cast<int>(std::max(1L, steps / 50));
  }

  RadialData d;
  std::optional<SelfSimilarProfile> ss;
  std::optional<RadiationProfile> G;
  if (!a.data.empty()) {
    d = data_from_csv(a.data);
    cfg.nonlinearity = a.linear ? pde::Nonlinearity::linear : pde::Nonlinearity::focusing;
  } else if (a.preset == "ground-state") {
    d.u0 = {[](double r) { return ground_state(r).value; }, {}};
    d.du0 = {[](double r) { return ground_state(r).dr; }, {}};
    d.u1 = {[](double) { return 0.0; }, {}};
    cfg.boundary = pde::Boundary::dirichlet_exact;
    cfg.exact_u = [](double r, double) { return ground_state(r).value; };
  } else if (a.preset == "free-wave") {
    if (a.gspec.empty()) throw UsageError("free-wave needs --gspec");
    G = parse_gspec(a.gspec);
    d = data_from_profile(*G);
    cfg.nonlinearity = pde::Nonlinearity::linear;
    cfg.boundary = pde::Boundary::dirichlet_exact;
    const RadiationProfile g = *G;
    cfg.exact_u = [g](double r, double t) { return free_wave(g, r, t); };
  } else if (a.preset == "self-similar") {
    if (!a.nu) throw UsageError("self-similar needs --nu");
    if (!(a.rmin > std::abs(a.T)))
      throw UsageError("self-similar needs --rmin > |T| (the field lives in |t| < r)");
    ss.emplace(integrate_profile(*a.nu, 1e-12));
    const double nu = *a.nu;
    d.u0 = {[](double) { return 0.0; }, {}};
    d.u1 = {[nu](double r) { return nu * std::pow(r, -2.5); }, {}};
    cfg.boundary = pde::Boundary::dirichlet_exact;
    const SelfSimilarProfile& p = *ss;
    cfg.exact_u = [&p](double r, double t) {
      const double y = t / r;
      const double v = y >= 0.0 ? p.phi_at(y) : -p.phi_at(-y);
      return std::pow(r, -1.5) * v;
    };
  } else {
    throw UsageError("unknown preset: " + a.preset);
  }

  const pde::Trajectory tr = pde::simulate(d, cfg);
  if (tr.blowup)
    err << "blow-up at t = " << format_number(tr.blowup->time) << ", r = "
        << format_number(tr.blowup->radius) << '\n';

  emit(a.out, out, [&](std::ostream& os) {
    os << "t,r,u,u_t\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const Eigen::VectorXd u = tr.u(i), ut = tr.u_t(i);
      for (Eigen::Index j = 0; j < u.size(); ++j)
        os << format_number(tr.times[i]) << ',' << format_number(tr.r[j]) << ','
           << format_number(u[j]) << ',' << format_number(ut[j]) << '\n';
    }
  });

  if (!a.diag.empty()) {
    ordered_json j;
    j["r_min"] = cfg.r_min;
    j["r_max"] = cfg.r_max;
    j["dr"] = cfg.dr;
    j["dt"] = cfg.dt();
    j["boundary"] = cfg.boundary == pde::Boundary::dirichlet_exact ? "dirichlet-exact"
                                                                    : "domain-of-dependence";
    j["nonlinearity"] = cfg.nonlinearity == pde::Nonlinearity::linear ? "linear" : "focusing";
    if (tr.blowup)
      j["blowup"] = {{"time", tr.blowup->time}, {"radius", tr.blowup->radius}};
    else
      j["blowup"] = nullptr;
    ordered_json series = ordered_json::array();
    for (double t : tr.times) {
      ordered_json e;
      e["t"] = t;
      const auto [lo, hi] = tr.trusted(t);
      e["energy"] = lo < hi ? number(pde::energy(tr, t, cfg.r_min)) : ordered_json(nullptr);
      if (a.virial_scale) {
        try {
          const pde::Virial v = pde::virial(tr, t, *a.virial_scale);
          e["J"] = v.J;
          e["dJ"] = v.dJ;
          e["d2J"] = v.d2J;
        } catch (const DomainError&) {
          e["J"] = nullptr;
        }
      }
      series.push_back(std::move(e));
    }
    j["series"] = std::move(series);
    if (!a.extract.empty()) {
      ordered_json ex = ordered_json::array();
      for (double s : split_numbers(a.extract)) {
        ordered_json e;
        e["s"] = s;
        try {
          e["G_plus"] = pde::extract_outgoing(tr, s);
        } catch (const DomainError& x) {
          e["G_plus"] = nullptr;
          e["error"] = x.what();
        }
        if (G) e["G_plus_exact"] = (*G)(-s);
        ex.push_back(std::move(e));
      }
      j["extracted"] = std::move(ex);
    }
    io::write_atomically(a.diag, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }
  err << "simulated " << tr.times.size() << " snapshots on " << tr.r.size() << " nodes\n";
  return kOk;
}

}  // namespace

RadiationProfile parse_gspec(const std::string& spec) {
  if (spec == "ground-state") return ground_state_profile();
  if (spec.rfind("file:", 0) == 0) {
    const std::string path = spec.substr(5);
    check_input(path);
    return profile_from_csv(path);
  }
  if (spec.rfind("bump:", 0) == 0) {
    const auto v = split_numbers(spec.substr(5));
    if (v.size() != 3 || !(v[2] > 0.0))
      throw UsageError("bump spec is bump:A,c,w with w > 0");
    const double A = v[0], c = v[1], w = v[2];
    return RadiationProfile::closed_form(
        [A, c, w](double s) {
          const double x = (s - c) / w;
          return A * std::pow(1.0 - x * x, 6);
        },
        c - w, c + w);
  }
  throw UsageError("unknown G spec: " + spec);
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out,
                       std::ostream& err) {
  CLI::App app{"Radial 5D energy-critical wave toolkit", "critwave"};
  app.require_subcommand(1);

  std::string out_path;
  double tol = 1e-10;

  auto* constants = app.add_subcommand("constants", "closed-form constants as JSON");
  constants->add_option("--out", out_path, "output file (default stdout)");

  double nu = 0.0;
  auto* profile = app.add_subcommand("profile", "self-similar profile phi_nu as CSV");
  profile->add_option("--nu", nu, "phi'(0)")->required();
  profile->add_option("--tol", tol, "ODE tolerance")->check(CLI::PositiveNumber);
  profile->add_option("--out", out_path, "output CSV");

  double nu0 = verify::kNu0;
  auto* table1 = app.add_subcommand("table1", "the 16-row table as CSV");
  table1->add_option("--tol", tol, "ODE tolerance")->check(CLI::PositiveNumber);
  table1->add_option("--out", out_path, "output CSV");
  table1->add_option("--nu0", nu0)->group("");

  std::string table_path;
  int jobs = 1;
  auto* verify_cmd = app.add_subcommand("verify", "run every check, JSON report");
  verify_cmd->add_option("--tol", tol, "ODE tolerance")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--out", out_path, "report JSON");
  verify_cmd->add_option("--table", table_path, "also write the table CSV");
  verify_cmd->add_option("--jobs", jobs, "parallel checks")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--nu0", nu0)->group("");

  RadiationArgs ra;
  auto* radiation = app.add_subcommand("radiation", "radiation profile <-> data");
  radiation->add_option("action", ra.action, "to-data | from-data | residues | asymptotic")
      ->required()
      ->check(CLI::IsMember({"to-data", "from-data", "residues", "asymptotic"}));
  radiation->add_option("--in", ra.in, "input CSV (s,G or r,u0,u1)")->required();
  radiation->add_option("--R", ra.R, "radius for residues")->check(CLI::PositiveNumber);
  radiation->add_option("--dr", ra.dr, "output spacing")->check(CLI::PositiveNumber);
  radiation->add_option("--rmax", ra.rmax, "to-data grid end")->check(CLI::PositiveNumber);
  radiation->add_option("--out", ra.out, "output file");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "radial exterior PDE run");
  simulate->add_option("--preset", sa.preset, "ground-state | free-wave | self-similar")
      ->check(CLI::IsMember({"ground-state", "free-wave", "self-similar"}));
  simulate->add_option("--data", sa.data, "initial data CSV r,u0,u1");
  simulate->add_flag("--linear", sa.linear, "F = 0 for --data runs");
  simulate->add_option("--nu", sa.nu, "self-similar parameter");
  simulate->add_option("--gspec", sa.gspec, "free-wave profile: bump:A,c,w | ground-state | file:PATH");
  simulate->add_option("--rmin", sa.rmin)->required();
  simulate->add_option("--rmax", sa.rmax)->required();
  simulate->add_option("--dr", sa.dr)->required();
  simulate->add_option("--T", sa.T)->required();
  simulate->add_option("--cfl", sa.cfl);
  simulate->add_option("--store-every", sa.store_every, "steps between snapshots");
  simulate->add_option("--virial-scale", sa.virial_scale);
  simulate->add_option("--extract", sa.extract, "comma-separated s values for G_+(s)");
  simulate->add_option("--out", sa.out, "snapshots CSV t,r,u,u_t");
  simulate->add_option("--diag", sa.diag, "diagnostics JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*constants) {
      check_output(out_path);
      return cmd_constants(out_path, out);
    }
    if (*profile) {
      check_output(out_path);
      return cmd_profile(nu, tol, out_path, out, err);
    }
    if (*table1) {
      check_output(out_path);
      return cmd_table1(tol, nu0, out_path, out, err);
    }
    if (*verify_cmd) {
      check_output(out_path);
      check_output(table_path);
      verify::RunOptions opt;
      opt.tol = tol;
      opt.nu0 = nu0;
      opt.jobs = jobs;
      return cmd_verify(opt, out_path, table_path, out, err);
    }
    if (*radiation) {
      check_input(ra.in);
      check_output(ra.out);
      return cmd_radiation(ra, out, err);
    }
    if (*simulate) {
      check_input(sa.data);
      check_output(sa.out);
      check_output(sa.diag);
      return cmd_simulate(sa, out, err);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kComputationFailure;
  }
  return kUsage;
}

int parse_and_dispatch(int argc, const char* const* argv) {
  return parse_and_dispatch(argc, argv, std::cout, std::cerr);
}

}  // namespace critwave::cli
