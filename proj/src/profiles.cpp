#include "critwave/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "critwave/errors.hpp"
#include "critwave/io.hpp"
#include "critwave/nonlinearity.hpp"
#include "critwave/ode.hpp"

namespace critwave {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

double theta_of(double y) {
  if (y >= 1.0) return kHalfPi;
  return std::asin(y);
}

double angular_energy(double phi, double dphi) {
  return 0.5 * dphi * dphi + 1.125 * phi * phi - 0.3 * abs_pow_10_3(phi);
}

struct Run {
  AngularTrajectory path;
  bool blew_up = false;
};

Run integrate_angular(double slope, double tol, double theta_end,
                      double threshold, double max_step, bool nonlinear) {
  using Solver = ode::DormandPrince<double, 2>;
  using State = Solver::State;
  ode::Options<double> opt;
  opt.rtol = tol;
  opt.atol = tol;
  opt.h_max = max_step;
  opt.h0 = std::min(1e-3, max_step);
  const Solver solver(opt);
  auto rhs = [nonlinear](double, const State& s) {
    State d;
    d[0] = s[1];
    d[1] = -2.25 * s[0] + (nonlinear ? F(s[0]) : 0.0);
    return d;
  };
  auto event = [threshold](double, const State& s) {
    return std::abs(s[0]) > threshold;
  };
  const auto sol = solver.integrate(rhs, 0.0, State(0.0, slope), theta_end, event);

  std::vector<double> th, ph, dph, ddph;
  th.reserve(sol.samples.size());
  for (const auto& s : sol.samples) {
    th.push_back(s.t);
    ph.push_back(s.y[0]);
    dph.push_back(s.y[1]);
    ddph.push_back(s.dy[1]);
  }
  return {AngularTrajectory(std::move(th), std::move(ph), std::move(dph),
                            std::move(ddph)),
          sol.stop == ode::Stop::event};
}

// Refines a root of h on [a, b] where h(a), h(b) differ in sign.
template <typename H>
double bisect_root(H&& h, double a, double b, double tol) {
  double fa = h(a);
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = h(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

AngularTrajectory::AngularTrajectory(std::vector<double> theta,
                                     std::vector<double> phi,
                                     std::vector<double> dphi,
                                     std::vector<double> ddphi)
    : theta_(std::move(theta)),
      phi_(std::move(phi)),
      dphi_(std::move(dphi)),
      ddphi_(std::move(ddphi)) {
  if (theta_.empty() || theta_.size() != phi_.size() ||
      theta_.size() != dphi_.size() || theta_.size() != ddphi_.size())
    throw DomainError("AngularTrajectory: inconsistent node arrays");
}

std::size_t AngularTrajectory::segment(double theta) const {
  if (theta < theta_.front() || theta > theta_.back())
    throw DomainError("AngularTrajectory: angle outside integrated range");
  if (theta_.size() == 1) return 0;
  auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
  std::size_t i = static_cast<std::size_t>(it - theta_.begin());
  if (i == 0) i = 1;
  if (i >= theta_.size()) i = theta_.size() - 1;
  return i - 1;
}

double AngularTrajectory::phi_at(double theta) const {
  const std::size_t i = segment(theta);
  if (theta_.size() == 1) return phi_[0];
  const double h = theta_[i + 1] - theta_[i];
  const double s = (theta - theta_[i]) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  const double h3 = 10 * s3 - 15 * s4 + 6 * s5;
  const double h4 = -4 * s3 + 7 * s4 - 3 * s5;
  const double h5 = 0.5 * s3 - s4 + 0.5 * s5;
  return phi_[i] * h0 + h * dphi_[i] * h1 + h * h * ddphi_[i] * h2 +
         phi_[i + 1] * h3 + h * dphi_[i + 1] * h4 + h * h * ddphi_[i + 1] * h5;
}

double AngularTrajectory::dphi_at(double theta) const {
  const std::size_t i = segment(theta);
  if (theta_.size() == 1) return dphi_[0];
  const double h = theta_[i + 1] - theta_[i];
  const double s = (theta - theta_[i]) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
  const double d0 = -30 * s2 + 60 * s3 - 30 * s4;
  const double d1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  const double d2 = s - 4.5 * s2 + 6 * s3 - 2.5 * s4;
  const double d3 = 30 * s2 - 60 * s3 + 30 * s4;
  const double d4 = -12 * s2 + 28 * s3 - 15 * s4;
  const double d5 = 1.5 * s2 - 4 * s3 + 2.5 * s4;
  return (phi_[i] * d0 + h * dphi_[i] * d1 + h * h * ddphi_[i] * d2 +
          phi_[i + 1] * d3 + h * dphi_[i + 1] * d4 + h * h * ddphi_[i + 1] * d5) /
         h;
}

SelfSimilarProfile::SelfSimilarProfile(double nu, AngularTrajectory path,
                                       Category category, double sup_phi,
                                       double energy_drift)
    : nu_(nu),
      path_(std::move(path)),
      category_(category),
      sup_phi_(sup_phi),
      energy_drift_(energy_drift) {}

std::vector<double> SelfSimilarProfile::grid() const {
  std::vector<double> y;
  for (double th : path_.theta())
    if (th < kHalfPi) y.push_back(std::sin(th));
  return y;
}

std::vector<double> SelfSimilarProfile::phi() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < path_.size(); ++i)
    if (path_.theta()[i] < kHalfPi) out.push_back(path_.phi()[i]);
  return out;
}

std::vector<double> SelfSimilarProfile::dphi() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < path_.size(); ++i) {
    const double th = path_.theta()[i];
    if (th < kHalfPi) out.push_back(path_.dphi()[i] / std::cos(th));
  }
  return out;
}

double SelfSimilarProfile::y_end() const {
  const double th = path_.theta_end();
  return th >= kHalfPi ? 1.0 : std::sin(th);
}

double SelfSimilarProfile::phi_at(double y) const {
  if (y < 0.0 || y > y_end())
    throw DomainError("phi_at: y outside the integrated range");
  return path_.phi_at(std::min(theta_of(y), path_.theta_end()));
}

double SelfSimilarProfile::dphi_at(double y) const {
  if (y < 0.0 || y >= 1.0 || y > y_end())
    throw DomainError("dphi_at: y outside [0, y_end] ∩ [0, 1)");
  const double th = std::min(theta_of(y), path_.theta_end());
  return path_.dphi_at(th) / std::cos(th);
}

std::vector<double> LinearProfile::grid() const {
  std::vector<double> y;
  for (double th : path_.theta())
    if (th < kHalfPi) y.push_back(std::sin(th));
  return y;
}

std::vector<double> LinearProfile::phi() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < path_.size(); ++i)
    if (path_.theta()[i] < kHalfPi) out.push_back(path_.phi()[i]);
  return out;
}

std::vector<double> LinearProfile::dphi() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < path_.size(); ++i) {
    const double th = path_.theta()[i];
    if (th < kHalfPi) out.push_back(path_.dphi()[i] / std::cos(th));
  }
  return out;
}

double LinearProfile::phi_at(double y) const {
  if (y < 0.0 || y > 1.0) throw DomainError("phi_at: y outside [0, 1]");
  return path_.phi_at(theta_of(y));
}

SelfSimilarProfile integrate_profile(double nu, double tol,
                                     const ProfileOptions& opt) {
  if (!(tol > 0.0)) throw DomainError("integrate_profile: tol must be > 0");
  if (!(nu >= 0.0)) throw DomainError("integrate_profile: nu must be >= 0");
  if (!(opt.y_stop > 0.0 && opt.y_stop <= 1.0))
    throw DomainError("integrate_profile: y_stop must lie in (0, 1]");

  Run run = integrate_angular(nu, tol, theta_of(opt.y_stop),
                              opt.blowup_threshold, opt.max_step, true);
  const AngularTrajectory& path = run.path;
  const std::size_t n = path.size();

  const double h0 = 0.5 * nu * nu;
  double drift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = path.phi()[i];
    double dev = std::abs(angular_energy(phi, path.dphi()[i]) - h0);
    // relative to the size of the cancelling terms
    dev /= std::max(1.0, 0.3 * abs_pow_10_3(phi));
    drift = std::max(drift, dev);
  }
  const double drift_tol =
      opt.drift_tolerance > 0.0 ? opt.drift_tolerance : std::max(1e-8, 1e3 * tol);
  if (drift > drift_tol)
    throw IntegrationFailure("integrate_profile: conserved quantity drifted by " +
                                 std::to_string(drift),
                             path.theta_end(), 0.0);

  double sup = *std::max_element(path.phi().begin(), path.phi().end());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d0 = path.dphi()[i], d1 = path.dphi()[i + 1];
    if (d0 > 0.0 && d1 < 0.0) {
      const double th = bisect_root([&](double t) { return path.dphi_at(t); },
                                    path.theta()[i], path.theta()[i + 1], 1e-15);
      sup = std::max(sup, path.phi_at(th));
    }
  }

  Category cat;
  if (run.blew_up) {
    cat = BlowUp{std::sin(path.theta_end())};
  } else {
    const double slope = path.dphi().back();
    cat = Global{path.phi().back(), slope * slope, slope};
  }
  return SelfSimilarProfile(nu, std::move(run.path), cat, sup, drift);
}

double conserved_energy(const SelfSimilarProfile& p, double y) {
  if (y < 0.0 || y > p.y_end())
    throw DomainError("conserved_energy: y outside the profile grid");
  const double th = std::min(theta_of(y), p.path().theta_end());
  return angular_energy(p.path().phi_at(th), p.path().dphi_at(th));
}

double inverse_phi(const SelfSimilarProfile& p, double z, double tol) {
  const AngularTrajectory& path = p.path();
  if (z == 0.0) return 0.0;
  if (z < 0.0 || z > p.sup_phi())
    throw NoSolution("inverse_phi: z outside the range of phi");

  auto shifted = [&](double th) { return path.phi_at(th) - z; };
  const std::size_t n = path.size();

  // End of the initial increasing segment.
  double rise_end = path.theta_end();
  double rise_max = path.phi().back();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (path.dphi()[i] > 0.0 && path.dphi()[i + 1] <= 0.0) {
      rise_end = bisect_root([&](double t) { return path.dphi_at(t); },
                             path.theta()[i], path.theta()[i + 1], 1e-15);
      rise_max = path.phi_at(rise_end);
      break;
    }
  }

  auto crossings = [&]() {
    std::vector<double> ys;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double a = shifted(path.theta()[i]);
      const double b = shifted(path.theta()[i + 1]);
      if ((a <= 0.0) != (b <= 0.0))
        ys.push_back(std::sin(bisect_root(shifted, path.theta()[i],
                                          path.theta()[i + 1], 1e-15)));
    }
    return ys;
  };

  if (z > rise_max)
    throw Ambiguity("inverse_phi: z is not reached on the initial monotone "
                    "segment",
                    crossings());

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double b = path.phi()[i + 1];
    if (b >= z) {
      const double hi = std::min(path.theta()[i + 1], rise_end);
      const double th = bisect_root(shifted, path.theta()[i], hi, 0.25 * tol);
      return std::sin(th);
    }
  }
  // z == rise_max reached only at an interior extremum.
  return std::sin(rise_end);
}

LinearProfile integrate_linear_profile(double tol) {
  if (!(tol > 0.0)) throw DomainError("integrate_linear_profile: tol must be > 0");
  Run run = integrate_angular(1.0, tol, kHalfPi, 1e300, 0.02, false);
  return LinearProfile(std::move(run.path));
}

double linear_profile_exact(double y) {
  if (y < -1.0 || y > 1.0) throw DomainError("linear_profile_exact: |y| > 1");
  return 2.0 / 3.0 * std::sin(1.5 * theta_of(y));
}

double find_nu2(double tol, double ode_tol) {
  if (!(tol > 0.0)) throw DomainError("find_nu2: tol must be > 0");
  auto slope = [ode_tol](double nu) {
    const auto p = integrate_profile(nu, ode_tol);
    if (!p.is_global()) throw NoSolution("find_nu2: profile blew up inside bracket");
    return std::get<Global>(p.category()).limit_slope;
  };
  double lo = 1.0, hi = 1.86;
  double f_lo = slope(lo), f_hi = slope(hi);
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    std::vector<std::pair<double, double>> scan;
    for (double nu = 0.5; nu <= 2.0 + 1e-12; nu += 0.1) scan.emplace_back(nu, slope(nu));
    throw BracketFailure("find_nu2: no sign change of the limit slope on [1, 1.86]",
                         std::move(scan));
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = slope(mid);
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

WronskianPair wronskian_compare(double c, double y, double tol) {
  if (!(c > 0.0 && c <= 0.05))
    throw DomainError("wronskian_compare: need 0 < c <= 0.05");
  if (!(y > 0.0 && y < 1.0)) throw DomainError("wronskian_compare: need y in (0,1)");
  ProfileOptions opt;
  opt.y_stop = y;
  const auto p = integrate_profile(c, tol, opt);
  const auto lin = integrate_linear_profile(tol);
  return {p.phi_at(y), c * lin.phi_at(y)};
}

void write_profile_csv(std::ostream& os, const SelfSimilarProfile& p) {
  os << "y,phi,dphi,H\n";
  const auto& path = p.path();
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double th = path.theta()[i];
    if (th >= kHalfPi) continue;
    const double phi = path.phi()[i];
    const double dphi_theta = path.dphi()[i];
    os << io::format_number(std::sin(th)) << ',' << io::format_number(phi) << ','
       << io::format_number(dphi_theta / std::cos(th)) << ','
       << io::format_number(angular_energy(phi, dphi_theta)) << '\n';
  }
}

}  // namespace critwave
