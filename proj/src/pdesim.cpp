#include "critwave/pdesim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "critwave/errors.hpp"
#include "critwave/nonlinearity.hpp"

namespace critwave::pde {

namespace {

bool is_multiple(double x, double h, long& k) {
  const double q = x / h;
  k = std::lround(q);
  return std::abs(q - static_cast<double>(k)) < 1e-8 * std::max(1.0, std::abs(q));
}

// Trapezoid rule for samples f on the grid r, restricted to [a, b] with
// linear interpolation in the two partial cells.
double trapezoid(const Eigen::VectorXd& r, const Eigen::VectorXd& f, double a,
                 double b) {
  const Eigen::Index n = r.size();
  a = std::max(a, r[0]);
  b = std::min(b, r[n - 1]);
  if (!(a < b)) return 0.0;
  auto at = [&](double x) {
    Eigen::Index j = static_cast<Eigen::Index>(
        std::upper_bound(r.data(), r.data() + n, x) - r.data());
    j = std::clamp<Eigen::Index>(j, 1, n - 1) - 1;
    const double th = (x - r[j]) / (r[j + 1] - r[j]);
    return (1.0 - th) * f[j] + th * f[j + 1];
  };
  double total = 0.0;
  double x0 = a, f0 = at(a);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r[j] <= a) continue;
    if (r[j] >= b) break;
    total += 0.5 * (r[j] - x0) * (f0 + f[j]);
    x0 = r[j];
    f0 = f[j];
  }
  total += 0.5 * (b - x0) * (f0 + at(b));
  return total;
}

// Cubic Lagrange interpolation on the uniform grid.
double interpolate(const Eigen::VectorXd& r, const Eigen::VectorXd& f, double x) {
  const Eigen::Index n = r.size();
  const double h = r[1] - r[0];
  const double q = (x - r[0]) / h;
  Eigen::Index j0 = static_cast<Eigen::Index>(std::floor(q)) - 1;
  j0 = std::clamp<Eigen::Index>(j0, 0, n - 4);
  double acc = 0.0;
  for (Eigen::Index j = j0; j < j0 + 4; ++j) {
    double w = 1.0;
    for (Eigen::Index m = j0; m < j0 + 4; ++m)
      if (m != j) w *= (q - static_cast<double>(m)) / static_cast<double>(j - m);
    acc += w * f[j];
  }
  return acc;
}

class Stepper {
 public:
  Stepper(const SimConfig& cfg, const Eigen::VectorXd& r)
      : cfg_(cfg), r_(r), r2_(r.array().square()), dt_(cfg.dt()),
        focusing_(cfg.nonlinearity == Nonlinearity::focusing) {}

  // D²w + r²F(w/r²) - 2w/r² at interior nodes; ends left at zero.
  Eigen::VectorXd accel(const Eigen::VectorXd& w) const {
    const Eigen::Index n = w.size();
    const double inv = 1.0 / (cfg_.dr * cfg_.dr);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 1; j + 1 < n; ++j) {
      double v = (w[j + 1] - 2.0 * w[j] + w[j - 1]) * inv - 2.0 * w[j] / r2_[j];
      if (focusing_) v += r2_[j] * F(w[j] / r2_[j]);
      a[j] = v;
    }
    return a;
  }

  // Leapfrog with the 2w/r² term averaged over n ± 1, which keeps the
  // scheme stable at cfl = 1 near small r:
  //   (1 + q) w^{n+1} = 2w^n - (1 + q) w^{n-1} + dt² (D²w^n + r²F(w^n/r²)),
  // q = dt²/r².
  Eigen::VectorXd step(const Eigen::VectorXd& cur, const Eigen::VectorXd& prev) const {
    const Eigen::Index n = cur.size();
    const double inv = 1.0 / (cfg_.dr * cfg_.dr);
    const double dt2 = dt_ * dt_;
    Eigen::VectorXd next = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 1; j + 1 < n; ++j) {
      double a = (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]) * inv;
      if (focusing_) a += r2_[j] * F(cur[j] / r2_[j]);
      const double q1 = 1.0 + dt2 / r2_[j];
      next[j] = (2.0 * cur[j] - q1 * prev[j] + dt2 * a) / q1;
    }
    return next;
  }

  // Linearised operator applied to v (the w_t direction) around w.
  Eigen::VectorXd linear_accel(const Eigen::VectorXd& w, const Eigen::VectorXd& v) const {
    const Eigen::Index n = w.size();
    const double inv = 1.0 / (cfg_.dr * cfg_.dr);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 1; j + 1 < n; ++j) {
      double x = (v[j + 1] - 2.0 * v[j] + v[j - 1]) * inv - 2.0 * v[j] / r2_[j];
      if (focusing_) {
        const double u = w[j] / r2_[j];
        x += (7.0 / 3.0) * std::pow(std::abs(u), 4.0 / 3.0) * v[j];
      }
      a[j] = x;
    }
    return a;
  }

  void boundary(const Eigen::VectorXd& cur, Eigen::VectorXd& next, double t_next) const {
    const Eigen::Index N = cur.size() - 1;
    if (cfg_.boundary == Boundary::dirichlet_exact) {
      next[0] = r2_[0] * cfg_.exact_u(r_[0], t_next);
      next[N] = r2_[N] * cfg_.exact_u(r_[N], t_next);
      return;
    }
    const double c = cfg_.cfl;
    next[0] = cur[0] + c * (cur[1] - cur[0]);
    next[N] = cur[N] - c * (cur[N] - cur[N - 1]);
  }

  double dt() const { return dt_; }

 private:
  const SimConfig& cfg_;
  const Eigen::VectorXd& r_;
  Eigen::VectorXd r2_;
  double dt_;
  bool focusing_;
};

}  // namespace

int SimConfig::nodes() const {
  return static_cast<int>(std::lround((r_max - r_min) / dr)) + 1;
}

void SimConfig::validate() const {
  if (!(r_min > 0.0)) throw DomainError("SimConfig: r_min must be > 0");
  if (!(r_max > r_min)) throw DomainError("SimConfig: need r_min < r_max");
  if (!(dr > 0.0)) throw DomainError("SimConfig: dr must be > 0");
  if (!(cfl > 0.0 && cfl <= 1.0))
    throw DomainError("SimConfig: cfl must lie in (0, 1]");
  long cells = 0;
  if (!is_multiple(r_max - r_min, dr, cells))
    throw DomainError("SimConfig: dr must divide r_max - r_min");
  if (cells < 4) throw DomainError("SimConfig: need at least 4 cells");
  if (!std::isfinite(T)) throw DomainError("SimConfig: T must be finite");
  long steps = 0;
  if (!is_multiple(T, cfl * dr, steps))
    throw DomainError("SimConfig: T must be a whole number of time steps");
  if (store_every < 1) throw DomainError("SimConfig: store_every must be >= 1");
  if (boundary == Boundary::dirichlet_exact && !exact_u)
    throw DomainError("SimConfig: dirichlet_exact needs exact_u");
  if (!(overflow_guard > 0.0)) throw DomainError("SimConfig: overflow_guard must be > 0");
}

std::size_t Trajectory::index_at(double t) const {
  if (times.empty()) throw DomainError("Trajectory: no stored times");
  const double tol = 1e-6 * std::abs(config.dt()) + 1e-12 * std::abs(t);
  auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  if (it == times.end() || std::abs(*it - t) > tol) {
    std::ostringstream os;
    os << "Trajectory: t = " << t << " is not a stored time (range [" << times.front()
       << ", " << times.back() << "])";
    throw DomainError(os.str());
  }
  return static_cast<std::size_t>(it - times.begin());
}

Eigen::VectorXd Trajectory::u(std::size_t i) const {
  return w.at(i).cwiseQuotient(r.cwiseAbs2());
}

Eigen::VectorXd Trajectory::u_t(std::size_t i) const {
  return w_t.at(i).cwiseQuotient(r.cwiseAbs2());
}

Eigen::VectorXd Trajectory::w_r(std::size_t i) const {
  const Eigen::VectorXd& v = w.at(i);
  const Eigen::Index n = v.size();
  const double h = config.dr;
  Eigen::VectorXd d(n);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  for (Eigen::Index j = 1; j + 1 < n; ++j) d[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
  return d;
}

Eigen::VectorXd Trajectory::u_r(std::size_t i) const {
  const Eigen::VectorXd wr = w_r(i);
  const Eigen::VectorXd& v = w.at(i);
  Eigen::VectorXd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j)
    out[j] = (wr[j] - 2.0 * v[j] / r[j]) / (r[j] * r[j]);
  return out;
}

std::pair<double, double> Trajectory::trusted(double t) const {
  if (config.boundary == Boundary::dirichlet_exact)
    return {config.r_min, config.r_max};
  // One extra cell so centred differences never touch a polluted node.
  const double reach = std::abs(t) / config.cfl + config.dr;
  return {config.r_min + reach, config.r_max - reach};
}

Trajectory simulate(const RadialData& d, const SimConfig& cfg) {
  cfg.validate();
  if (!d.u0 || !d.u1) throw DomainError("simulate: data need u0 and u1");
  Trajectory tr;
  tr.config = cfg;
  const int n_nodes = cfg.nodes();
  tr.r = Eigen::VectorXd(n_nodes);
  for (int j = 0; j < n_nodes; ++j) tr.r[j] = cfg.r_min + cfg.dr * j;

  Stepper st(cfg, tr.r);
  const double dt = st.dt();
  const long steps = std::lround(cfg.T / dt);

  Eigen::VectorXd w0(n_nodes), v0(n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    const double r2 = tr.r[j] * tr.r[j];
    w0[j] = r2 * d.u0(tr.r[j]);
    v0[j] = r2 * d.u1(tr.r[j]);
  }

  Eigen::VectorXd prev = w0;
  // Taylor step to third order: w_tt and w_ttt from the equation.
  Eigen::VectorXd cur = w0 + dt * v0 + (0.5 * dt * dt) * st.accel(w0) +
                        (dt * dt * dt / 6.0) * st.linear_accel(w0, v0);
  st.boundary(w0, cur, dt);

  auto bad = [&](const Eigen::VectorXd& v, Eigen::Index& where) {
    for (Eigen::Index j = 0; j < v.size(); ++j)
      if (!std::isfinite(v[j]) || std::abs(v[j]) > cfg.overflow_guard) {
        where = j;
        return true;
      }
    return false;
  };

  tr.times.push_back(0.0);
  tr.w.push_back(w0);
  tr.w_t.push_back(v0);

  Eigen::Index where = 0;
  if (bad(cur, where)) {
    tr.blowup = BlowUpReport{dt, tr.r[where]};
  } else {
    // Invariant: prev = w^{n-1}, cur = w^n.
    for (long n = 1; n <= steps; ++n) {
      const double t_next = static_cast<double>(n + 1) * dt;
      Eigen::VectorXd next = st.step(cur, prev);
      st.boundary(cur, next, t_next);
      const bool store = n % cfg.store_every == 0 || n == steps;
      if (bad(next, where)) {
        tr.blowup = BlowUpReport{t_next, tr.r[where]};
        if (store) {
          tr.times.push_back(static_cast<double>(n) * dt);
          tr.w.push_back(cur);
          tr.w_t.push_back((cur - prev) / dt);
        }
        break;
      }
      if (store) {
        tr.times.push_back(static_cast<double>(n) * dt);
        tr.w.push_back(cur);
        tr.w_t.push_back((next - prev) / (2.0 * dt));
      }
      prev = std::move(cur);
      cur = std::move(next);
    }
  }

  if (dt < 0.0) {
    std::reverse(tr.times.begin(), tr.times.end());
    std::reverse(tr.w.begin(), tr.w.end());
    std::reverse(tr.w_t.begin(), tr.w_t.end());
  }
  return tr;
}

double energy(const Trajectory& tr, double t, double R, std::string* warning) {
  const std::size_t i = tr.index_at(t);
  auto [lo, hi] = tr.trusted(t);
  if (!(lo < hi)) throw DomainError("energy: no trusted region left at this time");
  double a = R;
  if (R < lo || R > hi) {
    a = std::clamp(R, lo, hi);
    if (warning) {
      std::ostringstream os;
      os << "energy: R = " << R << " clamped to " << a;
      *warning = os.str();
    }
  }
  const Eigen::VectorXd u = tr.u(i), ut = tr.u_t(i), ur = tr.u_r(i);
  const bool focusing = tr.config.nonlinearity == Nonlinearity::focusing;
  Eigen::VectorXd f(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    double e = 0.5 * (ur[j] * ur[j] + ut[j] * ut[j]);
    if (focusing) e -= 0.3 * abs_pow_10_3(u[j]);
    const double r2 = tr.r[j] * tr.r[j];
    f[j] = e * r2 * r2;
  }
  return sigma4<> * trapezoid(tr.r, f, a, hi);
}

double extract_outgoing(const Trajectory& tr, double s) {
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double t = tr.times[i];
    if (t <= 0.0) continue;
    const double r = t + s;
    auto [lo, hi] = tr.trusted(t);
    if (r >= lo && r <= hi && r >= tr.r[1] && r <= tr.r[tr.r.size() - 2]) ok.push_back(i);
  }
  if (tr.config.boundary == Boundary::domain_of_dependence &&
      s < tr.config.r_min + tr.config.dr) {
    std::ostringstream os;
    os << "extract_outgoing: the ray r = t + " << s
       << " meets the polluted inner region; need s >= r_min + dr = "
       << tr.config.r_min + tr.config.dr;
    throw DomainError(os.str());
  }
  if (ok.size() < 3) {
    const double stride = std::abs(tr.config.dt()) * tr.config.store_every;
    const double need = s + 2.0 * tr.config.dr + 3.0 * stride * (1.0 + 1.0 / tr.config.cfl);
    std::ostringstream os;
    os << "extract_outgoing: fewer than 3 stored times see r = t + " << s
       << " inside the trusted region; need r_max >= " << need
       ;
    throw DomainError(os.str());
  }
  auto nearest = [&](double target) {
    std::size_t best = ok.front();
    for (std::size_t i : ok)
      if (std::abs(tr.times[i] - target) < std::abs(tr.times[best] - target)) best = i;
    return best;
  };
  const double t3 = tr.times[ok.back()];
  std::size_t idx[3] = {nearest(0.5 * t3), nearest(0.75 * t3), ok.back()};
  if (idx[0] == idx[1] || idx[1] == idx[2]) {
    idx[0] = ok[ok.size() - 3];
    idx[1] = ok[ok.size() - 2];
  }
  double x[3], v[3];
  for (int k = 0; k < 3; ++k) {
    const double r = tr.times[idx[k]] + s;
    x[k] = 1.0 / r;
    v[k] = interpolate(tr.r, tr.w_t[idx[k]], r);
  }
  // Value at x = 0 of the quadratic through the three points.
  double a = 0.0;
  for (int k = 0; k < 3; ++k) {
    double l = 1.0;
    for (int m = 0; m < 3; ++m)
      if (m != k) l *= (0.0 - x[m]) / (x[k] - x[m]);
    a += l * v[k];
  }
  return a;
}

std::pair<double, double> characteristic_integral(const Trajectory& tr,
                                                  double R_prime) {
  const SimConfig& c = tr.config;
  if (c.cfl != 1.0) throw DomainError("characteristic_integral: needs cfl = 1");
  if (!(c.T > 0.0)) throw DomainError("characteristic_integral: needs a forward run");
  if (!(R_prime > 1.0)) throw DomainError("characteristic_integral: need R' > 1");
  long j1 = 0, n_end = 0;
  if (!(c.r_min < 1.0) || !is_multiple(1.0 - c.r_min, c.dr, j1))
    throw DomainError("characteristic_integral: r = 1 must be an interior grid node");
  if (!is_multiple(R_prime - 1.0, c.dr, n_end))
    throw DomainError("characteristic_integral: R' - 1 must be a whole number of steps");
  if (n_end % c.store_every != 0)
    throw DomainError("characteristic_integral: R' - 1 must be a stored time");
  const double t_end = static_cast<double>(n_end) * c.dr;
  const auto [lo0, hi0] = tr.trusted(0.0);
  const auto [lo1, hi1] = tr.trusted(t_end);
  if (1.0 < lo0 - 1e-12 || R_prime > hi1 + 1e-12)
    throw DomainError("characteristic_integral: ray leaves the trusted region");

  const std::size_t i0 = tr.index_at(0.0);
  const std::size_t i1 = tr.index_at(t_end);
  const Eigen::Index jR = j1 + n_end;
  const double lhs = (tr.w_t[i1][jR] - tr.w_r(i1)[jR]) - (tr.w_t[i0][j1] - tr.w_r(i0)[j1]);

  const bool focusing = c.nonlinearity == Nonlinearity::focusing;
  auto source = [&](long n) {
    const std::size_t i = tr.index_at(static_cast<double>(n) * c.dr);
    const Eigen::Index j = j1 + n;
    const double r = tr.r[j];
    const double u = tr.w[i][j] / (r * r);
    return (focusing ? r * r * F(u) : 0.0) - 2.0 * u;
  };
  const long stride = c.store_every;
  double rhs = 0.0;
  for (long n = 0; n < n_end; n += stride)
    rhs += 0.5 * (source(n) + source(n + stride)) * c.dr * static_cast<double>(stride);
  return {lhs, rhs};
}

double virial_cutoff(double s) {
  if (s <= 2.0) return 1.0;
  if (s >= 3.0) return 0.0;
  const double x = s - 2.0;
  const double p = 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
  return p * p;
}

double virial_cutoff_prime(double s) {
  if (s <= 2.0 || s >= 3.0) return 0.0;
  const double x = s - 2.0;
  const double p = 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
  const double dp = -30.0 * x * x * (1.0 - x) * (1.0 - x);
  return 2.0 * p * dp;
}

Virial virial(const Trajectory& tr, double t, double scale) {
  if (!(scale > 0.0)) throw DomainError("virial: scale must be > 0");
  const SimConfig& c = tr.config;
  const std::size_t i = tr.index_at(t);
  const auto [lo, hi] = tr.trusted(t);
  if (3.0 * scale > hi)
    throw DomainError("virial: cutoff support exceeds the trusted grid");
  if (lo > c.r_min)
    throw DomainError("virial: inner boundary not trusted at this time (use dirichlet_exact)");

  const Eigen::VectorXd u = tr.u(i), ut = tr.u_t(i), ur = tr.u_r(i);
  const bool focusing = c.nonlinearity == Nonlinearity::focusing;
  const Eigen::Index n = u.size();
  Eigen::VectorXd fj(n), fd(n), fdd(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double r = tr.r[j];
    const double r4 = r * r * r * r;
    const double phi = virial_cutoff(r / scale);
    const double dphi = virial_cutoff_prime(r / scale) / scale;
    fj[j] = u[j] * u[j] * phi * r4;
    fd[j] = 2.0 * u[j] * ut[j] * phi * r4;
    double bulk = ut[j] * ut[j] - ur[j] * ur[j];
    if (focusing) bulk += abs_pow_10_3(u[j]);
    fdd[j] = (2.0 * bulk * phi - 2.0 * dphi * u[j] * ur[j]) * r4;
  }
  const double a = tr.r[0], b = tr.r[n - 1];
  const double r0 = tr.r[0];
  const double flux = 2.0 * r0 * r0 * r0 * r0 * u[0] * ur[0] * virial_cutoff(r0 / scale);
  return {sigma4<> * trapezoid(tr.r, fj, a, b), sigma4<> * trapezoid(tr.r, fd, a, b),
          sigma4<> * (trapezoid(tr.r, fdd, a, b) - flux)};
}

}  // namespace critwave::pde
