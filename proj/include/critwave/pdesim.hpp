#ifndef CRITWAVE_PDESIM_HPP
#define CRITWAVE_PDESIM_HPP

// Radial exterior simulator for u_tt - Δu = F(u) in five dimensions, written
// for w = r²u:
//   w_tt - w_rr = r² F(w/r²) - 2w/r²,
// on a uniform grid r_min = r_0 < ... < r_N = r_max with r_min > 0. Leapfrog in
// time with the 2w/r² term averaged over levels n ± 1 (see Stepper::step).

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "critwave/radiation.hpp"

namespace critwave::pde {

enum class Nonlinearity { focusing, linear };
enum class Boundary { domain_of_dependence, dirichlet_exact };

struct SimConfig {
  double r_min = 1.0;
  double r_max = 2.0;
  double dr = 0.01;
  double cfl = 1.0;
  /// Final time; negative runs the scheme backward.
  double T = 1.0;
  Nonlinearity nonlinearity = Nonlinearity::focusing;
  Boundary boundary = Boundary::domain_of_dependence;
  /// u(r, t) at the two boundary nodes, required for dirichlet_exact.
  std::function<double(double, double)> exact_u;
  int store_every = 1;
  double overflow_guard = 1e12;

  double dt() const { return (T < 0.0 ? -cfl : cfl) * dr; }
  int nodes() const;  // N + 1
  /// Throws DomainError on an inconsistent configuration.
  void validate() const;
};

struct BlowUpReport {
  double time;
  double radius;
};

struct Trajectory {
  SimConfig config;
  Eigen::VectorXd r;
  std::vector<double> times;              // increasing
  std::vector<Eigen::VectorXd> w;         // w = r²u per stored time
  std::vector<Eigen::VectorXd> w_t;       // centred in time
  std::optional<BlowUpReport> blowup;

  /// Stored index whose time matches t to within a small fraction of dt.
  std::size_t index_at(double t) const;
  Eigen::VectorXd u(std::size_t i) const;
  Eigen::VectorXd u_t(std::size_t i) const;
  /// Centred differences, one-sided second order at the two ends.
  Eigen::VectorXd u_r(std::size_t i) const;
  Eigen::VectorXd w_r(std::size_t i) const;

  /// [r_min + |t|/cfl + dr, r_max - |t|/cfl - dr] for domain_of_dependence, the whole
  /// grid for dirichlet_exact.
  std::pair<double, double> trusted(double t) const;
};

Trajectory simulate(const RadialData& d, const SimConfig& cfg);

/// σ₄ ∫_R^{r_hi} (½u_r² + ½u_t² - (3/10)|u|^{10/3}) ρ⁴ dρ by the trapezoid
/// rule on the trusted part of the grid (no potential term for linear runs).
/// R outside the trusted range is clamped and `warning` is filled.
double energy(const Trajectory& tr, double t, double R,
              std::string* warning = nullptr);

/// Approximates G_+(s) from r²u_t along r = t + s, extrapolated in 1/r over
/// three stored times.
double extract_outgoing(const Trajectory& tr, double s);

/// Both sides of
///   (w_t - w_r)(R', R'-1) - (w_t - w_r)(1, 0) = ∫_1^{R'} (r²F(u) - 2u)(r, r-1) dr.
std::pair<double, double> characteristic_integral(const Trajectory& tr,
                                                  double R_prime);

struct Virial {
  double J;
  double dJ;
  double d2J;
};

/// Cutoff φ(s) = ϕ(s)², ϕ = 1 on s <= 2, 0 on s >= 3, quintic smoothstep between.
double virial_cutoff(double s);
double virial_cutoff_prime(double s);

/// J = ∫ u² φ(|x|/scale) dx over |x| > r_min, with J' and the J'' obtained
/// by inserting the equation (including the inner boundary flux).
Virial virial(const Trajectory& tr, double t, double scale);

}  // namespace critwave::pde

#endif  // CRITWAVE_PDESIM_HPP
