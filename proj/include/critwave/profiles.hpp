#ifndef CRITWAVE_PROFILES_HPP
#define CRITWAVE_PROFILES_HPP

// Self-similar profiles u = r^{-3/2} φ(t/r). The profile equation
//   (1-y²)φ'' - yφ' + (9/4)φ - |φ|^{4/3}φ = 0,  φ(0)=0, φ'(0)=ν
// degenerates at y = 1. Writing y = sin θ turns it into the regular
// oscillator φ_θθ + (9/4)φ - |φ|^{4/3}φ = 0 on θ ∈ [0, π/2], which is what
// gets integrated. Note (1-y²)φ'(y)² = φ_θ².

#include <iosfwd>
#include <variant>
#include <vector>

namespace critwave {

/// Accepted ODE nodes in the angular variable with (φ, φ_θ, φ_θθ) at each,
/// interpolated by quintic Hermite polynomials between nodes.
class AngularTrajectory {
 public:
  AngularTrajectory() = default;
  AngularTrajectory(std::vector<double> theta, std::vector<double> phi,
                    std::vector<double> dphi, std::vector<double> ddphi);

  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& phi() const { return phi_; }
  const std::vector<double>& dphi() const { return dphi_; }  // φ_θ
  std::size_t size() const { return theta_.size(); }
  double theta_begin() const { return theta_.front(); }
  double theta_end() const { return theta_.back(); }

  /// φ and φ_θ at any θ inside the node range.
  double phi_at(double theta) const;
  double dphi_at(double theta) const;

 private:
  std::size_t segment(double theta) const;

  std::vector<double> theta_, phi_, dphi_, ddphi_;
};

struct BlowUp {
  double y_plus;
};

struct Global {
  double limit_phi;    // lim φ(y), y → y_end
  double limit_flux;   // lim (1-y²)φ'(y)²
  double limit_slope;  // lim √(1-y²) φ'(y), the signed square root of the flux
};

using Category = std::variant<BlowUp, Global>;

struct ProfileOptions {
  double y_stop = 1.0;
  double blowup_threshold = 1e6;
  /// Maximum tolerated conserved-quantity drift; <= 0 picks max(1e-8, 1e3·tol).
  double drift_tolerance = 0.0;
  double max_step = 0.02;  // in θ
};

class SelfSimilarProfile {
 public:
  SelfSimilarProfile(double nu, AngularTrajectory path, Category category,
                     double sup_phi, double energy_drift);

  double nu() const { return nu_; }
  const Category& category() const { return category_; }
  bool is_global() const { return std::holds_alternative<Global>(category_); }
  double sup_phi() const { return sup_phi_; }
  /// max |H - ν²/2| over the nodes. For blow-up profiles each node's
  /// deviation is divided by max(1, (3/10)|φ|^{10/3}).
  double energy_drift() const { return energy_drift_; }

  /// Node abscissae y ∈ [0,1) with φ and φ'(y); a node at y = 1 is held
  /// internally but not listed, since φ'(y) is singular there.
  std::vector<double> grid() const;
  std::vector<double> phi() const;
  std::vector<double> dphi() const;

  double y_end() const;
  double phi_at(double y) const;
  double dphi_at(double y) const;
  const AngularTrajectory& path() const { return path_; }

 private:
  double nu_;
  AngularTrajectory path_;
  Category category_;
  double sup_phi_;
  double energy_drift_;
};

/// φ_*: the linearised profile, (1-y²)φ'' - yφ' + (9/4)φ = 0, φ(0)=0, φ'(0)=1.
class LinearProfile {
 public:
  explicit LinearProfile(AngularTrajectory path) : path_(std::move(path)) {}

  std::vector<double> grid() const;
  std::vector<double> phi() const;
  std::vector<double> dphi() const;
  double phi_at(double y) const;
  const AngularTrajectory& path() const { return path_; }

 private:
  AngularTrajectory path_;
};

SelfSimilarProfile integrate_profile(double nu, double tol,
                                     const ProfileOptions& opt = {});

/// H(y) = ½(1-y²)φ'² + (9/8)φ² - (3/10)|φ|^{10/3}.
double conserved_energy(const SelfSimilarProfile& p, double y);

/// Smallest y with φ(y) = z, refined to `tol`.
double inverse_phi(const SelfSimilarProfile& p, double z, double tol = 1e-13);

LinearProfile integrate_linear_profile(double tol);

/// (2/3) sin((3/2) arcsin y).
double linear_profile_exact(double y);

/// ν with lim (1-y²)φ_ν'(y)² = 0, by bisection on the signed limit slope.
double find_nu2(double tol, double ode_tol = 1e-11);

struct WronskianPair {
  double nonlinear;  // φ_c(y)
  double scaled_linear;  // c φ_*(y)
};

WronskianPair wronskian_compare(double c, double y, double tol = 1e-11);

/// CSV with header y,phi,dphi,H.
void write_profile_csv(std::ostream& os, const SelfSimilarProfile& p);

}  // namespace critwave

#endif  // CRITWAVE_PROFILES_HPP
