#ifndef CRITWAVE_RADIATION_HPP
#define CRITWAVE_RADIATION_HPP

// Radial 5D free waves described by their radiation profile G = G_- (the
// profile in the negative time direction):
//   u(r,t) = r^{-3} ∫_{t-r}^{t+r} (s-t) G(s) ds,
// with G_+(s) = G_-(-s). Everything here is closed-form up to quadrature.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace critwave {

/// A radiation profile: a closed-form handle with declared support (or
/// declared power decay), or samples on a uniform grid interpolated by
/// local cubics. Immutable; copies share the cached L² norm.
class RadiationProfile {
 public:
  using Fn = std::function<double(double)>;

  static RadiationProfile closed_form(Fn g, double s_lo, double s_hi,
                                      std::vector<double> breakpoints = {});
  /// Unbounded support with |G(s)| <~ |s|^{-p}.
  static RadiationProfile decaying(Fn g, double decay_exponent,
                                   std::vector<double> breakpoints = {});
  static RadiationProfile sampled(double s0, double ds, std::vector<double> values);
  static RadiationProfile zero();

  double operator()(double s) const;

  bool compact() const { return compact_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  std::optional<double> decay_exponent() const { return decay_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  bool is_sampled() const { return sampled_; }

  /// ‖G‖_{L²(ℝ)}, computed once.
  double norm_l2() const;

  /// ∫_a^b s^k G(s) ds for k ∈ {0, 1}; a or b may be infinite when the
  /// declared decay makes the integral converge.
  double moment(int k, double a, double b, double tol = 1e-14) const;
  /// ∫_{|s|>R} G(s)² ds.
  double tail_norm_sq(double R, double tol = 1e-13) const;

  RadiationProfile mirrored() const;            // s ↦ G(-s)
  RadiationProfile shifted(double t0) const;    // s ↦ G(s + t0)

 private:
  struct NormCache;

  RadiationProfile() = default;
  double integrate_fn(const Fn& f, double a, double b, double tol,
                      double extra_decay) const;

  Fn fn_;
  bool compact_ = true;
  bool sampled_ = false;
  double lo_ = 0.0, hi_ = 0.0;
  std::optional<double> decay_;
  std::vector<double> breaks_;
  std::shared_ptr<NormCache> norm_;
};

/// Radial function of r >= 0 with its known kink locations.
struct RadialFunction {
  std::function<double(double)> f;
  std::vector<double> breakpoints;

  double operator()(double r) const { return f(r); }
  explicit operator bool() const { return static_cast<bool>(f); }
};

/// Radial initial data (u0, u1). `du0` may be empty, in which case centred
/// differences are used and `reduced_accuracy` is set.
struct RadialData {
  RadialFunction u0;
  RadialFunction du0;
  RadialFunction u1;
  double exterior_radius = 0.0;
  std::optional<double> compact_support_bound;
  /// |u0|, |u1| <~ r^{-p} beyond the last breakpoint.
  std::optional<double> decay_exponent;
  bool reduced_accuracy = false;

  /// Sampled data on a strictly increasing grid. Beyond the last point the
  /// data are zero, or, with `tail_exponent` p, continue as
  /// v_last (r_last / r)^p (free waves from compact profiles have p = 3).
  static RadialData sampled(std::vector<double> r, std::vector<double> u0,
                            std::vector<double> u1,
                            std::optional<double> tail_exponent = std::nullopt);
  /// Fills a missing du0 by centred differences.
  RadialData& ensure_derivative();
};

struct ResiduePair {
  double tau1;
  double tau2;
  double radius;
};

struct ResidueFlow {
  double dtau1;
  double dtau2;
  bool discontinuous;  // a profile has a breakpoint at ±r
};

double free_wave(const RadiationProfile& G, double r, double t);
double free_wave_velocity(const RadiationProfile& G, double r, double t);
double free_wave_gradient(const RadiationProfile& G, double r, double t);

/// Free evolution of (0, u1) for r > t >= 0:
///   u = (4r³)^{-1} ∫_{r-t}^{r+t} ρ (r² + ρ² - t²) u1(ρ) dρ.
double positive_propagator(const RadialFunction& u1, double r, double t);

RadialData data_from_profile(const RadiationProfile& G);

/// Inverse of data_from_profile. The odd part comes from u0,
/// G_odd(r) = (3r u0 + r² u0')/2, the even part from u1,
/// G_even(s) = ½ s² u1(s) - ½ ∫_s^∞ ρ u1(ρ) dρ.
/// `profile_decay` overrides the decay exponent declared on the result for
/// non-compact data (default: data exponent minus 2).
RadiationProfile profile_from_data(const RadialData& d,
                                   std::optional<double> profile_decay = std::nullopt);

/// σ₄ ∫_R^∞ (u0'² + u1²) ρ⁴ dρ.
double exterior_energy(const RadialData& d, double R, double tol = 1e-11);
/// Same quantity from the profile:
/// σ₄ [2‖G‖²_{|s|>R} + (∫_{-R}^R G)²/R + 3(∫_{-R}^R sG)²/R³].
double exterior_energy_identity(const RadiationProfile& G, double R);
/// ‖(u0, u1)‖²_{Ḣ¹×L²} over all of ℝ⁵.
double energy_norm_sq(const RadialData& d, double tol = 1e-11);

ResiduePair residues(const RadiationProfile& G, double R);
ResidueFlow residue_flow(const RadiationProfile& G_minus,
                         const RadiationProfile& G_plus, double r);

struct AsymptoticNumbers {
  double alpha1;
  double alpha2;
};
AsymptoticNumbers asymptotic_numbers(const RadiationProfile& G);

RadiationProfile shift_profile(const RadiationProfile& G, double t0);

/// Inhomogeneous source F(t, r) for u_tt - Δu = F, supported in
/// t ∈ [0, t_max], r ∈ [r_lo, r_hi] (t_max/r_hi may be infinite when a
/// decay |F| <~ r^{-p}, p > 3, is declared).
struct SourceTerm {
  std::function<double(double, double)> f;
  double t_max = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::optional<double> decay_exponent;
  std::vector<double> t_breakpoints;
  std::vector<double> r_breakpoints;
};

/// G_+(s) - G_{0,+}(s) = ½∫₀^∞ (s+t)² F(t, t+s) dt - ½∫₀^∞∫_{t+s}^∞ ρ F(t, ρ) dρ dt.
double nonlinear_profile_shift(const SourceTerm& src, double s, double tol = 1e-11);

/// The radiation profile of (W, 0): G(s) = (3/2) s (1 + s²/15)^{-5/2}.
RadiationProfile ground_state_profile();

/// τ₂(r) = √3 r^{3/2} W(r), the second residue of (W, 0).
double ground_state_tau2(double r);

/// Radius c₂ > √15 with τ₂(c₂) = ρ on the decreasing branch.
double compute_c2(double rho);

}  // namespace critwave

#endif  // CRITWAVE_RADIATION_HPP
