#ifndef CRITWAVE_ODE_HPP
#define CRITWAVE_ODE_HPP

// Dormand-Prince 5(4) with PI step-size control. Header-only, templated on
// scalar and state dimension; the state is a fixed-size Eigen vector.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "critwave/errors.hpp"

namespace critwave::ode {

template <typename Scalar, int N>
struct Sample {
  using State = Eigen::Matrix<Scalar, N, 1>;
  Scalar t;
  State y;
  State dy;  // right-hand side at (t, y)
};

template <typename Scalar>
struct Options {
  Scalar rtol = Scalar(1e-10);
  Scalar atol = Scalar(1e-10);
  Scalar h0 = Scalar(1e-3);
  Scalar h_max = Scalar(0.05);
  long max_steps = 2'000'000;
};

enum class Stop { reached_end, event };

template <typename Scalar, int N>
struct Solution {
  std::vector<Sample<Scalar, N>> samples;
  Stop stop = Stop::reached_end;
};

template <typename Scalar, int N>
class DormandPrince {
 public:
  using State = Eigen::Matrix<Scalar, N, 1>;

  explicit DormandPrince(Options<Scalar> opt = {}) : opt_(opt) {}

  /// Integrates y' = rhs(t, y) from t0 to t_end (> t0). After every
  /// accepted step `event(t, y)` is queried; returning true stops the run.
  template <typename Rhs, typename Event>
  Solution<Scalar, N> integrate(Rhs&& rhs, Scalar t0, const State& y0,
                                Scalar t_end, Event&& event) const {
    using std::abs;
    using std::max;
    using std::min;
    using std::pow;
    using std::sqrt;

    Solution<Scalar, N> out;
    State y = y0;
    Scalar t = t0;
    State k1 = rhs(t, y);
    out.samples.push_back({t, y, k1});
    if (!(t_end > t0)) return out;

    Scalar h = min(opt_.h0, t_end - t0);
    Scalar err_old = Scalar(1e-4);
    bool rejected_last = false;

    for (long step = 0; step < opt_.max_steps; ++step) {
      const Scalar h_min =
          Scalar(16) * std::numeric_limits<Scalar>::epsilon() * max(Scalar(1), abs(t));
      if (h < h_min)
        throw IntegrationFailure("step size underflow", static_cast<double>(t),
                                 static_cast<double>(h));
      bool last = false;
      if (t + h >= t_end) {
        h = t_end - t;
        last = true;
      }

      const State k2 = rhs(t + c2 * h, y + h * (a21 * k1));
      const State k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const State k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const State k5 = rhs(t + c5 * h,
                           y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const State k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                           a64 * k4 + a65 * k5));
      const State y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 +
                                   a76 * k6);
      const State k7 = rhs(t + h, y_new);
      const State e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                           e7 * k7);

      Scalar acc = 0;
      for (int i = 0; i < y.size(); ++i) {
        const Scalar sc = opt_.atol + opt_.rtol * max(abs(y[i]), abs(y_new[i]));
        acc += (e[i] / sc) * (e[i] / sc);
      }
      Scalar err = sqrt(acc / Scalar(y.size()));
      if (!std::isfinite(static_cast<double>(err))) err = Scalar(1e10);

      if (err <= Scalar(1)) {
        t = last ? t_end : t + h;
        y = y_new;
        k1 = k7;
        out.samples.push_back({t, y, k1});
        if (event(t, y)) {
          out.stop = Stop::event;
          return out;
        }
        if (last) return out;
        err = max(err, Scalar(1e-10));
        Scalar fac = Scalar(0.9) * pow(err, -kAlpha) * pow(err_old, kBeta);
        fac = std::clamp(fac, Scalar(0.2), rejected_last ? Scalar(1) : Scalar(5));
        h = min(h * fac, opt_.h_max);
        err_old = err;
        rejected_last = false;
      } else {
        Scalar fac = max(Scalar(0.2), Scalar(0.9) * pow(err, Scalar(-0.2)));
        h *= fac;
        rejected_last = true;
      }
    }
    throw IntegrationFailure("maximum number of steps exceeded",
                             static_cast<double>(t), static_cast<double>(h));
  }

  template <typename Rhs>
  Solution<Scalar, N> integrate(Rhs&& rhs, Scalar t0, const State& y0,
                                Scalar t_end) const {
    return integrate(std::forward<Rhs>(rhs), t0, y0, t_end,
                     [](Scalar, const State&) { return false; });
  }

 private:
  static constexpr Scalar kAlpha = Scalar(0.17);
  static constexpr Scalar kBeta = Scalar(0.04);

  static constexpr Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10,
                          c4 = Scalar(4) / 5, c5 = Scalar(8) / 9;
  static constexpr Scalar a21 = Scalar(1) / 5;
  static constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  static constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15,
                          a43 = Scalar(32) / 9;
  static constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187,
                          a53 = Scalar(64448) / 6561, a54 = Scalar(-212) / 729;
  static constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33,
                          a63 = Scalar(46732) / 5247, a64 = Scalar(49) / 176,
                          a65 = Scalar(-5103) / 18656;
  static constexpr Scalar a71 = Scalar(35) / 384, a73 = Scalar(500) / 1113,
                          a74 = Scalar(125) / 192, a75 = Scalar(-2187) / 6784,
                          a76 = Scalar(11) / 84;
  static constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695,
                          e4 = Scalar(71) / 1920, e5 = Scalar(-17253) / 339200,
                          e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;

  Options<Scalar> opt_;
};

}  // namespace critwave::ode

#endif  // CRITWAVE_ODE_HPP
