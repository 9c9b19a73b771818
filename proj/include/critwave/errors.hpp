#ifndef CRITWAVE_ERRORS_HPP
#define CRITWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace critwave {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain on which an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate
/// reached so far and its error bound.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double estimate, double bound)
      : Error(what), estimate_(estimate), bound_(bound) {}
  double estimate() const { return estimate_; }
  double error_bound() const { return bound_; }

 private:
  double estimate_;
  double bound_;
};

/// The ODE integrator's step size collapsed before reaching the target.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double reached, double step)
      : Error(what), reached_(reached), step_(step) {}
  double reached() const { return reached_; }
  double last_step() const { return step_; }

 private:
  double reached_;
  double step_;
};

class NoSolution : public Error {
 public:
  using Error::Error;
};

/// More than one candidate satisfies an inversion request.
class Ambiguity : public Error {
 public:
  Ambiguity(const std::string& what, std::vector<double> crossings)
      : Error(what), crossings_(std::move(crossings)) {}
  const std::vector<double>& crossings() const { return crossings_; }

 private:
  std::vector<double> crossings_;
};

/// Root bracketing failed; `scan` holds (parameter, value) pairs probed.
class BracketFailure : public Error {
 public:
  BracketFailure(const std::string& what,
                 std::vector<std::pair<double, double>> scan)
      : Error(what), scan_(std::move(scan)) {}
  const std::vector<std::pair<double, double>>& scan() const { return scan_; }

 private:
  std::vector<std::pair<double, double>> scan_;
};

}  // namespace critwave

#endif  // CRITWAVE_ERRORS_HPP
