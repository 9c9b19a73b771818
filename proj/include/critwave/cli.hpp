#ifndef CRITWAVE_CLI_HPP
#define CRITWAVE_CLI_HPP

#include <iosfwd>
#include <string>

#include "critwave/radiation.hpp"

namespace critwave::cli {

enum ExitCode : int {
  kOk = 0,
  kComputationFailure = 1,
  kUsage = 2,
  kVerificationFailure = 3,
};

/// Machine-readable output goes to `out` (unless --out names a file),
/// human-readable summaries and diagnostics to `err`.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out,
                       std::ostream& err);
int parse_and_dispatch(int argc, const char* const* argv);

/// Radiation profile from a text spec:
///   bump:A,c,w    A (1 - ((s-c)/w)²)^6 on |s - c| < w
///   ground-state  (3/2) s (1 + s²/15)^{-5/2}
///   file:PATH     CSV with columns s,G on a uniform grid
RadiationProfile parse_gspec(const std::string& spec);

}  // namespace critwave::cli

#endif  // CRITWAVE_CLI_HPP
