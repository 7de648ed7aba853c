#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lpm {

struct VerifyCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;  // the statistic or error that was checked
  double bound = 0.0;     // the bound it must stay under
  std::string detail;
};

// Cross-validation battery behind the `verify` subcommand: special function
// identities against an independent integrator, the exit time identity, the
// stationary density, the moment estimators, the grid filter against the
// particle filter, beta inversion round trips, and artifact round trips.
// `full` raises Monte Carlo scales to acceptance-test sizes.
std::vector<VerifyCheck> run_verification(bool full, std::uint64_t seed = 20240901);

}  // namespace lpm
