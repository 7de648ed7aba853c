#pragma once

#include <cstdint>

#include "lpm/params.hpp"
#include "lpm/path.hpp"

namespace lpm {

// Euler-Maruyama simulation of (X, Y) with observations subsampled to dt_obs.
// dt_obs must be an integer multiple of dt_sim and horizon_T an integer
// multiple of dt_obs.
struct SimConfig {
  ModelParams params;
  double horizon_T = 100.0;
  double dt_sim = 0.01;
  double dt_obs = 1.0;
  std::uint64_t seed = 0;
  double x0 = 100.5;
  bool x0_uniform_in_cell = false;  // draw X0 uniformly over [floor(x0), floor(x0) + 1)

  void validate() const;
};

MarketPath simulate_path(const SimConfig& cfg);

struct ExitTimeEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int capped = 0;  // paths stopped at the time cap; they enter the mean at the cap
};

// Monte Carlo mean first exit time of X from (-1, 1) started at 0.
// Discrete crossing detection misses intra-step excursions, biasing the mean
// up by about 2 * 0.5826 * sigma * sqrt(dt_sim) in the boundary layer; keep
// sigma^2 * dt_sim small when comparing against the closed form.
ExitTimeEstimate mean_exit_time_mc(const ModelParams& p, int n_paths, double dt_sim,
                                   std::uint64_t seed, double time_cap = 1e6);

}  // namespace lpm
