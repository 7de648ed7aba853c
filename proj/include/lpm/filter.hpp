#pragma once

#include <functional>
#include <vector>

#include "lpm/grid.hpp"
#include "lpm/kernel.hpp"
#include "lpm/params.hpp"
#include "lpm/path.hpp"

namespace lpm {

// Conditional density of X~ mod 1 at cell centers, with the filter clock and
// the current order flow level. After every full step: u >= 0 and
// sum(u) * dx = 1 within 1e-12.
struct FilterState {
  std::vector<double> u;
  double t = 0.0;
  double y = 0.0;
};

FilterState uniform_state(const FilterGrid& grid);

// E[mu(kappa y + X~) | density u] using exact per-cell averages of mu, so a
// uniform density gives exactly 0 at any kappa y and the result always lies in
// [-1/2, 1/2).
double conditional_mu(const FilterState& state, double kappa, const FilterGrid& grid);

// Transport-diffusion substep over dt: v(x) = Int_0^1 K(|z - b(x)|) u(z) dz
// with b(x) = eta + e^{-C dt} (x - eta) pulled toward the attractor
// eta = (1/2 - kappa y) mod 1; renormalizes. The kernel must carry variance
// A2 * dt. Fast route: circulant product at grid distances, then periodic
// cubic spline sampling at the contracted points; the direct per-pair route
// runs when the kernel is too narrow for spline sampling (std dev < 1.5 dx).
void apply_transport_diffusion(FilterState& state, const SplitCoefficients& coeffs,
                               const WrappedGaussianKernel& kernel, double dt,
                               const FilterGrid& grid, bool force_direct = false);

// Observation substep: multiply by
//   exp[ -(beta^2 / 2 sigma_bar2) mu(x + kappa y)^2 dt
//        + (beta / sigma_bar2) mu(x + kappa y) dy ]
// at cell centers with the step-start order flow level, then renormalize.
// Returns the log of the absorbed mass (the unnormalized-filter increment).
double apply_observation_update(FilterState& state, const ModelParams& p, double dt,
                                double dy, const FilterGrid& grid);

struct StepResult {
  double conditional_mu = 0.0;  // E[mu | F_t] read off before the step's updates
  double log_increment = 0.0;   // quadratic-form likelihood term for this step
  double log_normalizer = 0.0;  // observation-update mass (diagnostic route)
};

struct FilterOptions {
  bool strang = false;   // half transport, observation, half transport
  bool force_direct = false;
  int snapshot_every = 0;  // 0 disables density snapshots
  std::function<void(const FilterState&)> on_snapshot;
};

// One observation interval: transport-diffusion then observation update, or
// the symmetrized half-transport / observation / half-transport sequence when
// strang is set. dy is the order flow increment over the interval. The kernel
// must carry variance A2 * dt (A2 * dt / 2 under strang, where it is applied
// twice).
StepResult filter_step(FilterState& state, const ModelParams& p,
                       const WrappedGaussianKernel& kernel, double dy,
                       const FilterGrid& grid, double dt, bool strang = false,
                       bool force_direct = false);

struct FilterRun {
  std::vector<double> mu;               // conditional micro drift per step start
  std::vector<double> log_increments;   // normalized-route likelihood terms
  std::vector<double> log_normalizers;  // unnormalized-route diagnostics
  int kernel_builds = 0;
};

FilterRun run_filter(const MarketPath& path, const ModelParams& p,
                     const FilterGrid& grid, const FilterOptions& opts = {});

}  // namespace lpm
