#pragma once

#include <cstdint>
#include <vector>

#include "lpm/params.hpp"
#include "lpm/path.hpp"

namespace lpm {

// Bootstrap particle filter over X~ mod 1, one update per observation tick:
// Euler propagation with the step-start order flow level frozen, weights
// scored at the propagated positions against the observed increment,
// systematic resampling under the ESS threshold. Shares only the model
// formulas with the grid filter, none of its numerics, so the two are
// independent cross-checks of the same per-tick filtering recursion.
struct ParticleFilterConfig {
  int n_particles = 100000;
  int substeps = 1;  // Euler refinements per observation tick
  double ess_threshold = 0.5;  // resample when ESS < threshold * n_particles
  std::uint64_t seed = 1;
};

struct ParticleRun {
  std::vector<double> mu;       // E[mu | F_t] at each step start
  std::vector<double> final_x;  // terminal ensemble, for density-level checks
  std::vector<double> final_w;
};

ParticleRun particle_filter(const MarketPath& path, const ModelParams& p,
                            const ParticleFilterConfig& cfg = {});

}  // namespace lpm
