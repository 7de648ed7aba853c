#include "lpm/particle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpm/errors.hpp"
#include "lpm/micro.hpp"
#include "lpm/rng.hpp"

namespace lpm {
namespace {

// counter tags reserved for the particle filter so its draws never collide
// with simulation streams under a shared seed
constexpr std::uint32_t kTagInit = 2;
constexpr std::uint32_t kTagResample = 3;
constexpr std::uint32_t kTagPropagate = 4;

}  // namespace

ParticleRun particle_filter(const MarketPath& path, const ModelParams& p,
                            const ParticleFilterConfig& cfg) {
  p.validate();
  path.validate();
  if (path.size() < 2) throw DataError("particle filter: need at least two observations");
  if (cfg.n_particles < 2)
    throw std::invalid_argument("particle filter: need at least two particles");
  if (cfg.substeps < 1) throw std::invalid_argument("particle filter: substeps must be >= 1");
  if (!(cfg.ess_threshold > 0.0 && cfg.ess_threshold <= 1.0))
    throw std::invalid_argument("particle filter: ess_threshold must lie in (0, 1]");

  const SplitCoefficients coeffs = split_coefficients(p);
  const int n = cfg.n_particles;
  const double dt = path.dt_obs;
  const double h = dt / cfg.substeps;
  const double vol = std::sqrt(coeffs.A2 * h);
  const double quad = -0.5 * p.beta * p.beta / p.sigma_bar2;
  const double lin = p.beta / p.sigma_bar2;

  std::vector<double> x(n), w(n, 1.0 / n);
  RngStream init_rng(cfg.seed, 0, kTagInit);
  for (double& xi : x) xi = init_rng.next_u01() * (1.0 - 1e-16);

  std::vector<RngStream> prop;
  prop.reserve(n);
  for (int i = 0; i < n; ++i)
    prop.emplace_back(cfg.seed, static_cast<std::uint32_t>(i), kTagPropagate);
  RngStream resample_rng(cfg.seed, 0, kTagResample);

  const std::size_t steps = path.size() - 1;
  ParticleRun run;
  run.mu.reserve(steps);

  std::vector<double> scratch(n);
  for (std::size_t step = 0; step < steps; ++step) {
    const double shift = coeffs.kappa * path.order_flow[step];
    const double dy = path.order_flow[step + 1] - path.order_flow[step];

    double mu_post = 0.0;
    for (int i = 0; i < n; ++i) mu_post += w[i] * mu(shift + x[i]);
    run.mu.push_back(mu_post);

    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
      double xp = x[i];
      for (int s = 0; s < cfg.substeps; ++s)
        xp += coeffs.C * mu(shift + xp) * h + vol * prop[i].next_normal();
      x[i] = wrap01(xp);
      // bootstrap weighting: the increment over the step is scored against the
      // propagated position, with the order flow frozen at its step-start level
      const double m = mu(shift + x[i]);
      w[i] *= std::exp(quad * m * m * dt + lin * m * dy);
      mass += w[i];
    }
    if (!std::isfinite(mass) || mass <= 0.0)
      throw NumericalError("particle filter: weight mass degenerated at step " +
                           std::to_string(step));
    double ess_inv = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] /= mass;
      ess_inv += w[i] * w[i];
    }

    if (1.0 / ess_inv < cfg.ess_threshold * n) {
      // systematic resampling on a single uniform offset
      const double offset = 1.0 - resample_rng.next_u01();  // in [0, 1)
      double cum = w[0];
      int j = 0;
      for (int k = 0; k < n; ++k) {
        const double target = (k + offset) / n;
        while (cum < target && j + 1 < n) cum += w[++j];
        scratch[k] = x[j];
      }
      x.swap(scratch);
      std::fill(w.begin(), w.end(), 1.0 / n);
    }
  }
  run.final_x = std::move(x);
  run.final_w = std::move(w);
  return run;
}

}  // namespace lpm
