#include "lpm/session.hpp"

#include <chrono>
#include <cmath>

#include "lpm/errors.hpp"
#include "lpm/moments.hpp"
#include "lpm/special.hpp"

namespace lpm {

EstimationResult run_estimate(const SessionConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();

  const TickFile ticks = load_ticks(cfg.input);
  int gaps = 0;
  const MarketPath path = resample(ticks, cfg.resample_step, cfg.gap_threshold, &gaps);

  const double sigma_bar2_hat = estimate_sigma_bar2(path);
  const SigmaHatConfig sigma_cfg{cfg.m_blocks};
  const double Sigma_hat = estimate_sigma_hat(path, sigma_cfg);
  if (!(Sigma_hat > 0.0))
    throw NumericalError("estimate: midprice block variance is zero, path degenerate");

  const AxisSpec alpha2_axis =
      cfg.alpha2_axis ? *cfg.alpha2_axis : default_alpha2_axis(sigma_bar2_hat, Sigma_hat);
  const AxisSpec sigma2_axis =
      cfg.sigma2_axis ? *cfg.sigma2_axis
                      : default_sigma2_axis(sigma_bar2_hat, Sigma_hat, alpha2_axis.max);

  const ParamGrid grid =
      build_param_grid(alpha2_axis, sigma2_axis, sigma_bar2_hat, Sigma_hat, {});
  const MleResult mle =
      grid_search_mle(path, grid, FilterGrid{cfg.filter_cells}, cfg.n_workers);

  const EpsilonEstimate eps = estimate_epsilon(path, mle.theta_hat.gamma());

  EstimationResult r;
  r.sigma_bar2_hat = sigma_bar2_hat;
  r.Sigma_hat = Sigma_hat;
  r.m_blocks = sigma_cfg.blocks(path.horizon());
  r.alpha2_hat = mle.theta_hat.alpha * mle.theta_hat.alpha;
  r.beta_hat = mle.theta_hat.beta;
  r.sigma2_hat = mle.theta_hat.sigma2;
  r.eps_hat = eps.value;
  r.eps_clamped = eps.clamped;
  r.excluded = mle.excluded;
  r.ties = mle.ties;
  r.kernel_builds = mle.kernel_builds;
  r.filter_steps = mle.filter_steps;
  r.workers = mle.workers;
  r.surface = mle.surface;

  r.config = cfg.echo;
  r.config.emplace_back("horizon", format_double(path.horizon()));
  r.config.emplace_back("n_obs", std::to_string(path.size()));
  r.config.emplace_back("resample_gaps", std::to_string(gaps));
  r.config.emplace_back("grid_alpha2_min", format_double(alpha2_axis.min));
  r.config.emplace_back("grid_alpha2_max", format_double(alpha2_axis.max));
  r.config.emplace_back("grid_alpha2_n", std::to_string(alpha2_axis.n));
  r.config.emplace_back("grid_sigma2_min", format_double(sigma2_axis.min));
  r.config.emplace_back("grid_sigma2_max", format_double(sigma2_axis.max));
  r.config.emplace_back("grid_sigma2_n", std::to_string(sigma2_axis.n));

  r.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!cfg.output.empty()) save_result(r, cfg.output);
  return r;
}

}  // namespace lpm
