#include "lpm/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lpm/errors.hpp"
#include "lpm/micro.hpp"
#include "lpm/rng.hpp"

namespace lpm {
namespace {

// per-purpose counter tags so path simulation and exit sampling never share draws
constexpr std::uint32_t kTagPath = 0;
constexpr std::uint32_t kTagExit = 1;

long integer_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const long n = std::lround(r);
  if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r))
    throw std::invalid_argument(std::string("simulate: ") + what +
                                " must be a positive integer multiple, got ratio " +
                                std::to_string(r));
  return n;
}

}  // namespace

void SimConfig::validate() const {
  params.validate();
  if (!(dt_sim > 0.0) || !(dt_obs > 0.0) || !(horizon_T > 0.0))
    throw std::invalid_argument("simulate: horizon_T, dt_sim, dt_obs must be > 0");
  if (dt_sim > dt_obs) throw std::invalid_argument("simulate: dt_sim must not exceed dt_obs");
  integer_ratio(dt_obs, dt_sim, "dt_obs / dt_sim");
  integer_ratio(horizon_T, dt_obs, "horizon_T / dt_obs");
  if (!std::isfinite(x0)) throw std::invalid_argument("simulate: non-finite x0");
}

MarketPath simulate_path(const SimConfig& cfg) {
  cfg.validate();
  const ModelParams& p = cfg.params;
  const long n_obs = integer_ratio(cfg.horizon_T, cfg.dt_obs, "horizon_T / dt_obs");
  const long substeps = integer_ratio(cfg.dt_obs, cfg.dt_sim, "dt_obs / dt_sim");
  const double dt = cfg.dt_obs / static_cast<double>(substeps);
  const double sqdt = std::sqrt(dt);
  const double flow_vol = std::sqrt(p.sigma_bar2 - p.sigma2 / (p.alpha * p.alpha));
  const double price_vol = std::sqrt(p.sigma2);

  RngStream rng(cfg.seed, 0, kTagPath);
  double x = cfg.x0;
  if (cfg.x0_uniform_in_cell) x = std::floor(cfg.x0) + rng.next_u01() * (1.0 - 1e-16);
  double y = 0.0;

  MarketPath path;
  path.dt_obs = cfg.dt_obs;
  path.times.reserve(n_obs + 1);
  path.order_flow.reserve(n_obs + 1);
  path.bid.reserve(n_obs + 1);
  path.ask.reserve(n_obs + 1);
  path.latent.emplace();
  path.latent->reserve(n_obs + 1);

  auto record = [&](long i) {
    path.times.push_back(static_cast<double>(i) * cfg.dt_obs);
    path.order_flow.push_back(y);
    const auto [b, a] = bid_ask(x, p.eps);
    path.bid.push_back(b);
    path.ask.push_back(a);
    path.latent->push_back(x);
  };

  record(0);
  for (long i = 0; i < n_obs; ++i) {
    for (long s = 0; s < substeps; ++s) {
      const auto [xi, zeta] = rng.next_normal_pair();
      const double dx = p.alpha * p.beta * mu(x) * dt + price_vol * sqdt * xi;
      x += dx;
      y += dx / p.alpha + flow_vol * sqdt * zeta;
    }
    record(i + 1);
  }

  path.meta = PathMeta{cfg.seed, p};
  path.validate();
  return path;
}

ExitTimeEstimate mean_exit_time_mc(const ModelParams& p, int n_paths, double dt_sim,
                                   std::uint64_t seed, double time_cap) {
  p.validate();
  if (n_paths < 1) throw std::invalid_argument("exit time: need at least one path");
  if (!(dt_sim > 0.0) || !(time_cap > 0.0))
    throw std::invalid_argument("exit time: dt_sim and time_cap must be > 0");

  const double drift_scale = p.alpha * p.beta;
  const double vol = std::sqrt(p.sigma2) * std::sqrt(dt_sim);
  const long max_steps = static_cast<long>(std::ceil(time_cap / dt_sim));

  double sum = 0.0, sum_sq = 0.0;
  int capped = 0;
  for (int path = 0; path < n_paths; ++path) {
    RngStream rng(seed, static_cast<std::uint32_t>(path), kTagExit);
    double x = 0.0;
    long step = 0;
    while (step < max_steps) {
      x += drift_scale * mu(x) * dt_sim + vol * rng.next_normal();
      ++step;
      if (x <= -1.0 || x >= 1.0) break;
    }
    if (step >= max_steps) ++capped;
    const double tau = static_cast<double>(step) * dt_sim;
    sum += tau;
    sum_sq += tau * tau;
  }

  ExitTimeEstimate est;
  est.mean = sum / n_paths;
  const double var = std::max(0.0, sum_sq / n_paths - est.mean * est.mean);
  est.std_error = n_paths > 1 ? std::sqrt(var / (n_paths - 1)) : 0.0;
  est.capped = capped;
  return est;
}

}  // namespace lpm
