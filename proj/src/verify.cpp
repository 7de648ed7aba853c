#include "lpm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "lpm/errors.hpp"
#include "lpm/filter.hpp"
#include "lpm/io.hpp"
#include "lpm/likelihood.hpp"
#include "lpm/micro.hpp"
#include "lpm/mle.hpp"
#include "lpm/moments.hpp"
#include "lpm/particle.hpp"
#include "lpm/rng.hpp"
#include "lpm/simulate.hpp"
#include "lpm/special.hpp"

namespace lpm {
namespace {

// Composite Simpson with interval doubling: a deliberately different
// integration route from the Gauss-Legendre machinery it cross-checks.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

template <class F>
double simpson_auto(F&& f, double a, double b, double tol) {
  int n = 64;
  double prev = simpson(f, a, b, n);
  for (int round = 0; round < 12; ++round) {
    n *= 2;
    const double cur = simpson(f, a, b, n);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  return prev;
}

double phi_simpson(double z) {
  auto outer = [z](double x) {
    const double ax = (x - 0.5) * (x - 0.5);
    auto inner = [z](double y) {
      const double ay = (y - 0.5) * (y - 0.5);
      return std::exp(z * ay);
    };
    const int n = std::max(16, static_cast<int>(std::ceil(x * 512)) * 2);
    return std::exp(-z * ax) * simpson(inner, 0.0, x, n);
  };
  return 2.0 * simpson_auto(outer, 0.0, 1.0, 1e-11);
}

double psi_simpson(double z) {
  return simpson_auto([z](double y) { return std::exp(z * y * (y - 1.0)); }, 0.0, 1.0, 1e-12);
}

ModelParams params_from_gamma(double gamma, double sigma2, double alpha, double sigma_bar2) {
  ModelParams p;
  p.alpha = alpha;
  p.sigma2 = sigma2;
  p.beta = gamma * sigma2 / alpha;
  p.sigma_bar2 = sigma_bar2;
  return p;
}

struct Battery {
  std::vector<VerifyCheck> checks;

  void add(const std::string& name, double measured, double bound, std::string detail = "") {
    VerifyCheck c;
    c.name = name;
    c.measured = measured;
    c.bound = bound;
    c.pass = std::isfinite(measured) && measured <= bound;
    c.detail = std::move(detail);
    checks.push_back(std::move(c));
  }
};

std::string temp_file(const char* stem, std::uint64_t salt) {
  const auto dir = std::filesystem::temp_directory_path();
  return (dir / (std::string(stem) + "." + std::to_string(salt) + ".tmp")).string();
}

}  // namespace

std::vector<VerifyCheck> run_verification(bool full, std::uint64_t seed) {
  Battery b;

  // special functions against the Simpson route
  {
    double worst = 0.0;
    for (double z : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      worst = std::max(worst, std::abs(phi(z) - phi_simpson(z)));
      worst = std::max(worst, std::abs(psi(z) - psi_simpson(z)));
    }
    worst = std::max(worst, std::abs(phi(0.0) - 1.0));
    worst = std::max(worst, std::abs(psi(0.0) - 1.0));
    b.add("special_vs_simpson", worst, 1e-8);
  }

  // stationary density normalization and centered drift
  {
    double worst = 0.0;
    for (double g : {0.0, 0.5, 1.0, 5.0, 20.0}) {
      const double mass = simpson_auto([g](double x) { return chi(g, x); }, 0.0, 1.0, 1e-11);
      // the drift field equals x - 1/2 on [0,1); using that representative keeps the
      // integrand smooth at the right endpoint, where the periodic wrap jumps to -1/2
      const double drift =
          simpson_auto([g](double x) { return (x - 0.5) * chi(g, x); }, 0.0, 1.0, 1e-11);
      worst = std::max({worst, std::abs(mass - 1.0), std::abs(drift)});
    }
    b.add("chi_normalized_and_centered", worst, 1e-8);
  }

  // identification ratio must decrease strictly
  {
    const int pts = full ? 200 : 60;
    double prev = assumption1_fn(0.01);
    double min_drop = 1e300;
    for (int i = 1; i < pts; ++i) {
      const double z = 0.01 * std::pow(20.0 / 0.01, static_cast<double>(i) / (pts - 1));
      const double cur = assumption1_fn(z);
      min_drop = std::min(min_drop, prev - cur);
      prev = cur;
    }
    b.add("identification_ratio_decreasing", min_drop > 0.0 ? 0.0 : 1.0, 0.5,
          "min successive drop " + format_double(min_drop));
  }

  // exit time identity against the long-run variance closed form
  {
    const int paths = full ? 2000 : 400;
    const ModelParams p = params_from_gamma(2.0, 0.01, 1.0, 1.0);
    const ExitTimeEstimate est = mean_exit_time_mc(p, paths, 0.002, seed);
    const double expected = phi(p.gamma()) / p.sigma2;
    const double se = std::max(est.std_error, 1e-12);
    b.add("exit_time_identity", std::abs(est.mean - expected) / se, 4.0,
          "mean " + format_double(est.mean) + " expected " + format_double(expected) +
              " capped " + std::to_string(est.capped));
  }

  // simulated occupation of the unit cell against chi
  {
    SimConfig sc;
    sc.params = params_from_gamma(2.0, 1.0, 2.0, 1.0);
    sc.horizon_T = full ? 50000.0 : 5000.0;
    sc.dt_sim = 0.01;
    sc.dt_obs = 1.0;
    sc.seed = seed + 1;
    // occupation statistics need every simulation substep, so sample at dt_sim
    sc.dt_obs = sc.dt_sim;
    sc.horizon_T = std::floor(sc.horizon_T);
    const MarketPath path = simulate_path(sc);
    const int bins = 100;
    std::vector<double> hist(bins, 0.0);
    for (double x : *path.latent) hist[std::min(bins - 1, (int)(wrap01(x) * bins))] += 1.0;
    double l1 = 0.0;
    const double n = static_cast<double>(path.latent->size());
    for (int k = 0; k < bins; ++k) {
      const double center = (k + 0.5) / bins;
      l1 += std::abs(hist[k] / n - chi(sc.params.gamma(), center) / bins);
    }
    b.add("stationary_density_l1", l1, full ? 0.05 : 0.08);
  }

  // moment estimators on simulated paths
  {
    SimConfig sc;
    sc.params = params_from_gamma(0.5, 0.4, 1.0, 1.0);  // beta = 0.2
    sc.horizon_T = full ? 10000.0 : 2000.0;
    sc.seed = seed + 2;
    const MarketPath path = simulate_path(sc);
    const double sb2 = estimate_sigma_bar2(path);
    b.add("sigma_bar2_estimator", std::abs(sb2 - sc.params.sigma_bar2) / sc.params.sigma_bar2,
          full ? 0.03 : 0.05, "estimate " + format_double(sb2));
  }
  {
    const ModelParams p = params_from_gamma(2.5, 0.4, 1.0, 1.0);
    const double target = big_sigma(p);
    const int n_seeds = full ? 20 : 5;
    double mean = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
      SimConfig sc;
      sc.params = p;
      sc.horizon_T = full ? 20000.0 : 5000.0;
      sc.seed = seed + 100 + s;
      mean += estimate_sigma_hat(simulate_path(sc));
    }
    mean /= n_seeds;
    b.add("sigma_hat_estimator", std::abs(mean - target) / target, full ? 0.10 : 0.20,
          "mean " + format_double(mean) + " target " + format_double(target));
  }

  // grid filter against the particle filter
  {
    const ModelParams p = params_from_gamma(2.5, 0.4, 1.0, 1.0);
    SimConfig sc;
    sc.params = p;
    sc.horizon_T = full ? 500.0 : 60.0;
    sc.seed = seed + 3;
    const MarketPath path = simulate_path(sc);
    const FilterRun grid_run = run_filter(path, p, FilterGrid{100});
    ParticleFilterConfig pf;
    pf.n_particles = full ? 100000 : 20000;
    pf.seed = seed + 4;
    const ParticleRun part = particle_filter(path, p, pf);
    double rms = 0.0;
    for (std::size_t i = 0; i < grid_run.mu.size(); ++i) {
      const double d = grid_run.mu[i] - part.mu[i];
      rms += d * d;
    }
    rms = std::sqrt(rms / grid_run.mu.size());
    b.add("filter_vs_particle_rms", rms, full ? 0.02 : 0.03);
  }

  // the two likelihood accumulation routes agree on average
  {
    const ModelParams p = params_from_gamma(2.5, 0.4, 1.0, 1.0);
    SimConfig sc;
    sc.params = p;
    sc.horizon_T = full ? 5000.0 : 1000.0;
    sc.seed = seed + 5;
    const MarketPath path = simulate_path(sc);
    const FilterRun run = run_filter(path, p, FilterGrid{100});
    double quad_route = 0.0, normalizer_route = 0.0;
    for (std::size_t i = 0; i < run.mu.size(); ++i) {
      quad_route += run.log_increments[i];
      normalizer_route += run.log_normalizers[i];
    }
    const double n = static_cast<double>(run.mu.size());
    const double scale = p.beta * p.beta / p.sigma_bar2;
    b.add("likelihood_route_agreement", std::abs(quad_route - normalizer_route),
          0.5 * std::sqrt(n) * scale + 0.05 * n * scale * scale + 1e-6,
          "quadratic " + format_double(quad_route) + " normalizer " +
              format_double(normalizer_route));
  }

  // beta inversion round trip
  {
    RngStream rng(seed + 6, 0, 9);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double alpha = 0.5 + 2.0 * rng.next_u01();
      const double sigma2 = 0.1 + rng.next_u01();
      const double gamma = 0.05 + 10.0 * rng.next_u01();
      const ModelParams p = params_from_gamma(gamma, sigma2, alpha, 2.0 * sigma2 / (alpha * alpha));
      const double Sh = big_sigma(p);
      const auto beta = invert_beta(p.alpha * p.alpha, p.sigma2, p.sigma_bar2, Sh);
      if (!beta) {
        worst = 1e300;
        break;
      }
      worst = std::max(worst, std::abs(*beta - p.beta) / p.beta);
    }
    b.add("beta_inversion_round_trip", worst, 1e-8);
  }

  // beta = 0 switches the likelihood off exactly
  {
    ModelParams p;
    p.alpha = 1.0;
    p.beta = 0.0;
    p.sigma2 = 0.4;
    p.sigma_bar2 = 1.0;
    SimConfig sc;
    sc.params = p;
    sc.horizon_T = 50.0;
    sc.seed = seed + 7;
    const MarketPath path = simulate_path(sc);
    const FilterRun run = run_filter(path, p, FilterGrid{100});
    double worst = 0.0;
    for (std::size_t i = 0; i < run.mu.size(); ++i)
      worst = std::max({worst, std::abs(run.log_increments[i]), std::abs(run.mu[i])});
    b.add("beta_zero_filter_silent", worst, 1e-12);
  }

  // epsilon estimator on the uniform-density closed form
  {
    MarketPath path;
    path.dt_obs = 1.0;
    for (int i = 0; i < 1000; ++i) {
      path.times.push_back(i);
      path.order_flow.push_back(0.0);
      const bool wide = i % 10 == 0;  // fraction f = 0.1
      path.bid.push_back(wide ? 99 : 100);
      path.ask.push_back(101);
    }
    path.order_flow[0] = 0.0;
    const EpsilonEstimate est = estimate_epsilon(path, 0.0);
    b.add("epsilon_uniform_closed_form", std::abs(est.value - 0.05), 1e-5,
          est.clamped ? "clamped" : "interior");
  }

  // dataset round trip through the tick format
  {
    SimConfig sc;
    sc.params = params_from_gamma(2.5, 0.4, 1.0, 1.0);
    sc.params.eps = 0.1;
    sc.horizon_T = 200.0;
    sc.seed = seed + 8;
    const MarketPath path = simulate_path(sc);
    const std::string file = temp_file("latentmle.verify.dataset", seed);
    write_dataset(path, file, {{"seed", std::to_string(sc.seed)}});
    const TickFile ticks = load_ticks(file);
    const MarketPath again = resample(ticks, 1.0);
    double worst = 0.0;
    bool same = again.size() == path.size();
    if (same) {
      for (std::size_t i = 0; i < path.size(); ++i) {
        worst = std::max(worst, std::abs(path.order_flow[i] - again.order_flow[i]));
        same = same && path.bid[i] == again.bid[i] && path.ask[i] == again.ask[i] &&
               path.times[i] == again.times[i];
      }
    }
    std::filesystem::remove(file);
    b.add("dataset_round_trip", same ? worst : 1e300, 0.0, "exact field equality");
  }

  // single-candidate grid search is the identity
  {
    const ModelParams p = params_from_gamma(2.5, 0.4, 1.0, 1.0);
    SimConfig sc;
    sc.params = p;
    sc.horizon_T = 50.0;
    sc.seed = seed + 9;
    const MarketPath path = simulate_path(sc);
    const double Sh = big_sigma(p);
    const ParamGrid grid = build_param_grid({1.0, 1.0, 1}, {0.4, 0.4, 1}, 1.0, Sh);
    const MleResult res = grid_search_mle(path, grid, FilterGrid{100}, 2);
    const bool ok = grid.candidates.size() == 1 && res.surface.size() == 1 &&
                    res.theta_hat.alpha == 1.0 && res.theta_hat.sigma2 == 0.4 &&
                    std::abs(res.theta_hat.beta - p.beta) < 1e-8;
    b.add("grid_search_single_candidate", ok ? 0.0 : 1.0, 0.5);
  }

  return b.checks;
}

}  // namespace lpm
