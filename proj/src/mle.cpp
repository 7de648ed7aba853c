#include "lpm/mle.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lpm/errors.hpp"
#include "lpm/filter.hpp"

namespace lpm {
namespace {

std::vector<double> linspace(const AxisSpec& a, const char* name) {
  if (!(std::isfinite(a.min) && std::isfinite(a.max)) || a.n < 1 || !(a.min > 0.0) ||
      !(a.max >= a.min))
    throw std::invalid_argument(std::string("axis ") + name +
                                ": need 0 < min <= max and n >= 1");
  std::vector<double> v(a.n);
  if (a.n == 1) {
    v[0] = a.min;
    return v;
  }
  const double step = (a.max - a.min) / (a.n - 1);
  for (int i = 0; i < a.n; ++i) v[i] = a.min + step * i;
  return v;
}

}  // namespace

AxisSpec default_alpha2_axis(double sigma_bar2, double Sigma_hat, int n) {
  if (!(sigma_bar2 > 0.0) || !(Sigma_hat > 0.0))
    throw std::invalid_argument("default axes: sigma_bar2 and Sigma_hat must be > 0");
  return {1.02 * Sigma_hat / sigma_bar2, 16.0 * Sigma_hat / sigma_bar2, n};
}

AxisSpec default_sigma2_axis(double sigma_bar2, double Sigma_hat, double alpha2_max, int n) {
  if (!(sigma_bar2 > 0.0) || !(Sigma_hat > 0.0) || !(alpha2_max > 0.0))
    throw std::invalid_argument("default axes: inputs must be > 0");
  return {1.01 * Sigma_hat, 0.99 * alpha2_max * sigma_bar2, n};
}

ParamGrid build_param_grid(const AxisSpec& alpha2_axis, const AxisSpec& sigma2_axis,
                           double sigma_bar2, double Sigma_hat, const Quadrature& q) {
  if (!(std::isfinite(sigma_bar2) && sigma_bar2 > 0.0) ||
      !(std::isfinite(Sigma_hat) && Sigma_hat > 0.0))
    throw std::invalid_argument("param grid: sigma_bar2 and Sigma_hat must be > 0");
  ParamGrid g;
  g.sigma_bar2 = sigma_bar2;
  g.Sigma_hat = Sigma_hat;
  g.alpha2_axis = linspace(alpha2_axis, "alpha2");
  g.sigma2_axis = linspace(sigma2_axis, "sigma2");
  for (double a2 : g.alpha2_axis) {
    for (double s2 : g.sigma2_axis) {
      const auto beta = invert_beta(a2, s2, sigma_bar2, Sigma_hat, q);
      if (beta)
        g.candidates.push_back({a2, s2, *beta});
      else
        ++g.excluded;
    }
  }
  return g;
}

MleResult grid_search_mle(const MarketPath& path, const ParamGrid& grid,
                          const FilterGrid& filter_grid, int n_workers) {
  path.validate();
  filter_grid.validate();
  if (grid.candidates.empty())
    throw NumericalError("grid search: no admissible candidate, Sigma_hat = " +
                         std::to_string(grid.Sigma_hat) +
                         " excludes the whole grid (excluded " +
                         std::to_string(grid.excluded) + ")");
  if (n_workers < 1) throw std::invalid_argument("grid search: n_workers must be >= 1");

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t m = grid.candidates.size();
  std::vector<double> loglik(m, 0.0);
  std::atomic<std::size_t> cursor{0};
  std::atomic<long> kernel_builds{0};
  std::atomic<long> filter_steps{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    try {
      while (true) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= m) break;
        const ParamGrid::Candidate& c = grid.candidates[i];
        ModelParams p;
        p.alpha = std::sqrt(c.alpha2);
        p.beta = c.beta;
        p.sigma2 = c.sigma2;
        p.sigma_bar2 = grid.sigma_bar2;
        p.eps = 0.0;
        const FilterRun run = run_filter(path, p, filter_grid, {});
        double acc = 0.0;
        for (double v : run.log_increments) acc += v;
        loglik[i] = acc;
        kernel_builds.fetch_add(run.kernel_builds);
        filter_steps.fetch_add(static_cast<long>(run.mu.size()));
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
      cursor.store(m);  // drain remaining work
    }
  };

  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // candidates are in (alpha2, sigma2) lexicographic order, so keeping the
  // first strict maximum is the lexicographic tie-break
  std::size_t best = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (loglik[i] > loglik[best]) best = i;

  MleResult r;
  const ParamGrid::Candidate& c = grid.candidates[best];
  r.theta_hat.alpha = std::sqrt(c.alpha2);
  r.theta_hat.beta = c.beta;
  r.theta_hat.sigma2 = c.sigma2;
  r.theta_hat.sigma_bar2 = grid.sigma_bar2;
  r.theta_hat.eps = 0.0;
  r.surface.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    r.surface.push_back(
        {grid.candidates[i].alpha2, grid.candidates[i].sigma2, grid.candidates[i].beta,
         loglik[i]});
    if (loglik[i] == loglik[best]) r.ties.push_back(i);
  }
  r.excluded = grid.excluded;
  r.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.kernel_builds = kernel_builds.load();
  r.filter_steps = filter_steps.load();
  r.workers = n_workers;
  return r;
}

}  // namespace lpm
