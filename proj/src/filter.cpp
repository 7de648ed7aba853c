#include "lpm/filter.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpm/errors.hpp"
#include "lpm/micro.hpp"

namespace lpm {
namespace {

// Periodic cubic spline through equally spaced samples: cyclic tridiagonal
// system (diagonal 4, off-diagonals 1, wrap-around corners) for the second
// derivatives, solved by Thomas elimination plus a Sherman-Morrison update.
// The factorization depends only on n, so it is held per thread together with
// the step scratch buffers; a filter step then performs one forward/backward
// sweep and never allocates.
struct TransportWorkspace {
  static constexpr double kCorner = 1.0;  // coupling w[0] <-> w[n-1]
  static constexpr double kGamma = -4.0;  // standard choice: -diagonal

  int n = -1;
  std::vector<double> inv_d;  // reciprocals of the eliminated diagonal
  std::vector<double> z;      // solved Sherman-Morrison basis vector
  double z_denom = 1.0;
  std::vector<double> w, v, m2;

  void solve_inplace(std::vector<double>& rhs) const {
    for (int i = 1; i < n; ++i) rhs[i] -= inv_d[i - 1] * rhs[i - 1];
    rhs[n - 1] *= inv_d[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - rhs[i + 1]) * inv_d[i];
  }

  void prepare(int n_cells) {
    if (n == n_cells) return;
    n = n_cells;
    std::vector<double> d(n, 4.0);
    d[0] -= kGamma;
    d[n - 1] -= kCorner * kCorner / kGamma;
    inv_d.assign(n, 0.0);
    inv_d[0] = 1.0 / d[0];
    for (int i = 1; i < n; ++i) {
      d[i] -= inv_d[i - 1];  // upper and lower coefficients are all 1
      inv_d[i] = 1.0 / d[i];
    }
    z.assign(n, 0.0);
    z[0] = kGamma;
    z[n - 1] = kCorner;
    solve_inplace(z);
    z_denom = 1.0 + z[0] + kCorner * z[n - 1] / kGamma;
    w.assign(n, 0.0);
    v.assign(n, 0.0);
    m2.assign(n, 0.0);
  }

  // second derivatives of the periodic spline through w, written to m2
  void spline_m(double h) {
    for (int i = 0; i < n; ++i) {
      const double wm = w[i == 0 ? n - 1 : i - 1];
      const double wp = w[i + 1 == n ? 0 : i + 1];
      m2[i] = 6.0 * (wm - 2.0 * w[i] + wp) / (h * h);
    }
    solve_inplace(m2);
    const double fact = (m2[0] + kCorner * m2[n - 1] / kGamma) / z_denom;
    for (int i = 0; i < n; ++i) m2[i] -= fact * z[i];
  }
};

thread_local TransportWorkspace tl_ws;

double spline_segment(double w0, double w1, double m0, double m1, double h, double t) {
  const double h2 = h * h;
  const double omt = 1.0 - t;
  return m0 * h2 * omt * omt * omt / 6.0 + m1 * h2 * t * t * t / 6.0 +
         (w0 - m0 * h2 / 6.0) * omt + (w1 - m1 * h2 / 6.0) * t;
}

void renormalize(std::vector<double>& u, double dx, const char* where) {
  double mass = 0.0;
  for (double x : u) mass += x;
  mass *= dx;
  if (!std::isfinite(mass) || mass <= 0.0)
    throw NumericalError(std::string("filter: ") + where + " left mass " +
                         std::to_string(mass) + ", density degenerate");
  const double inv = 1.0 / mass;
  for (double& x : u) x *= inv;
}

void check_state(const FilterState& state, const FilterGrid& grid) {
  if (static_cast<int>(state.u.size()) != grid.n_cells)
    throw std::invalid_argument("filter: state size does not match the grid");
  if (!std::isfinite(state.t) || !std::isfinite(state.y))
    throw NumericalError("filter: non-finite state clock or order flow level");
}

}  // namespace

void FilterGrid::validate() const {
  if (n_cells < 8)
    throw std::invalid_argument("filter grid: need at least 8 cells, got " +
                                std::to_string(n_cells));
}

FilterState uniform_state(const FilterGrid& grid) {
  grid.validate();
  FilterState s;
  s.u.assign(grid.n_cells, 1.0);
  return s;
}

double conditional_mu(const FilterState& state, double kappa, const FilterGrid& grid) {
  grid.validate();
  check_state(state, grid);
  const int n = grid.n_cells;
  const double dx = grid.dx();
  const double shift = kappa * state.y;
  double acc = 0.0;
  // exact average of mu(shift + .) over each cell; the left edge advances by
  // dx per cell, recomputed from scratch right after the one wrapping cell
  double a = wrap01(shift);
  for (int j = 0; j < n; ++j) {
    const double b = a + dx;
    double cell_mean;
    if (b <= 1.0) {
      cell_mean = a + 0.5 * dx - 0.5;
      a = b < 1.0 ? b : 0.0;
    } else {
      const double f = (1.0 - a) / dx;  // fraction of the cell before the wrap
      cell_mean = f * 0.5 * (a + 1.0) + (1.0 - f) * 0.5 * (b - 1.0) - 0.5;
      a = wrap01(shift + (j + 1) * dx);
    }
    acc += cell_mean * state.u[j];
  }
  return acc * dx;
}

void apply_transport_diffusion(FilterState& state, const SplitCoefficients& coeffs,
                               const WrappedGaussianKernel& kernel, double dt,
                               const FilterGrid& grid, bool force_direct) {
  grid.validate();
  check_state(state, grid);
  if (kernel.n_cells() != grid.n_cells)
    throw std::invalid_argument("filter: kernel was built for a different grid");
  if (!(dt > 0.0)) throw std::invalid_argument("filter: dt must be > 0");

  const int n = grid.n_cells;
  const double dx = grid.dx();
  const double eta = wrap01(0.5 - coeffs.kappa * state.y);
  const double contraction = std::exp(-coeffs.C * dt);
  const bool no_drift = coeffs.C * dt < 1e-14;

  TransportWorkspace& ws = tl_ws;
  ws.prepare(n);
  std::vector<double>* out;
  if (force_direct || kernel.std_dev() < 1.5 * dx) {
    // literal evaluation of v_j = sum_k K(|x_k - b_j|) u_k dx
    for (int j = 0; j < n; ++j) {
      const double bj =
          no_drift ? grid.center(j) : eta + contraction * wrap_signed(grid.center(j) - eta);
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += kernel.value(bj - grid.center(k)) * state.u[k];
      ws.v[j] = acc * dx;
    }
    out = &ws.v;
  } else {
    // same formula rearranged: v_j = (K * u)(b_j); circulant product at grid
    // distances, then periodic cubic spline sampling at the contracted points
    const double* ring2 = kernel.ring2().data();
    const double* u = state.u.data();
    for (int m = 0; m < n; ++m) {
      const double* rp = ring2 + (n - m);
      double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
      int k = 0;
      for (; k + 4 <= n; k += 4) {
        a0 += rp[k] * u[k];
        a1 += rp[k + 1] * u[k + 1];
        a2 += rp[k + 2] * u[k + 2];
        a3 += rp[k + 3] * u[k + 3];
      }
      double acc = (a0 + a1) + (a2 + a3);
      for (; k < n; ++k) acc += rp[k] * u[k];
      ws.w[m] = acc * dx;
    }
    if (no_drift) {
      out = &ws.w;
    } else {
      ws.spline_m(dx);
      // the sample points b_j advance by a fixed fraction of a cell, so the
      // segment index and offset are carried incrementally; the single cell
      // where the signed distance to eta wraps is recomputed from scratch
      const double inv_dx = static_cast<double>(n);
      double s = wrap_signed(grid.center(0) - eta);
      double q = (eta + contraction * s) * inv_dx - 0.5;
      double fl = std::floor(q);
      int m0 = static_cast<int>(fl) % n;
      if (m0 < 0) m0 += n;
      double t = q - fl;
      for (int j = 0;;) {
        const int m1 = m0 + 1 == n ? 0 : m0 + 1;
        const double sv = spline_segment(ws.w[m0], ws.w[m1], ws.m2[m0], ws.m2[m1], dx, t);
        ws.v[j] = sv > 0.0 ? sv : 0.0;  // spline tails may undershoot an exact zero
        if (++j == n) break;
        s += dx;
        if (s >= 0.5) {
          s = wrap_signed(grid.center(j) - eta);
          q = (eta + contraction * s) * inv_dx - 0.5;
          fl = std::floor(q);
          m0 = static_cast<int>(fl) % n;
          if (m0 < 0) m0 += n;
          t = q - fl;
        } else {
          t += contraction;
          if (t >= 1.0) {
            t -= 1.0;
            if (++m0 == n) m0 = 0;
          }
        }
      }
      out = &ws.v;
    }
  }

  renormalize(*out, dx, "transport-diffusion");
  state.u.swap(*out);
}

double apply_observation_update(FilterState& state, const ModelParams& p, double dt,
                                double dy, const FilterGrid& grid) {
  grid.validate();
  check_state(state, grid);
  p.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("filter: dt must be > 0");
  if (!std::isfinite(dy)) throw NumericalError("filter: non-finite order flow increment");

  const int n = grid.n_cells;
  const double dx = grid.dx();
  const double shift = p.kappa() * state.y;
  const double quad = -0.5 * p.beta * p.beta / p.sigma_bar2 * dt;
  const double lin = p.beta / p.sigma_bar2 * dy;
  // beta = 0 weights every cell by exactly 1: skip the renormalization so the
  // density is bitwise untouched and the absorbed mass is exactly zero
  if (quad == 0.0 && lin == 0.0) return 0.0;
  // exp of a quadratic sequence: along each linear arc of the drift the
  // successive weight ratios form a geometric progression, so a cell costs two
  // multiplies; the arc break (one per period) restarts from fresh exponentials
  const double rho = std::exp(2.0 * quad * dx * dx);
  double m = mu(shift + grid.center(0));
  double e = std::exp((quad * m + lin) * m);
  double r = std::exp(quad * (2.0 * m + dx) * dx + lin * dx);
  double mass = 0.0;
  for (int j = 0;;) {
    state.u[j] *= e;
    mass += state.u[j];
    if (++j == n) break;
    if (m + dx >= 0.5) {
      m = mu(shift + grid.center(j));
      e = std::exp((quad * m + lin) * m);
      r = std::exp(quad * (2.0 * m + dx) * dx + lin * dx);
    } else {
      m += dx;
      e *= r;
      r *= rho;
    }
  }
  mass *= dx;
  if (!std::isfinite(mass) || mass <= 0.0)
    throw NumericalError("filter: observation update left mass " + std::to_string(mass));
  const double inv = 1.0 / mass;
  for (double& u : state.u) u *= inv;
  return std::log(mass);
}

StepResult filter_step(FilterState& state, const ModelParams& p,
                       const WrappedGaussianKernel& kernel, double dy,
                       const FilterGrid& grid, double dt, bool strang, bool force_direct) {
  const SplitCoefficients coeffs = split_coefficients(p);
  const double expected_v = coeffs.A2 * (strang ? 0.5 * dt : dt);
  if (std::abs(kernel.variance() - expected_v) > 1e-12 * std::max(1.0, expected_v))
    throw std::invalid_argument("filter: kernel variance does not match A2 * dt for this step");

  StepResult res;
  res.conditional_mu = conditional_mu(state, coeffs.kappa, grid);
  res.log_increment =
      -0.5 * p.beta * p.beta / p.sigma_bar2 * res.conditional_mu * res.conditional_mu * dt +
      p.beta / p.sigma_bar2 * res.conditional_mu * dy;

  if (strang) {
    apply_transport_diffusion(state, coeffs, kernel, 0.5 * dt, grid, force_direct);
    res.log_normalizer = apply_observation_update(state, p, dt, dy, grid);
    apply_transport_diffusion(state, coeffs, kernel, 0.5 * dt, grid, force_direct);
  } else {
    apply_transport_diffusion(state, coeffs, kernel, dt, grid, force_direct);
    res.log_normalizer = apply_observation_update(state, p, dt, dy, grid);
  }
  state.t += dt;
  state.y += dy;
  return res;
}

FilterRun run_filter(const MarketPath& path, const ModelParams& p, const FilterGrid& grid,
                     const FilterOptions& opts) {
  p.validate();
  grid.validate();
  path.validate();
  if (path.size() < 2) throw DataError("filter: need at least two observations");

  const double dt = path.dt_obs;
  const SplitCoefficients coeffs = split_coefficients(p);
  const WrappedGaussianKernel kernel =
      wrapped_gaussian_kernel(coeffs.A2, opts.strang ? 0.5 * dt : dt, grid);

  FilterRun run;
  run.kernel_builds = 1;
  const std::size_t steps = path.size() - 1;
  run.mu.reserve(steps);
  run.log_increments.reserve(steps);
  run.log_normalizers.reserve(steps);

  FilterState state = uniform_state(grid);
  state.t = path.times.front();
  state.y = path.order_flow.front();
  for (std::size_t i = 0; i < steps; ++i) {
    const double dy = path.order_flow[i + 1] - path.order_flow[i];
    const StepResult r =
        filter_step(state, p, kernel, dy, grid, dt, opts.strang, opts.force_direct);
    run.mu.push_back(r.conditional_mu);
    run.log_increments.push_back(r.log_increment);
    run.log_normalizers.push_back(r.log_normalizer);
    if (opts.snapshot_every > 0 && opts.on_snapshot &&
        (i + 1) % static_cast<std::size_t>(opts.snapshot_every) == 0)
      opts.on_snapshot(state);
  }
  return run;
}

}  // namespace lpm
