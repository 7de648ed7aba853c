#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lpm/errors.hpp"
#include "lpm/filter.hpp"
#include "lpm/grid.hpp"
#include "lpm/kernel.hpp"
#include "lpm/micro.hpp"
#include "lpm/params.hpp"
#include "lpm/rng.hpp"
#include "lpm/simulate.hpp"
#include "support/oracles.hpp"

namespace {

lpm::ModelParams reference_params() {
  lpm::ModelParams p;
  p.alpha = 1.0;
  p.beta = 1.0;
  p.sigma2 = 0.4;
  p.sigma_bar2 = 1.0;
  p.eps = 0.1;
  return p;
}

double total_mass(const lpm::FilterState& s, const lpm::FilterGrid& g) {
  double m = 0.0;
  for (double v : s.u) m += v;
  return m * g.dx();
}

lpm::FilterState point_mass_state(const lpm::FilterGrid& g, std::size_t j,
                                  double y = 0.0) {
  lpm::FilterState s;
  s.u.assign(static_cast<std::size_t>(g.n_cells), 0.0);
  s.u[j] = static_cast<double>(g.n_cells);
  s.t = 0.0;
  s.y = y;
  return s;
}

// smooth strictly positive density on the circle, unit mass up to rounding
lpm::FilterState smooth_state(const lpm::FilterGrid& g, double y = 0.0) {
  lpm::FilterState s;
  const auto n = static_cast<std::size_t>(g.n_cells);
  s.u.resize(n);
  double mass = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double x = g.center(static_cast<int>(j));
    s.u[j] = 1.0 + 0.5 * std::cos(2.0 * std::acos(-1.0) * x) +
             0.2 * std::sin(4.0 * std::acos(-1.0) * x);
    mass += s.u[j];
  }
  mass *= g.dx();
  for (double& v : s.u) v /= mass;
  s.t = 0.0;
  s.y = y;
  return s;
}

}  // namespace

TEST_CASE("grid geometry") {
  lpm::FilterGrid g;
  g.n_cells = 100;
  CHECK(g.dx() == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(g.center(0) == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(g.center(99) == doctest::Approx(0.995).epsilon(1e-15));
  CHECK_NOTHROW(g.validate());
  g.n_cells = 7;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("uniform state is normalized and flat") {
  lpm::FilterGrid g;
  lpm::FilterState s = lpm::uniform_state(g);
  CHECK(s.u.size() == 100);
  CHECK(total_mass(s, g) == doctest::Approx(1.0).epsilon(1e-14));
  for (double v : s.u) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.t == 0.0);
  CHECK(s.y == 0.0);
}

TEST_CASE("conditional drift of the uniform density vanishes") {
  lpm::FilterGrid g;
  for (double y : {0.0, 0.3, -1.7, 12.34}) {
    lpm::FilterState s = lpm::uniform_state(g);
    s.y = y;
    CHECK(std::fabs(lpm::conditional_mu(s, 0.4, g)) <= 1e-12);
    CHECK(std::fabs(lpm::conditional_mu(s, 0.97, g)) <= 1e-12);
  }
}

TEST_CASE("conditional drift of a point mass is the cell average") {
  lpm::FilterGrid g;

  SUBCASE("cell without an interior wrap point") {
    lpm::FilterState s = point_mass_state(g, 30, 0.5);
    const double kappa = 0.4;  // shift = 0.2, cell [0.30, 0.31)
    double got = lpm::conditional_mu(s, kappa, g);
    CHECK(got == doctest::Approx(0.2 + 0.305 - 0.5).epsilon(1e-12));
  }
  SUBCASE("cell straddling the wrap point") {
    // shift 0.205, cell [0.79, 0.80): argument spans [0.995, 1.005)
    lpm::FilterState s = point_mass_state(g, 79, 0.205 / 0.4);
    double got = lpm::conditional_mu(s, 0.4, g);
    // integrate the drift over the cell, split at the discontinuity
    double lo = 0.995, mid = 1.0, hi = 1.005;
    double part1 = oracle::simpson_auto(
        [](double a) { return lpm::mu(a); }, lo, mid - 1e-15, 1e-14);
    double part2 = oracle::simpson_auto(
        [](double a) { return lpm::mu(a); }, mid, hi, 1e-14);
    double expected = (part1 + part2) / 0.01;
    CHECK(got == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::fabs(got) <= 1e-9);  // symmetric span around the integer
  }
  SUBCASE("result stays in the drift range") {
    lpm::RngStream rng(4, 0, 9);
    for (int rep = 0; rep < 50; ++rep) {
      auto j = static_cast<std::size_t>(rng.next_u01() * 99.999);
      lpm::FilterState s = point_mass_state(g, j, rng.next_u01() * 10.0 - 5.0);
      double m = lpm::conditional_mu(s, 0.4, g);
      CHECK(m >= -0.5);
      CHECK(m < 0.5);
    }
  }
}

TEST_CASE("conditional drift commutes with integer cell shifts") {
  lpm::FilterGrid g;
  lpm::FilterState base = smooth_state(g, 0.8);
  const double kappa = 1.0;
  const int k = 17;
  lpm::FilterState shifted;
  shifted.t = base.t;
  shifted.y = base.y - k * g.dx() / kappa;  // moves the shift by -k cells
  shifted.u.resize(base.u.size());
  const auto n = base.u.size();
  for (std::size_t j = 0; j < n; ++j) {
    shifted.u[(j + static_cast<std::size_t>(k)) % n] = base.u[j];
  }
  // shifting the density right by k cells while lowering the flow shift by
  // k cells leaves every drift argument unchanged
  CHECK(lpm::conditional_mu(shifted, kappa, g) ==
        doctest::Approx(lpm::conditional_mu(base, kappa, g)).epsilon(1e-12));
}

TEST_CASE("pure diffusion is an exact circulant convolution") {
  lpm::FilterGrid g;
  lpm::ModelParams p = reference_params();
  p.beta = 0.0;  // C = 0
  lpm::SplitCoefficients c = lpm::split_coefficients(p);
  lpm::WrappedGaussianKernel kernel =
      lpm::wrapped_gaussian_kernel(c.A2, 1.0, g);

  lpm::FilterState s = smooth_state(g, 0.4);
  std::vector<double> u0 = s.u;
  lpm::apply_transport_diffusion(s, c, kernel, 1.0, g);

  const auto n = u0.size();
  std::vector<double> expected(n, 0.0);
  const auto& ring = kernel.ring();
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t d = (j + n - k) % n;
      acc += ring[d] * u0[k];
    }
    expected[j] = acc * g.dx();
  }
  double mass = 0.0;
  for (double v : expected) mass += v;
  mass *= g.dx();
  for (double& v : expected) v /= mass;

  for (std::size_t j = 0; j < n; ++j) {
    CHECK(s.u[j] == doctest::Approx(expected[j]).epsilon(1e-12));
  }
}

TEST_CASE("uniform density is a fixed point of pure diffusion") {
  lpm::FilterGrid g;
  lpm::ModelParams p = reference_params();
  p.beta = 0.0;
  lpm::SplitCoefficients c = lpm::split_coefficients(p);
  lpm::WrappedGaussianKernel kernel =
      lpm::wrapped_gaussian_kernel(c.A2, 1.0, g);
  lpm::FilterState s = lpm::uniform_state(g);
  s.y = 1.3;
  lpm::apply_transport_diffusion(s, c, kernel, 1.0, g);
  for (double v : s.u) CHECK(v == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("interpolated and direct transport agree") {
  lpm::FilterGrid g;
  lpm::ModelParams p = reference_params();
  lpm::SplitCoefficients c = lpm::split_coefficients(p);
  lpm::WrappedGaussianKernel kernel =
      lpm::wrapped_gaussian_kernel(c.A2, 1.0, g);

  for (double y : {0.0, 0.37, -2.2}) {
    lpm::FilterState fast = smooth_state(g, y);
    lpm::FilterState direct = fast;
    lpm::apply_transport_diffusion(fast, c, kernel, 1.0, g, false);
    lpm::apply_transport_diffusion(direct, c, kernel, 1.0, g, true);
    double worst = 0.0;
    for (std::size_t j = 0; j < fast.u.size(); ++j) {
      worst = std::max(worst, std::fabs(fast.u[j] - direct.u[j]));
    }
    CHECK_MESSAGE(worst <= 2e-6, "y=" << y);
  }
}

TEST_CASE("transport matches an independent fine-grid reference solver") {
  lpm::FilterGrid g;
  lpm::ModelParams p = reference_params();
  lpm::SplitCoefficients c = lpm::split_coefficients(p);

  SUBCASE("with drift") {
    lpm::WrappedGaussianKernel kernel =
        lpm::wrapped_gaussian_kernel(c.A2, 1.0, g);
    for (double kappa_y : {0.12, 0.5, 0.83}) {
      lpm::FilterState s = smooth_state(g, kappa_y / c.kappa);
      std::vector<double> u0 = s.u;
      lpm::apply_transport_diffusion(s, c, kernel, 1.0, g);
      std::vector<double> ref =
          oracle::transport_reference(u0, c.A2, c.C, kappa_y, 1.0);
      double l1 = 0.0;
      for (std::size_t j = 0; j < ref.size(); ++j) {
        l1 += std::fabs(ref[j] - s.u[j]) * g.dx();
      }
      CHECK_MESSAGE(l1 <= 0.1, "kappa_y=" << kappa_y << " l1=" << l1);
    }
  }
  SUBCASE("without drift") {
    lpm::ModelParams q = p;
    q.beta = 0.0;
    lpm::SplitCoefficients c0 = lpm::split_coefficients(q);
    lpm::WrappedGaussianKernel kernel =
        lpm::wrapped_gaussian_kernel(c0.A2, 1.0, g);
    lpm::FilterState s = smooth_state(g, 0.0);
    std::vector<double> u0 = s.u;
    lpm::apply_transport_diffusion(s, c0, kernel, 1.0, g);
    std::vector<double> ref =
        oracle::transport_reference(u0, c0.A2, 0.0, 0.0, 1.0);
    double l1 = 0.0;
    for (std::size_t j = 0; j < ref.size(); ++j) {
      l1 += std::fabs(ref[j] - s.u[j]) * g.dx();
    }
    CHECK(l1 <= 0.02);
  }
}

TEST_CASE("observation reweighting applies the exact pointwise factor") {
  lpm::FilterGrid g;
  lpm::ModelParams p = reference_params();
  lpm::FilterState s = smooth_state(g, 0.25);
  std::vector<double> u0 = s.u;
  const double dt = 1.0, dy = 0.7;
  double log_mass = lpm::apply_observation_update(s, p, dt, dy, g);

  const double shift = p.kappa() * s.y;
  std::vector<double> expected(u0.size());
  double mass = 0.0;
  for (std::size_t j = 0; j < u0.size(); ++j) {
    double m = lpm::mu(shift + g.center(static_cast<int>(j)));
    double w = std::exp(-0.5 * p.beta * p.beta / p.sigma_bar2 * m * m * dt +
                        p.beta / p.sigma_bar2 * m * dy);
    expected[j] = u0[j] * w;
    mass += expected[j];
  }
  mass *= g.dx();
  CHECK(log_mass == doctest::Approx(std::log(mass)).epsilon(1e-12));
  for (std::size_t j = 0; j < u0.size(); ++j) {
    CHECK(s.u[j] == doctest::Approx(expected[j] / mass).epsilon(1e-12));
  }
}

TEST_CASE("driftless model leaves the update silent") {
  lpm::FilterGrid g;
  lpm::ModelParams p = reference_params();
  p.beta = 0.0;
  lpm::FilterState s = smooth_state(g, 0.6);
  std::vector<double> u0 = s.u;
  double log_mass = lpm::apply_observation_update(s, p, 1.0, 0.9, g);
  CHECK(log_mass == 0.0);
  for (std::size_t j = 0; j < u0.size(); ++j) CHECK(s.u[j] == u0[j]);
}

TEST_CASE("one filter step records pre-update statistics") {
  lpm::FilterGrid g;
  lpm::ModelParams p = reference_params();
  lpm::SplitCoefficients c = lpm::split_coefficients(p);
  lpm::WrappedGaussianKernel kernel =
      lpm::wrapped_gaussian_kernel(c.A2, 1.0, g);

  SUBCASE("uniform prior with zero flow shift") {
    lpm::FilterState s = lpm::uniform_state(g);
    lpm::StepResult r = lpm::filter_step(s, p, kernel, 0.3, g, 1.0);
    CHECK(std::fabs(r.conditional_mu) <= 1e-12);
    CHECK(std::fabs(r.log_increment) <= 1e-12);
    CHECK(s.t == doctest::Approx(1.0));
    CHECK(s.y == doctest::Approx(0.3));
    CHECK(total_mass(s, g) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("point mass reports its own cell drift") {
    lpm::FilterState s = point_mass_state(g, 30, 0.5);
    double expect_mu = lpm::mu(0.2 + g.center(30));
    lpm::StepResult r = lpm::filter_step(s, p, kernel, -0.4, g, 1.0);
    CHECK(r.conditional_mu == doctest::Approx(expect_mu).epsilon(1e-12));
    // increment uses the pre-update drift and the new flow increment
    double expect_inc = -0.5 * p.beta * p.beta / p.sigma_bar2 * expect_mu *
                            expect_mu * 1.0 +
                        p.beta / p.sigma_bar2 * expect_mu * (-0.4);
    CHECK(r.log_increment == doctest::Approx(expect_inc).epsilon(1e-12));
  }
}

TEST_CASE("filter step rejects a kernel built for the wrong variance") {
  lpm::FilterGrid g;
  lpm::ModelParams p = reference_params();
  lpm::SplitCoefficients c = lpm::split_coefficients(p);
  lpm::WrappedGaussianKernel wrong =
      lpm::wrapped_gaussian_kernel(c.A2 * 2.0, 1.0, g);
  lpm::FilterState s = lpm::uniform_state(g);
  CHECK_THROWS_AS(lpm::filter_step(s, p, wrong, 0.1, g, 1.0),
                  std::invalid_argument);
  // operator-splitting halves the diffusion budget per pass
  lpm::WrappedGaussianKernel full =
      lpm::wrapped_gaussian_kernel(c.A2, 1.0, g);
  CHECK_THROWS_AS(lpm::filter_step(s, p, full, 0.1, g, 1.0, true),
                  std::invalid_argument);
  lpm::WrappedGaussianKernel half =
      lpm::wrapped_gaussian_kernel(c.A2, 0.5, g);
  CHECK_NOTHROW(lpm::filter_step(s, p, half, 0.1, g, 1.0, true));
}

TEST_CASE("full run equals manual composition of steps") {
  lpm::SimConfig cfg;
  cfg.params = reference_params();
  cfg.horizon_T = 10.0;
  cfg.dt_sim = 0.01;
  cfg.seed = 2024;
  lpm::MarketPath path = lpm::simulate_path(cfg);

  lpm::FilterGrid g;
  lpm::FilterOptions opts;
  lpm::FilterRun run = lpm::run_filter(path, cfg.params, g, opts);
  REQUIRE(run.mu.size() == path.size() - 1);
  CHECK(run.kernel_builds == 1);

  lpm::SplitCoefficients c = lpm::split_coefficients(cfg.params);
  lpm::WrappedGaussianKernel kernel =
      lpm::wrapped_gaussian_kernel(c.A2, 1.0, g);
  lpm::FilterState s = lpm::uniform_state(g);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    double dy = path.order_flow[i + 1] - path.order_flow[i];
    lpm::StepResult r = lpm::filter_step(s, cfg.params, kernel, dy, g, 1.0);
    CHECK(run.mu[i] == doctest::Approx(r.conditional_mu).epsilon(1e-14));
    CHECK(run.log_increments[i] ==
          doctest::Approx(r.log_increment).epsilon(1e-14));
    CHECK(run.log_normalizers[i] ==
          doctest::Approx(r.log_normalizer).epsilon(1e-14));
  }
}

TEST_CASE("state invariants hold along a long randomized run") {
  lpm::SimConfig cfg;
  cfg.params = reference_params();
  cfg.horizon_T = 200.0;
  cfg.dt_sim = 0.01;
  cfg.seed = 555;
  lpm::MarketPath path = lpm::simulate_path(cfg);

  lpm::FilterGrid g;
  lpm::SplitCoefficients c = lpm::split_coefficients(cfg.params);
  lpm::WrappedGaussianKernel kernel =
      lpm::wrapped_gaussian_kernel(c.A2, 1.0, g);
  lpm::FilterState s = lpm::uniform_state(g);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    double dy = path.order_flow[i + 1] - path.order_flow[i];
    lpm::StepResult r = lpm::filter_step(s, cfg.params, kernel, dy, g, 1.0);
    CHECK(r.conditional_mu >= -0.5);
    CHECK(r.conditional_mu < 0.5);
    CHECK(std::isfinite(r.log_increment));
    double mass = total_mass(s, g);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : s.u) {
      REQUIRE(v >= 0.0);
      REQUIRE(std::isfinite(v));
    }
  }
}

TEST_CASE("splitting variants stay consistent") {
  lpm::SimConfig cfg;
  cfg.params = reference_params();
  cfg.horizon_T = 40.0;
  cfg.dt_sim = 0.01;
  cfg.seed = 808;
  lpm::MarketPath path = lpm::simulate_path(cfg);

  lpm::FilterGrid g;
  lpm::FilterOptions lie;
  lpm::FilterOptions strang;
  strang.strang = true;
  lpm::FilterRun a = lpm::run_filter(path, cfg.params, g, lie);
  lpm::FilterRun b = lpm::run_filter(path, cfg.params, g, strang);
  REQUIRE(a.mu.size() == b.mu.size());
  double rms = 0.0;
  for (std::size_t i = 0; i < a.mu.size(); ++i) {
    double d = a.mu[i] - b.mu[i];
    rms += d * d;
    CHECK(std::isfinite(b.mu[i]));
  }
  rms = std::sqrt(rms / static_cast<double>(a.mu.size()));
  // both are first-order-consistent discretizations of the same flow
  CHECK(rms <= 0.05);
}

TEST_CASE("grid refinement leaves the drift series nearly unchanged") {
  lpm::SimConfig cfg;
  cfg.params = reference_params();
  cfg.horizon_T = 60.0;
  cfg.dt_sim = 0.01;
  cfg.seed = 31337;
  lpm::MarketPath path = lpm::simulate_path(cfg);

  lpm::FilterGrid coarse;
  coarse.n_cells = 100;
  lpm::FilterGrid fine;
  fine.n_cells = 200;
  lpm::FilterOptions opts;
  lpm::FilterRun a = lpm::run_filter(path, cfg.params, coarse, opts);
  lpm::FilterRun b = lpm::run_filter(path, cfg.params, fine, opts);
  double rms = 0.0;
  for (std::size_t i = 0; i < a.mu.size(); ++i) {
    double d = a.mu[i] - b.mu[i];
    rms += d * d;
  }
  rms = std::sqrt(rms / static_cast<double>(a.mu.size()));
  CHECK(rms <= 5e-3);
}

TEST_CASE("snapshot hook fires at the requested cadence") {
  lpm::SimConfig cfg;
  cfg.params = reference_params();
  cfg.horizon_T = 20.0;
  cfg.dt_sim = 0.01;
  cfg.seed = 12;
  lpm::MarketPath path = lpm::simulate_path(cfg);

  lpm::FilterGrid g;
  lpm::FilterOptions opts;
  opts.snapshot_every = 5;
  int calls = 0;
  opts.on_snapshot = [&](const lpm::FilterState& s) {
    ++calls;
    CHECK(total_mass(s, g) == doctest::Approx(1.0).epsilon(1e-12));
  };
  lpm::run_filter(path, cfg.params, g, opts);
  CHECK(calls == 4);  // steps 5, 10, 15, 20
}

TEST_CASE("degenerate density is reported as a numerical failure") {
  lpm::FilterGrid g;
  lpm::ModelParams p = reference_params();
  lpm::SplitCoefficients c = lpm::split_coefficients(p);
  lpm::WrappedGaussianKernel kernel =
      lpm::wrapped_gaussian_kernel(c.A2, 1.0, g);
  lpm::FilterState s;
  s.u.assign(100, 0.0);
  s.t = 0.0;
  s.y = 0.0;
  CHECK_THROWS_AS(lpm::apply_transport_diffusion(s, c, kernel, 1.0, g),
                  lpm::NumericalError);
}
