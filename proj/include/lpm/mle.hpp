#pragma once

#include <cstddef>
#include <vector>

#include "lpm/likelihood.hpp"
#include "lpm/params.hpp"

namespace lpm {

struct AxisSpec {
  double min = 0.0;
  double max = 0.0;
  int n = 100;
};

// Rectangular candidate grid in (alpha^2, sigma^2). beta is implied per
// candidate by the moment constraint Sigma(theta) = Sigma_hat; candidates
// without an admissible beta are dropped and counted.
struct ParamGrid {
  std::vector<double> alpha2_axis;
  std::vector<double> sigma2_axis;
  double sigma_bar2 = 1.0;
  double Sigma_hat = 0.0;

  struct Candidate {
    double alpha2 = 0.0;
    double sigma2 = 0.0;
    double beta = 0.0;
  };
  std::vector<Candidate> candidates;
  int excluded = 0;
};

ParamGrid build_param_grid(const AxisSpec& alpha2_axis, const AxisSpec& sigma2_axis,
                           double sigma_bar2, double Sigma_hat, const Quadrature& q = {});

// Admissibility-derived default axes. alpha^2 spans [1.02, 16] * Sigma_hat /
// sigma_bar2; sigma^2 spans (1.01 Sigma_hat, 0.99 alpha2_max sigma_bar2).
AxisSpec default_alpha2_axis(double sigma_bar2, double Sigma_hat, int n = 100);
AxisSpec default_sigma2_axis(double sigma_bar2, double Sigma_hat, double alpha2_max,
                             int n = 100);

struct MleResult {
  ModelParams theta_hat;  // sigma_bar2 from the grid; eps left for the caller

  struct Row {
    double alpha2 = 0.0;
    double sigma2 = 0.0;
    double beta = 0.0;
    double loglik = 0.0;
  };
  std::vector<Row> surface;        // one row per retained candidate, grid order
  std::vector<std::size_t> ties;   // surface indices attaining the maximum
  int excluded = 0;
  double runtime_seconds = 0.0;
  long kernel_builds = 0;
  long filter_steps = 0;
  int workers = 1;
};

// Exhaustive likelihood evaluation over the retained candidates. The kernel
// table is built once per candidate. Argmax ties break lexicographically by
// (alpha2, sigma2) and are reported. The result is identical for any worker
// count: workers only partition the candidate list.
MleResult grid_search_mle(const MarketPath& path, const ParamGrid& grid,
                          const FilterGrid& filter_grid, int n_workers = 1);

}  // namespace lpm
