#pragma once

#include "lpm/path.hpp"
#include "lpm/quadrature.hpp"

namespace lpm {

// Block count for the midprice block-variance estimator. The default
// floor(sqrt(T)) balances block length against block count.
struct SigmaHatConfig {
  int m_override = 0;  // 0 selects floor(sqrt(T))

  int blocks(double horizon) const;
};

// Order flow quadratic variation rate: sum of squared one-step increments
// divided by the horizon.
double estimate_sigma_bar2(const MarketPath& path);

// Long-run midprice variance rate: (1/T) sum over M blocks of squared midprice
// block increments, block boundaries snapped to the observation grid.
double estimate_sigma_hat(const MarketPath& path, const SigmaHatConfig& cfg = {});

struct EpsilonEstimate {
  double value = 0.0;
  bool clamped = false;  // bisection bracket end returned instead of an interior root
};

// Matches the observed wide-spread time fraction to the stationary probability
// 2 Int_0^eps chi(gamma_hat, x) dx by bisection on [1e-4, 1/2 - 1e-4] to 1e-6.
EpsilonEstimate estimate_epsilon(const MarketPath& path, double gamma_hat,
                                 const Quadrature& q = {});

}  // namespace lpm
