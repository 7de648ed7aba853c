#pragma once

#include <optional>

#include "lpm/filter.hpp"
#include "lpm/quadrature.hpp"

namespace lpm {

// log L_T(theta) = sum_i [ -(beta^2 / 2 sigma_bar2) mu_i^2 dt
//                          + (beta / sigma_bar2) mu_i dY_i ]
// with mu_i the filter's conditional micro drift at the start of step i.
// Exactly zero when beta = 0.
double log_likelihood(const MarketPath& path, const ModelParams& p,
                      const FilterGrid& grid, const FilterOptions& opts = {});

// The unique beta > 0 solving sigma2 / phi(alpha beta / sigma2) = Sigma_hat,
// by bracket growth and bisection on gamma to 1e-10 relative. Empty when the
// candidate is inadmissible: sigma2 <= Sigma_hat or sigma2 >= alpha2 sigma_bar2.
std::optional<double> invert_beta(double alpha2, double sigma2, double sigma_bar2,
                                  double Sigma_hat, const Quadrature& q = {});

}  // namespace lpm
