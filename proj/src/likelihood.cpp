#include "lpm/likelihood.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lpm/errors.hpp"
#include "lpm/special.hpp"

namespace lpm {

double log_likelihood(const MarketPath& path, const ModelParams& p, const FilterGrid& grid,
                      const FilterOptions& opts) {
  const FilterRun run = run_filter(path, p, grid, opts);
  double acc = 0.0;
  for (double v : run.log_increments) acc += v;
  return acc;
}

std::optional<double> invert_beta(double alpha2, double sigma2, double sigma_bar2,
                                  double Sigma_hat, const Quadrature& q) {
  if (!(std::isfinite(alpha2) && alpha2 > 0.0) || !(std::isfinite(sigma2) && sigma2 > 0.0) ||
      !(std::isfinite(sigma_bar2) && sigma_bar2 > 0.0) ||
      !(std::isfinite(Sigma_hat) && Sigma_hat > 0.0))
    throw std::invalid_argument("invert_beta: all arguments must be finite and > 0");

  // admissibility: Sigma_hat < sigma2 (phi > 1 needs gamma > 0) and the noise
  // ordering sigma2 < alpha^2 sigma_bar2
  if (sigma2 <= Sigma_hat || sigma2 >= alpha2 * sigma_bar2) return std::nullopt;

  const double target = sigma2 / Sigma_hat;  // solve phi(gamma) = target > 1
  double lo = 0.0, hi = 1.0;
  while (phi(hi, q) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 2820.0)
      throw NumericalError(
          "invert_beta: phi(gamma) = " + std::to_string(target) +
          " is beyond the representable range; Sigma_hat is implausibly small");
  }
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid, q) < target ? lo : hi) = mid;
  }
  const double gamma = 0.5 * (lo + hi);
  return gamma * sigma2 / std::sqrt(alpha2);
}

}  // namespace lpm
