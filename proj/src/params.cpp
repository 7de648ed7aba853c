#include "lpm/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lpm {

bool ModelParams::is_valid() const {
  return std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(sigma2) &&
         std::isfinite(sigma_bar2) && std::isfinite(eps) && alpha > 0.0 && beta >= 0.0 &&
         sigma2 > 0.0 && sigma_bar2 > 0.0 && sigma2 < alpha * alpha * sigma_bar2 &&
         eps >= 0.0 && eps < 0.5;
}

void ModelParams::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("model params: " + what);
  };
  if (!(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(sigma2) &&
        std::isfinite(sigma_bar2) && std::isfinite(eps)))
    fail("non-finite field");
  if (!(alpha > 0.0)) fail("alpha must be > 0, got " + std::to_string(alpha));
  if (!(beta >= 0.0)) fail("beta must be >= 0, got " + std::to_string(beta));
  if (!(sigma2 > 0.0)) fail("sigma2 must be > 0, got " + std::to_string(sigma2));
  if (!(sigma_bar2 > 0.0)) fail("sigma_bar2 must be > 0, got " + std::to_string(sigma_bar2));
  if (!(sigma2 < alpha * alpha * sigma_bar2))
    fail("noise ordering violated: need sigma2 < alpha^2 * sigma_bar2, got sigma2 = " +
         std::to_string(sigma2) + " vs alpha^2 * sigma_bar2 = " +
         std::to_string(alpha * alpha * sigma_bar2));
  if (!(eps >= 0.0 && eps < 0.5)) fail("eps must lie in [0, 1/2), got " + std::to_string(eps));
}

SplitCoefficients split_coefficients(const ModelParams& p) {
  p.validate();
  const double a2s = p.alpha * p.alpha * p.sigma_bar2;
  SplitCoefficients c;
  c.A2 = p.sigma2 * (a2s - p.sigma2) / a2s;
  c.C = p.beta * (a2s - p.sigma2) / (p.alpha * p.sigma_bar2);
  c.kappa = p.sigma2 / (p.alpha * p.sigma_bar2);
  return c;
}

}  // namespace lpm
