#include "lpm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lpm/errors.hpp"
#include "lpm/special.hpp"

namespace lpm {

int SigmaHatConfig::blocks(double horizon) const {
  if (m_override > 0) return m_override;
  const int m = static_cast<int>(std::floor(std::sqrt(horizon)));
  return std::max(1, m);
}

double estimate_sigma_bar2(const MarketPath& path) {
  path.validate();
  if (path.size() < 2) throw DataError("sigma_bar2: need at least two observations");
  double acc = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double dy = path.order_flow[i] - path.order_flow[i - 1];
    acc += dy * dy;
  }
  return acc / path.horizon();
}

double estimate_sigma_hat(const MarketPath& path, const SigmaHatConfig& cfg) {
  path.validate();
  if (path.size() < 2) throw DataError("Sigma_hat: need at least two observations");
  const double T = path.horizon();
  const int m = cfg.blocks(T);
  if (T / m < path.dt_obs)
    throw std::invalid_argument("Sigma_hat: " + std::to_string(m) +
                                " blocks exceed the grid resolution for T = " +
                                std::to_string(T));
  const auto last = static_cast<std::int64_t>(path.size()) - 1;
  double acc = 0.0;
  std::int64_t prev_idx = 0;
  for (int k = 1; k <= m; ++k) {
    // block boundary at time k T / m, snapped to the observation grid
    std::int64_t idx = std::llround(static_cast<double>(k) * static_cast<double>(last) / m);
    idx = std::clamp<std::int64_t>(idx, 0, last);
    const double inc = path.mid(static_cast<std::size_t>(idx)) -
                       path.mid(static_cast<std::size_t>(prev_idx));
    acc += inc * inc;
    prev_idx = idx;
  }
  return acc / T;
}

EpsilonEstimate estimate_epsilon(const MarketPath& path, double gamma_hat,
                                 const Quadrature& q) {
  path.validate();
  if (path.size() == 0) throw DataError("epsilon: empty path");
  if (!std::isfinite(gamma_hat) || gamma_hat < 0.0)
    throw std::invalid_argument("epsilon: gamma_hat must be finite and >= 0");

  std::size_t wide = 0;
  for (std::size_t i = 0; i < path.size(); ++i)
    if (path.ask[i] - path.bid[i] >= 2) ++wide;
  const double f = static_cast<double>(wide) / static_cast<double>(path.size());

  // stationary probability of the widened band: 2 Int_0^e chi(gamma, x) dx
  const double psi_g = psi(gamma_hat, q);
  auto band_mass = [&](double e) {
    const double m = integrate(
        [gamma_hat](double x) { return std::exp(gamma_hat * x * (x - 1.0)); }, 0.0, e, q);
    return 2.0 * m / psi_g;
  };

  const double lo = 1e-4, hi = 0.5 - 1e-4;
  EpsilonEstimate est;
  if (band_mass(lo) >= f) {
    est.value = lo;
    est.clamped = true;
    return est;
  }
  if (band_mass(hi) <= f) {
    est.value = hi;
    est.clamped = true;
    return est;
  }
  double a = lo, b = hi;
  while (b - a > 1e-6) {
    const double m = 0.5 * (a + b);
    (band_mass(m) < f ? a : b) = m;
  }
  est.value = 0.5 * (a + b);
  est.clamped = false;
  return est;
}

}  // namespace lpm
