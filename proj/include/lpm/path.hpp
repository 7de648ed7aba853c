#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpm/params.hpp"

namespace lpm {

struct PathMeta {
  std::uint64_t seed = 0;
  std::optional<ModelParams> params;  // present for simulated data
};

// Observation record on a uniform time grid. All series share one length;
// order flow is rebased so order_flow[0] = 0. Quotes are integer tick levels
// with spread 1 away from integer latent prices and 2 at widened points.
struct MarketPath {
  double dt_obs = 1.0;
  std::vector<double> times;
  std::vector<double> order_flow;
  std::vector<std::int64_t> bid;
  std::vector<std::int64_t> ask;
  std::optional<std::vector<double>> latent;  // simulated data keeps the truth
  std::optional<PathMeta> meta;

  std::size_t size() const { return times.size(); }
  double horizon() const { return times.empty() ? 0.0 : times.back() - times.front(); }
  double mid(std::size_t i) const {
    return 0.5 * (static_cast<double>(bid[i]) + static_cast<double>(ask[i]));
  }
  void validate() const;  // throws DataError on any invariant violation
};

}  // namespace lpm
