#include "lpm/path.hpp"

#include <cmath>
#include <string>

#include "lpm/errors.hpp"
#include "lpm/micro.hpp"

namespace lpm {

void MarketPath::validate() const {
  auto fail = [](const std::string& what) { throw DataError("market path: " + what); };
  const std::size_t n = times.size();
  if (order_flow.size() != n || bid.size() != n || ask.size() != n)
    fail("series lengths differ");
  if (latent && latent->size() != n) fail("latent series length differs");
  if (n == 0) return;
  if (!(dt_obs > 0.0)) fail("dt_obs must be > 0");
  if (std::abs(order_flow.front()) > 1e-12) fail("order flow is not rebased to 0");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(order_flow[i]))
      fail("non-finite sample at row " + std::to_string(i));
    if (i > 0 && !(times[i] > times[i - 1]))
      fail("timestamps not strictly increasing at row " + std::to_string(i));
    if (!(bid[i] < ask[i])) fail("bid >= ask at row " + std::to_string(i));
    const std::int64_t spread = ask[i] - bid[i];
    if (spread != 1 && spread != 2)
      fail("spread outside {1, 2} at row " + std::to_string(i));
    if (latent && !std::isfinite((*latent)[i]))
      fail("non-finite latent price at row " + std::to_string(i));
  }
}

}  // namespace lpm
