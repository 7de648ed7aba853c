#include "lpm/micro.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lpm {

double wrap01(double x) {
  double r = x - std::floor(x);
  // floor rounding can land exactly on 1 for tiny negative inputs
  if (r >= 1.0) r -= 1.0;
  return r;
}

double wrap_signed(double x) {
  double r = wrap01(x + 0.5) - 0.5;
  return r;
}

double mu(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("mu: non-finite input");
  return wrap01(x) - 0.5;
}

std::pair<std::int64_t, std::int64_t> bid_ask(double x, double eps) {
  if (!std::isfinite(x)) throw std::invalid_argument("bid_ask: non-finite price");
  if (!(eps >= 0.0 && eps < 0.5))
    throw std::invalid_argument("bid_ask: eps must lie in [0, 1/2), got " + std::to_string(eps));
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= eps) {
    const auto i = static_cast<std::int64_t>(std::llround(nearest));
    return {i - 1, i + 1};
  }
  return {static_cast<std::int64_t>(std::llround(std::floor(x))),
          static_cast<std::int64_t>(std::llround(std::ceil(x)))};
}

}  // namespace lpm
