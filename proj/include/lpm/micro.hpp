#pragma once

#include <cstdint>
#include <utility>

namespace lpm {

// Fractional part in [0, 1); negative inputs wrap upward.
double wrap01(double x);

// Signed circle coordinate in [-1/2, 1/2).
double wrap_signed(double x);

// 1-periodic micro drift: mu(x) = (x mod 1) - 1/2. Range [-1/2, 1/2).
double mu(double x);

// Quote projection of a latent price. When no integer lies within eps of x the
// quotes are (floor(x), ceil(x)); when |x - i| <= eps for integer i the spread
// widens to (i - 1, i + 1). Requires eps in [0, 1/2).
std::pair<std::int64_t, std::int64_t> bid_ask(double x, double eps);

}  // namespace lpm
