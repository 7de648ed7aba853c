#pragma once

#include <functional>

namespace lpm {

// Adaptive composite Gauss-Legendre integration on finite intervals.
// Panels are bisected until the one-panel and two-half-panel estimates agree
// within the local share of abs_tol; non-convergence throws NumericalError
// carrying the achieved error estimate.
struct Quadrature {
  double abs_tol = 1e-10;
  int max_depth = 48;
};

double integrate(const std::function<double(double)>& f, double a, double b,
                 const Quadrature& q = {}, double* achieved_error = nullptr);

}  // namespace lpm
