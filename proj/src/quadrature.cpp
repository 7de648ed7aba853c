#include "lpm/quadrature.hpp"

#include "lpm/detail/gauss.hpp"

namespace lpm {

double integrate(const std::function<double(double)>& f, double a, double b,
                 const Quadrature& q, double* achieved_error) {
  return detail::adaptive_gl15([&](double x) { return f(x); }, a, b, q.abs_tol, q.max_depth,
                               achieved_error);
}

}  // namespace lpm
