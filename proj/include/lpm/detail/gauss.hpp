#pragma once

#include <array>
#include <cmath>
#include <cstdlib>

#include "lpm/errors.hpp"

// Shared 15-point Gauss-Legendre panel machinery. Header-only and templated so
// hot integrands avoid std::function dispatch; the public Quadrature interface
// wraps the same code.
namespace lpm::detail {

struct Gl15Rule {
  std::array<double, 15> node;    // on [-1, 1]
  std::array<double, 15> weight;  // positive, sums to 2
};

// Nodes are the roots of the degree-15 Legendre polynomial, found by Newton
// iteration from Chebyshev initial guesses; weights via the derivative formula.
inline const Gl15Rule& gl15_rule() {
  static const Gl15Rule rule = [] {
    Gl15Rule r{};
    const int n = 15;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) {
          p0 = 1.0;
          p1 = x;
          for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
          }
          dp = n * (x * p1 - p0) / (x * x - 1.0);
          break;
        }
      }
      r.node[i] = x;
      r.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

template <class F>
double gl15_panel(F&& f, double a, double b) {
  const Gl15Rule& r = gl15_rule();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 15; ++i) acc += r.weight[i] * f(c + h * r.node[i]);
  return acc * h;
}

template <class F>
double adaptive_rec(F&& f, double a, double b, double whole, double tol, int depth,
                    int max_depth, double& err_acc, bool& converged) {
  const double m = 0.5 * (a + b);
  const double left = gl15_panel(f, a, m);
  const double right = gl15_panel(f, m, b);
  const double diff = std::abs(whole - (left + right));
  if (diff <= tol || depth >= max_depth) {
    if (diff > tol) converged = false;
    err_acc += diff;
    return left + right;
  }
  return adaptive_rec(f, a, m, left, 0.5 * tol, depth + 1, max_depth, err_acc, converged) +
         adaptive_rec(f, m, b, right, 0.5 * tol, depth + 1, max_depth, err_acc, converged);
}

// Integrates f over [a, b] to absolute tolerance abs_tol. Throws NumericalError
// with the achieved error estimate if bisection depth runs out first.
template <class F>
double adaptive_gl15(F&& f, double a, double b, double abs_tol, int max_depth = 48,
                     double* achieved_error = nullptr) {
  if (!(std::isfinite(a) && std::isfinite(b)))
    throw NumericalError("quadrature: non-finite interval endpoint");
  if (a == b) {
    if (achieved_error) *achieved_error = 0.0;
    return 0.0;
  }
  double err = 0.0;
  bool converged = true;
  const double whole = gl15_panel(f, a, b);
  const double result =
      adaptive_rec(f, a, b, whole, abs_tol, 0, max_depth, err, converged);
  if (achieved_error) *achieved_error = err;
  if (!converged)
    throw NumericalError("quadrature: panel bisection did not converge, achieved error ~" +
                         std::to_string(err) + " against tolerance " + std::to_string(abs_tol));
  if (!std::isfinite(result)) throw NumericalError("quadrature: non-finite integral value");
  return result;
}

}  // namespace lpm::detail
