#include "lpm/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpm/detail/gauss.hpp"
#include "lpm/errors.hpp"

namespace lpm {
namespace {

void require_z(double z, const char* who) {
  if (!std::isfinite(z) || z < 0.0)
    throw std::invalid_argument(std::string(who) + ": argument must be finite and >= 0");
}

// Magnitude guess for psi(z), used only to scale absolute tolerances.
double psi_scale(double z) { return z < 2.0 ? 1.0 : std::min(1.0, 2.5 / z); }

// Panelized antiderivative cache for a smooth positive integrand on [0, 1]:
// panels refined until each carries at most tol * length error, prefix sums
// stored, point evaluation = prefix + one partial panel.
template <class F>
class CumulativeIntegral {
 public:
  CumulativeIntegral(F f, double tol_per_unit) : f_(f) {
    edge_.push_back(0.0);
    cum_.push_back(0.0);
    refine(0.0, 1.0, detail::gl15_panel(f_, 0.0, 1.0), tol_per_unit, 0);
  }

  double total() const { return cum_.back(); }

  double eval(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return cum_.back();
    auto it = std::upper_bound(edge_.begin(), edge_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - edge_.begin()) - 1;
    return cum_[k] + detail::gl15_panel(f_, edge_[k], x);
  }

 private:
  void refine(double a, double b, double whole, double tol_per_unit, int depth) {
    const double m = 0.5 * (a + b);
    const double left = detail::gl15_panel(f_, a, m);
    const double right = detail::gl15_panel(f_, m, b);
    if (std::abs(whole - (left + right)) <= tol_per_unit * (b - a) || depth >= 48) {
      if (depth >= 48)
        throw NumericalError("cumulative integral: panel refinement did not converge");
      edge_.push_back(m);
      cum_.push_back(cum_.back() + left);
      edge_.push_back(b);
      cum_.push_back(cum_.back() + right);
      return;
    }
    refine(a, m, left, tol_per_unit, depth + 1);
    refine(m, b, right, tol_per_unit, depth + 1);
  }

  F f_;
  std::vector<double> edge_;
  std::vector<double> cum_;
};

// phi - 1 for small z through expm1, so the O(z^2) value survives the z -> 0
// cancellation: phi - 1 = 2 Int_0^1 Int_0^x expm1(z (a(y) - a(x))) dy dx with
// a(t) = (t - 1/2)^2.
double phi_m1_small(double z, double abs_tol) {
  const double tol = std::max(1e-15, 0.25 * abs_tol);
  auto outer = [z, tol](double x) {
    const double ax = (x - 0.5) * (x - 0.5);
    return detail::adaptive_gl15(
        [z, ax](double y) {
          const double ay = (y - 0.5) * (y - 0.5);
          return std::expm1(z * (ay - ax));
        },
        0.0, x, tol);
  };
  return 2.0 * detail::adaptive_gl15(outer, 0.0, 1.0, tol);
}

// Peak-shifted factored evaluation for z >= 2:
//   phi = 2 e^{z/4} Int_0^1 e^{-z a(x)} Is(x) dx,  Is(x) = Int_0^x e^{-z y (1-y)} dy,
// every intermediate bounded by 1, the exponential restored at the end.
double phi_factored(double z, double abs_tol) {
  const double scale = psi_scale(z);
  const double inner_tol = std::max(1e-16, std::min(abs_tol, 1e-12 * scale));
  auto gs = [z](double y) { return std::exp(-z * y * (1.0 - y)); };
  CumulativeIntegral<decltype(gs)> inner(gs, inner_tol);

  auto f = [z, &inner](double x) {
    const double d = x - 0.5;
    return std::exp(-z * d * d) * inner.eval(x);
  };
  const double outer_tol = std::max(1e-16, std::min(abs_tol, 1e-12 * scale));
  const double s = detail::adaptive_gl15(f, 0.0, 1.0, outer_tol);
  if (!(s > 0.0)) throw NumericalError("phi: factored integral degenerated");

  const double log_phi = std::log(2.0 * s) + 0.25 * z;
  if (log_phi > 709.0)
    throw NumericalError("phi: overflow at z = " + std::to_string(z) +
                         " (log phi ~ " + std::to_string(log_phi) + ")");
  return std::exp(log_phi);
}

}  // namespace

double phi(double z, const Quadrature& q) {
  require_z(z, "phi");
  if (z == 0.0) return 1.0;
  if (z < 2.0) return 1.0 + phi_m1_small(z, q.abs_tol);
  return phi_factored(z, q.abs_tol);
}

double phi_m1(double z, const Quadrature& q) {
  require_z(z, "phi_m1");
  if (z == 0.0) return 0.0;
  if (z < 2.0) return phi_m1_small(z, q.abs_tol);
  return phi_factored(z, q.abs_tol) - 1.0;
}

double psi(double z, const Quadrature& q) {
  require_z(z, "psi");
  if (z == 0.0) return 1.0;
  if (z < 2.0) return 1.0 - one_m_psi(z, q);
  const double tol = std::max(1e-16, std::min(q.abs_tol, 1e-12 * psi_scale(z)));
  return detail::adaptive_gl15([z](double y) { return std::exp(-z * y * (1.0 - y)); }, 0.0,
                               1.0, tol);
}

double one_m_psi(double z, const Quadrature& q) {
  require_z(z, "one_m_psi");
  if (z == 0.0) return 0.0;
  if (z >= 2.0) return 1.0 - psi(z, q);
  const double tol = std::max(1e-15, 0.25 * q.abs_tol);
  return -detail::adaptive_gl15([z](double y) { return std::expm1(-z * y * (1.0 - y)); },
                                0.0, 1.0, tol);
}

double chi(double gamma, double x, const Quadrature& q) {
  require_z(gamma, "chi");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("chi: x must lie in [0, 1], got " + std::to_string(x));
  return std::exp(gamma * x * (x - 1.0)) / psi(gamma, q);
}

double big_sigma(const ModelParams& p, const Quadrature& q) {
  p.validate();
  return p.sigma2 / phi(p.gamma(), q);
}

double assumption1_fn(double z, const Quadrature& q) {
  if (!std::isfinite(z) || z <= 0.0)
    throw std::invalid_argument("assumption1_fn: argument must be finite and > 0");
  const double dphi = phi_m1(z, q);     // phi - 1
  const double dpsi = one_m_psi(z, q);  // 1 - psi
  const double ph = 1.0 + dphi;
  const double ps = 1.0 - dpsi;
  // (1 - 1/phi) / (z (1/psi - 1) phi) rearranged so small-z cancellation lives
  // entirely inside dphi and dpsi
  return (dphi * ps) / (z * dpsi * ph * ph);
}

}  // namespace lpm
