#pragma once

#include "lpm/params.hpp"
#include "lpm/quadrature.hpp"

namespace lpm {

// phi(z) = 2 Int_0^1 exp(-z(x-1/2)^2) Int_0^x exp(z(y-1/2)^2) dy dx for z >= 0.
// phi(0) = 1, strictly increasing, asymptotically 2 sqrt(pi) e^{z/4} / z^{3/2};
// overflows past z ~ 2.9e3 and then throws NumericalError.
double phi(double z, const Quadrature& q = {});

// phi(z) - 1 without cancellation (expm1 integrand); O(z^2) near zero.
double phi_m1(double z, const Quadrature& q = {});

// psi(z) = Int_0^1 exp(z y^2 - z y) dy in (0, 1]; psi(0) = 1, strictly decreasing.
double psi(double z, const Quadrature& q = {});

// 1 - psi(z) without cancellation; O(z) near zero.
double one_m_psi(double z, const Quadrature& q = {});

// Stationary density of the latent price modulo 1:
// chi(x) = exp(gamma x^2 - gamma x) / psi(gamma) on [0, 1].
double chi(double gamma, double x, const Quadrature& q = {});

// Long-run variance rate of the latent price: Sigma(theta) = sigma2 / phi(gamma).
double big_sigma(const ModelParams& p, const Quadrature& q = {});

// Identification ratio (1 - 1/phi(z)) / (z (1/psi(z) - 1) phi(z)); finite limit
// 1/30 as z -> 0+ and strictly decreasing over the working range, which is what
// makes gamma recoverable from moment ratios.
double assumption1_fn(double z, const Quadrature& q = {});

}  // namespace lpm
