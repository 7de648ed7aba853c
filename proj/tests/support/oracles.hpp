#pragma once

#include <cmath>
#include <functional>
#include <vector>

// Independent reference implementations used only by tests. Everything here
// deliberately avoids the library's numerical machinery: composite Simpson in
// long double instead of adaptive Gauss-Legendre, closed forms through erfi,
// literal image sums, and a fine-grid PDE solver for the transport operator.
namespace oracle {

template <class F>
long double simpson(F&& f, long double a, long double b, int n) {
  const long double h = (b - a) / n;
  long double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0L : 2.0L);
  return acc * h / 3.0L;
}

template <class F>
long double simpson_auto(F&& f, long double a, long double b, long double tol) {
  int n = 64;
  long double prev = simpson(f, a, b, n);
  for (int round = 0; round < 14; ++round) {
    n *= 2;
    const long double cur = simpson(f, a, b, n);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  return prev;
}

// nested Simpson evaluation of the double integral defining phi
long double phi_simpson(double z, long double tol = 1e-12L);

// single Simpson evaluation of psi
long double psi_simpson(double z, long double tol = 1e-13L);

// scaled imaginary error function erfi(w) = 2/sqrt(pi) Int_0^w e^{t^2} dt by
// its everywhere-positive power series
long double erfi_series(long double w);

// closed forms: phi(z) = (pi/z) erf(sqrt(z)/2) erfi(sqrt(z)/2),
//               psi(z) = sqrt(pi/z) e^{-z/4} erfi(sqrt(z)/2)
long double phi_closed(double z);
long double psi_closed(double z);

// literal wrapped Gaussian image sum with a generous image count
long double wrapped_gauss_images(double d, double v, int n_images = 64);

// Fine-grid reference for one transport-diffusion interval: Crank-Nicolson
// heat over dt, then non-conservative upwind pullback along the contracted
// characteristics, renormalized and aggregated back to the coarse cells.
// kappa_y is the product kappa * Y_t entering the drift argument.
std::vector<double> transport_reference(const std::vector<double>& u_coarse, double A2,
                                        double C, double kappa_y, double dt,
                                        int n_fine = 2000);

}  // namespace oracle
