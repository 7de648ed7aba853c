#include "support/oracles.hpp"

#include <algorithm>
#include <stdexcept>

namespace oracle {
namespace {

double wrap01(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r -= 1.0;
  return r;
}

double drift_mu(double x) { return wrap01(x) - 0.5; }

// cyclic tridiagonal solve (Thomas + Sherman-Morrison), coefficients constant:
// diag d, off-diagonals o, periodic corners o
std::vector<double> solve_cyclic(double d, double o, std::vector<double> rhs) {
  const int n = static_cast<int>(rhs.size());
  const double gamma = -d;
  std::vector<double> diag(n, d), u(n, 0.0);
  diag[0] -= gamma;
  diag[n - 1] -= o * o / gamma;
  u[0] = gamma;
  u[n - 1] = o;
  auto tri = [&](std::vector<double> b) {
    std::vector<double> dd = diag;
    for (int i = 1; i < n; ++i) {
      const double f = o / dd[i - 1];
      dd[i] -= f * o;
      b[i] -= f * b[i - 1];
    }
    b[n - 1] /= dd[n - 1];
    for (int i = n - 2; i >= 0; --i) b[i] = (b[i] - o * b[i + 1]) / dd[i];
    return b;
  };
  std::vector<double> x = tri(std::move(rhs));
  std::vector<double> z = tri(u);
  const double fact = (x[0] + o * x[n - 1] / gamma) / (1.0 + z[0] + o * z[n - 1] / gamma);
  for (int i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

}  // namespace

long double phi_simpson(double z, long double tol) {
  const long double zl = z;
  auto outer = [zl](long double x) {
    const long double ax = (x - 0.5L) * (x - 0.5L);
    auto inner = [zl](long double y) {
      const long double ay = (y - 0.5L) * (y - 0.5L);
      return std::exp(zl * ay);
    };
    const int n = std::max<int>(32, static_cast<int>(std::ceil((double)x * 1024)) * 2);
    return std::exp(-zl * ax) * simpson(inner, 0.0L, x, n);
  };
  return 2.0L * simpson_auto(outer, 0.0L, 1.0L, tol);
}

long double psi_simpson(double z, long double tol) {
  const long double zl = z;
  return simpson_auto([zl](long double y) { return std::exp(zl * y * (y - 1.0L)); }, 0.0L,
                      1.0L, tol);
}

long double erfi_series(long double w) {
  // 2/sqrt(pi) * sum_k w^{2k+1} (w^2)^k / (k! (2k+1)); all terms positive
  const long double w2 = w * w;
  long double term = w;
  long double acc = w;
  for (int k = 1; k < 500; ++k) {
    term *= w2 / k;
    const long double contrib = term / (2 * k + 1);
    acc += contrib;
    if (contrib < acc * 1e-22L) break;
  }
  return acc * 2.0L / std::sqrt((long double)M_PI);
}

long double phi_closed(double z) {
  if (z == 0.0) return 1.0L;
  const long double s = std::sqrt((long double)z) / 2.0L;
  return (long double)M_PI / z * std::erf(s) * erfi_series(s);
}

long double psi_closed(double z) {
  if (z == 0.0) return 1.0L;
  const long double s = std::sqrt((long double)z) / 2.0L;
  return std::sqrt((long double)M_PI / z) * std::exp(-(long double)z / 4.0L) *
         erfi_series(s);
}

long double wrapped_gauss_images(double d, double v, int n_images) {
  const long double inv2v = 1.0L / (2.0L * (long double)v);
  long double acc = 0.0L;
  for (int m = -n_images; m <= n_images; ++m) {
    const long double u = (long double)d + m;
    acc += std::exp(-u * u * inv2v);
  }
  return acc / std::sqrt(2.0L * (long double)M_PI * (long double)v);
}

std::vector<double> transport_reference(const std::vector<double>& u_coarse, double A2,
                                        double C, double kappa_y, double dt, int n_fine) {
  const int nc = static_cast<int>(u_coarse.size());
  if (n_fine % nc != 0) throw std::invalid_argument("transport_reference: grid mismatch");
  const int ratio = n_fine / nc;
  const double h = 1.0 / n_fine;

  // piecewise-constant prolongation of the coarse density
  std::vector<double> v(n_fine);
  for (int j = 0; j < n_fine; ++j) v[j] = u_coarse[j / ratio];

  // Crank-Nicolson heat semigroup over dt: (I - r L) v' = (I + r L) v
  {
    const int substeps = 400;
    const double tau = dt / substeps;
    const double r = 0.25 * A2 * tau / (h * h);  // (A2/2) * tau / h^2 * (1/2)
    for (int s = 0; s < substeps; ++s) {
      std::vector<double> rhs(n_fine);
      for (int j = 0; j < n_fine; ++j) {
        const double lap =
            v[(j + 1) % n_fine] - 2.0 * v[j] + v[(j + n_fine - 1) % n_fine];
        rhs[j] = v[j] + r * lap;
      }
      v = solve_cyclic(1.0 + 2.0 * r, -r, std::move(rhs));
    }
  }

  // pullback transport: dv/dt + b(x) dv/dx = 0 with b(x) = C mu(kappa_y + x),
  // first-order upwind, explicit CFL substepping; the value field is carried,
  // mass restored by the final renormalization exactly as in the checked code
  if (C > 0.0) {
    const double bmax = 0.5 * C;
    const int substeps = std::max(1, (int)std::ceil(dt * bmax / (0.5 * h)));
    const double tau = dt / substeps;
    std::vector<double> b(n_fine);
    for (int j = 0; j < n_fine; ++j) b[j] = C * drift_mu(kappa_y + (j + 0.5) * h);
    std::vector<double> next(n_fine);
    for (int s = 0; s < substeps; ++s) {
      for (int j = 0; j < n_fine; ++j) {
        const double grad = b[j] > 0.0
                                ? (v[j] - v[(j + n_fine - 1) % n_fine]) / h
                                : (v[(j + 1) % n_fine] - v[j]) / h;
        next[j] = v[j] - tau * b[j] * grad;
      }
      v.swap(next);
    }
  }

  // aggregate to coarse cells and renormalize
  std::vector<double> out(nc, 0.0);
  for (int j = 0; j < n_fine; ++j) out[j / ratio] += v[j];
  double mass = 0.0;
  for (int j = 0; j < nc; ++j) {
    out[j] /= ratio;
    mass += out[j];
  }
  mass /= nc;
  for (double& x : out) x /= mass;
  return out;
}

}  // namespace oracle
