#include "lpm/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lpm/errors.hpp"
#include "lpm/micro.hpp"

namespace lpm {
namespace {

// Thomas solve of the clamped cubic spline system in second-derivative form,
// end slopes pinned to zero (the kernel is even about 0 and flat in the tail
// or even about 1/2, whichever ends the table).
std::vector<double> clamped_spline_m(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> diag(n), rhs(n), m(n);
  std::vector<double> upper(n, 1.0);
  diag[0] = 2.0;
  rhs[0] = 6.0 * (y[1] - y[0]) / (h * h);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    diag[i] = 4.0;
    rhs[i] = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
  }
  diag[n - 1] = 2.0;
  rhs[n - 1] = -6.0 * (y[n - 1] - y[n - 2]) / (h * h);

  for (std::size_t i = 1; i < n; ++i) {
    const double f = 1.0 / diag[i - 1];
    diag[i] -= f * upper[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  m[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
  return m;
}

}  // namespace

WrappedGaussianKernel::WrappedGaussianKernel(double A2, double dt, const FilterGrid& grid) {
  grid.validate();
  if (!(std::isfinite(A2) && A2 > 0.0) || !(std::isfinite(dt) && dt > 0.0))
    throw std::invalid_argument("kernel: A2 and dt must be finite and > 0");
  v_ = A2 * dt;
  if (v_ < 1e-12)
    throw NumericalError("kernel: variance A2 * dt = " + std::to_string(v_) +
                         " is below 1e-12, diffusion step degenerate");
  n_ = grid.n_cells;

  const double sigma = std::sqrt(v_);
  const double range = std::min(0.5, 12.0 * sigma);  // beyond 12 sigma the kernel is dead
  const int n_seg = 2048;
  table_h_ = range / n_seg;
  table_y_.resize(n_seg + 1);
  for (int i = 0; i <= n_seg; ++i) table_y_[i] = value_exact(i * table_h_);
  table_m_ = clamped_spline_m(table_y_, table_h_);

  ring_.resize(n_);
  const double dx = 1.0 / n_;
  for (int i = 0; i < n_; ++i) ring_[i] = value_exact(std::min(i, n_ - i) * dx);
  ring2_.resize(2 * n_);
  for (int i = 0; i < 2 * n_; ++i) ring2_[i] = ring_[i % n_];
}

double WrappedGaussianKernel::std_dev() const { return std::sqrt(v_); }

double WrappedGaussianKernel::value_exact(double d) const {
  double r = wrap01(d);
  r = std::min(r, 1.0 - r);  // circle distance in [0, 1/2]
  if (v_ <= 0.15) {
    // image sum; the cutoff keeps the dropped tail under 1e-18 relative
    const int n_images = static_cast<int>(std::ceil(0.5 + std::sqrt(90.0 * v_))) + 1;
    const double inv2v = 1.0 / (2.0 * v_);
    double acc = 0.0;
    for (int m = -n_images; m <= n_images; ++m) {
      const double u = r + static_cast<double>(m);
      acc += std::exp(-u * u * inv2v);
    }
    return acc / std::sqrt(2.0 * M_PI * v_);
  }
  // Fourier series: converges in a handful of terms once v is large
  double acc = 1.0;
  for (int k = 1;; ++k) {
    const double f = std::exp(-2.0 * M_PI * M_PI * k * k * v_);
    if (f < 1e-18) break;
    acc += 2.0 * f * std::cos(2.0 * M_PI * k * r);
  }
  return acc;
}

double WrappedGaussianKernel::value(double d) const {
  double r = wrap01(d);
  r = std::min(r, 1.0 - r);
  const int n_seg = static_cast<int>(table_y_.size()) - 1;
  const double range = table_h_ * n_seg;
  if (range < 0.5 && r >= range) return 0.0;  // dead tail outside the table
  double p = r / table_h_;
  int i = static_cast<int>(p);
  if (i >= n_seg) i = n_seg - 1;
  const double t = p - i;
  const double h2 = table_h_ * table_h_;
  const double omt = 1.0 - t;
  const double s = table_m_[i] * h2 * omt * omt * omt / 6.0 +
                   table_m_[i + 1] * h2 * t * t * t / 6.0 +
                   (table_y_[i] - table_m_[i] * h2 / 6.0) * omt +
                   (table_y_[i + 1] - table_m_[i + 1] * h2 / 6.0) * t;
  // cubic interpolation of a near-dead tail can dip a hair below zero
  return s > 0.0 ? s : 0.0;
}

WrappedGaussianKernel wrapped_gaussian_kernel(double A2, double dt, const FilterGrid& grid) {
  return WrappedGaussianKernel(A2, dt, grid);
}

}  // namespace lpm
