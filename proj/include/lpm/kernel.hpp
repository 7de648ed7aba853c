#pragma once

#include <vector>

#include "lpm/grid.hpp"

namespace lpm {

// Heat kernel on the unit circle (wrapped Gaussian) with variance v = A2 * dt.
// Symmetric about 0 and 1/2 and normalized: Int_0^1 K(d) dd = 1.
//
// ring() holds K at the n grid distances for the circulant product; value()
// reads a clamped cubic spline table (relative accuracy ~1e-9 over the mass-
// carrying range); value_exact() sums Gaussian images for small v and the
// Fourier series for large v, both truncated below 1e-12 relative tails.
class WrappedGaussianKernel {
 public:
  WrappedGaussianKernel(double A2, double dt, const FilterGrid& grid);

  double variance() const { return v_; }
  double std_dev() const;
  int n_cells() const { return n_; }
  const std::vector<double>& ring() const { return ring_; }
  // ring doubled back to back so every circulant row is one contiguous slice
  const std::vector<double>& ring2() const { return ring2_; }

  double value(double d) const;        // spline table, d reduced to circle distance
  double value_exact(double d) const;  // direct image / Fourier summation

 private:
  double v_ = 0.0;
  int n_ = 0;
  double table_h_ = 0.0;
  std::vector<double> table_y_;   // values on [0, 1/2]
  std::vector<double> table_m_;   // spline second derivatives
  std::vector<double> ring_;      // K(distance of i cells), i = 0..n-1
  std::vector<double> ring2_;     // ring_ twice over, length 2n
};

WrappedGaussianKernel wrapped_gaussian_kernel(double A2, double dt, const FilterGrid& grid);

}  // namespace lpm
