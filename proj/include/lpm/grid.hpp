#pragma once

namespace lpm {

// Uniform periodic grid on [0, 1): n_cells cells of width 1/n_cells with
// centers at (j + 1/2)/n_cells. Densities are piecewise constant per cell.
struct FilterGrid {
  int n_cells = 100;

  double dx() const { return 1.0 / n_cells; }
  double center(int j) const { return (j + 0.5) / n_cells; }
  void validate() const;  // n_cells >= 8
};

}  // namespace lpm
