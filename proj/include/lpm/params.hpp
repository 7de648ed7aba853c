#pragma once

namespace lpm {

// Full parameterization of the latent price model.
//   alpha       price impact, ticks per unit of signed order flow, > 0
//   beta        mean-reversion strength of the intra-tick drift, >= 0
//   sigma2      latent price variance rate, 0 < sigma2 < alpha^2 * sigma_bar2
//   sigma_bar2  order flow variance rate, > 0
//   eps         spread-widening half-width around integer levels, in [0, 1/2)
// beta = 0 switches the drift off; it is admissible for fixtures but the
// estimator's candidate grids always carry beta > 0.
struct ModelParams {
  double alpha = 1.0;
  double beta = 0.0;
  double sigma2 = 1.0;
  double sigma_bar2 = 1.0;
  double eps = 0.0;

  double gamma() const { return alpha * beta / sigma2; }
  double kappa() const { return sigma2 / (alpha * sigma_bar2); }

  bool is_valid() const;
  void validate() const;  // throws std::invalid_argument naming the violated constraint
};

// Coefficients of the de-correlated companion state X~ = X - kappa * Y:
//   dX~ = C * mu(kappa Y + X~) dt + A dW,  W independent of the order flow noise.
struct SplitCoefficients {
  double A2 = 0.0;    // sigma2 (alpha^2 sigma_bar2 - sigma2) / (alpha^2 sigma_bar2)
  double C = 0.0;     // beta (alpha^2 sigma_bar2 - sigma2) / (alpha sigma_bar2)
  double kappa = 0.0; // sigma2 / (alpha sigma_bar2)
};

SplitCoefficients split_coefficients(const ModelParams& p);

}  // namespace lpm
