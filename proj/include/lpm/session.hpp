#pragma once

#include <optional>
#include <string>

#include "lpm/io.hpp"
#include "lpm/mle.hpp"

namespace lpm {

// Whole estimation pipeline: load ticks, resample, moment estimators,
// candidate grid, exhaustive likelihood search, epsilon match, artifact.
struct SessionConfig {
  std::string input;
  std::string output;              // empty: no artifact written
  double resample_step = 1.0;
  double gap_threshold = 60.0;
  int m_blocks = 0;                // 0: floor(sqrt(T))
  std::optional<AxisSpec> alpha2_axis;  // absent: admissibility-derived default
  std::optional<AxisSpec> sigma2_axis;
  int filter_cells = 100;
  int n_workers = 8;
  ConfigMap echo;                  // effective flag set, embedded into artifacts
};

EstimationResult run_estimate(const SessionConfig& cfg);

}  // namespace lpm
