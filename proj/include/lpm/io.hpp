#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lpm/mle.hpp"
#include "lpm/path.hpp"

namespace lpm {

// One tick file row. Quotes are integer tick levels; order flow is cumulative.
struct TickRecord {
  double timestamp = 0.0;
  std::int64_t bid = 0;
  std::int64_t ask = 0;
  double order_flow = 0.0;
  double latent = 0.0;   // only meaningful when has_latent is set on the file
};

// Ordered key=value pairs; echoed into every artifact so runs are replayable.
using ConfigMap = std::vector<std::pair<std::string, std::string>>;

struct TickFile {
  std::vector<TickRecord> records;
  bool has_latent = false;
  ConfigMap comments;  // key=value comment lines found in the file
};

TickFile load_ticks(const std::string& path);
TickFile parse_ticks(std::istream& in, const std::string& name);

// Last-observation-carried-forward resampling onto multiples of `step`.
// Order flow is rebased to zero at the first grid sample. Tick gaps longer
// than gap_threshold are counted into *gaps_flagged, not fatal.
MarketPath resample(const TickFile& ticks, double step, double gap_threshold = 60.0,
                    int* gaps_flagged = nullptr);

// Writes a MarketPath as a tick file (latent column included when present),
// the effective configuration echoed as leading # key=value lines. Floats use
// shortest round-trip formatting, so load + rewrite reproduces bytes.
void write_dataset(const MarketPath& path, const std::string& dest,
                   const ConfigMap& config = {});

// Estimation artifact: moment estimates, the argmax, diagnostics, and the full
// likelihood surface, all replayable from the embedded config echo.
struct EstimationResult {
  double sigma_bar2_hat = 0.0;
  double Sigma_hat = 0.0;
  int m_blocks = 0;
  double alpha2_hat = 0.0;
  double beta_hat = 0.0;
  double sigma2_hat = 0.0;
  double eps_hat = 0.0;
  bool eps_clamped = false;
  int excluded = 0;
  std::vector<std::size_t> ties;
  double runtime_seconds = 0.0;
  long kernel_builds = 0;
  long filter_steps = 0;
  int workers = 1;
  std::vector<MleResult::Row> surface;
  ConfigMap config;
};

inline constexpr const char* kResultFormatVersion = "latentmle.result.v1";

void save_result(const EstimationResult& r, const std::string& dest);
EstimationResult load_result(const std::string& source);

// Plain key=value file; # comments and blank lines skipped. Order preserved.
ConfigMap load_config(const std::string& path);

// Shortest decimal that round-trips the exact double.
std::string format_double(double x);

}  // namespace lpm
