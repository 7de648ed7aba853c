#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace lpm {

// Philox4x32-10 counter-based block cipher. A block is a pure function of
// (counter, key), so any (seed, stream, draw index) maps to the same bits on
// every platform and runs are reproducible without carrying generator state.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);
};

// Deterministic scalar stream over Philox blocks.
// key = seed; counter = (draw index lo, draw index hi, stream, tag). Distinct
// (stream, tag) pairs never share a counter, so per-path and per-purpose
// streams are independent by construction. Uniforms take the high 53 bits of a
// 64-bit lane into (0, 1]; normals are Box-Muller pairs of those uniforms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint32_t stream = 0, std::uint32_t tag = 0);

  double next_u01();  // in (0, 1]
  double next_normal();
  std::pair<double, double> next_normal_pair();

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_ = 0;
  std::uint32_t tag_ = 0;
  std::uint64_t index_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffer_pos_ = 2;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;

  std::array<std::uint64_t, 2> next_block();
};

}  // namespace lpm
