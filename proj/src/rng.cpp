#include "lpm/rng.hpp"

#include <cmath>

namespace lpm {
namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> counter,
                                               std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMult0, counter[0], hi0, lo0);
    mulhilo(kMult1, counter[2], hi1, lo1);
    counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

RngStream::RngStream(std::uint64_t seed, std::uint32_t stream, std::uint32_t tag)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream),
      tag_(tag) {}

std::array<std::uint64_t, 2> RngStream::next_block() {
  const std::array<std::uint32_t, 4> counter = {static_cast<std::uint32_t>(index_),
                                                static_cast<std::uint32_t>(index_ >> 32),
                                                stream_, tag_};
  ++index_;
  const auto b = Philox4x32::block(counter, key_);
  return {(static_cast<std::uint64_t>(b[1]) << 32) | b[0],
          (static_cast<std::uint64_t>(b[3]) << 32) | b[2]};
}

double RngStream::next_u01() {
  if (buffer_pos_ >= 2) {
    buffer_ = next_block();
    buffer_pos_ = 0;
  }
  const std::uint64_t bits = buffer_[buffer_pos_++];
  // top 53 bits into (0, 1]: keeps log(u) finite for Box-Muller
  return 1.0 - static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::pair<double, double> RngStream::next_normal_pair() {
  const double u1 = next_u01();
  const double u2 = next_u01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

double RngStream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const auto [g0, g1] = next_normal_pair();
  cached_normal_ = g1;
  has_cached_normal_ = true;
  return g0;
}

}  // namespace lpm
