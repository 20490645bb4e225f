#pragma once

// Counter-based random numbers (Philox4x32-10).
//
// Every draw is a pure function of (seed, stream, substream, counter), so a
// sample path can be regenerated from its coordinates alone and parallel
// workers never share generator state.

#include <array>
#include <cstdint>

namespace cogrowth {

struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  bool operator==(const RngState&) const = default;
};

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

class CounterRng {
 public:
  /// Substream selects one independent sequence (e.g. one sample path) under
  /// a given (seed, stream).
  CounterRng(RngState state, std::uint64_t substream) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n), n >= 1 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t substream_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint32_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

}  // namespace cogrowth
