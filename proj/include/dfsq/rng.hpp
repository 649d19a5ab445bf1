#pragma once

#include <array>
#include <cstdint>

namespace dfsq {

/// Philox4x32-10 block function (Salmon et al., counter-based).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// splitmix64 finalizer; used to derive independent seeds from a base seed.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for replicate `index` of a study started from `base_seed`.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

/**
 * A random stream addressed by (seed, stream id).
 *
 * Draw i of stream s is a pure function of (seed, s, i), so streams can be
 * consumed from any thread in any order with identical results.
 */
class Substream {
 public:
  Substream(std::uint64_t seed, std::uint64_t stream_id);

  /// Stream id of a single (point, shot) pair.
  static std::uint64_t id(std::uint32_t point, std::uint32_t shot) {
    return (static_cast<std::uint64_t>(point) << 32) | shot;
  }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_id_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;  // number of unread u64 values left in buffer_
};

}  // namespace dfsq
