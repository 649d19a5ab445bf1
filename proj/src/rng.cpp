#include "dfsq/rng.hpp"

#include <cmath>

namespace dfsq {

namespace {
constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;
constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}
}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeylA;
      key[1] += kWeylB;
    }
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMulA, ctr[0], lo0, hi0);
    mulhilo(kMulB, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
  return splitmix64(base_seed ^ splitmix64(index));
}

Substream::Substream(std::uint64_t seed, std::uint64_t stream_id)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_id_(stream_id) {}

void Substream::refill() {
  buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_index_),
                           static_cast<std::uint32_t>(block_index_ >> 32),
                           static_cast<std::uint32_t>(stream_id_),
                           static_cast<std::uint32_t>(stream_id_ >> 32)},
                          key_);
  ++block_index_;
  buffered_ = 2;
}

std::uint64_t Substream::next_u64() {
  if (buffered_ == 0) refill();
  const int base = 2 * (2 - buffered_);
  --buffered_;
  return static_cast<std::uint64_t>(buffer_[base]) |
         (static_cast<std::uint64_t>(buffer_[base + 1]) << 32);
}

double Substream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Substream::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace dfsq
