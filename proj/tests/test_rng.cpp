#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "dfsq/rng.hpp"

using namespace dfsq;

using Block = std::array<std::uint32_t, 4>;

TEST_CASE("philox4x32-10 known-answer vectors") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                      {0xffffffff, 0xffffffff}) ==
        Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                      {0xa4093822, 0x299f31d0}) ==
        Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("substreams are pure functions of (seed, stream)") {
  Substream a(42, Substream::id(3, 7));
  Substream b(42, Substream::id(3, 7));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Substream c(42, Substream::id(3, 8));
  Substream d(43, Substream::id(3, 7));
  Substream e(42, Substream::id(3, 7));
  CHECK(c.next_u64() != e.next_u64());
  Substream f(42, Substream::id(3, 7));
  CHECK(d.next_u64() != f.next_u64());
  CHECK(Substream::id(1, 0) != Substream::id(0, 1));
}

TEST_CASE("derived seeds do not collide") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(7, i));
  CHECK(seen.size() == 10000);
  CHECK(derive_seed(7, 0) != derive_seed(8, 0));
}

TEST_CASE("uniform and normal moments") {
  Substream s(2024, 0);
  const int n = 200000;
  double su = 0.0, su2 = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    su2 += u * u;
    const double z = s.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(std::abs(su / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(su2 / n - 1.0 / 3.0) < 0.005);
  CHECK(std::abs(sn / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(sn2 / n - 1.0) < 0.02);
}

TEST_CASE("bernoulli frequency") {
  Substream s(5, 11);
  const int n = 100000;
  int k = 0;
  for (int i = 0; i < n; ++i) k += s.bernoulli(0.3);
  CHECK(std::abs(k / double(n) - 0.3) < 5.0 * std::sqrt(0.21 / n));
  Substream t(5, 12);
  for (int i = 0; i < 100; ++i) {
    CHECK_FALSE(t.bernoulli(0.0));
    CHECK(t.bernoulli(1.0));
  }
}
