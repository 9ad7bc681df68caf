#include "carest/rng.hpp"

#include <gtest/gtest.h>

#include <set>

using carest::Philox4x32;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  EXPECT_EQ(Philox4x32::bijection(C{0, 0, 0, 0}, K{0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::bijection(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::bijection(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, FirstBlockMatchesBijection) {
  Philox4x32 g(0, 0);
  const auto block = Philox4x32::bijection({0, 0, 0, 0}, {0, 0});
  for (int i = 0; i < 4; ++i) EXPECT_EQ(g(), block[i]);
}

TEST(Philox, DeterministicAndStreamsDiffer) {
  Philox4x32 a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  bool differ_stream = false, differ_seed = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differ_stream = differ_stream || x != c();
    differ_seed = differ_seed || x != d();
  }
  EXPECT_TRUE(differ_stream);
  EXPECT_TRUE(differ_seed);
}

TEST(Philox, Discard) {
  Philox4x32 a(7), b(7);
  for (int i = 0; i < 13; ++i) a();
  b.discard(13);
  EXPECT_EQ(a(), b());
}

TEST(DeriveSeed, PureAndDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(carest::derive_seed(5, r));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(carest::derive_seed(5, 17), carest::derive_seed(5, 17));
  EXPECT_NE(carest::derive_seed(5, 17), carest::derive_seed(6, 17));
}
