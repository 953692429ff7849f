#include <gtest/gtest.h>

#include <cmath>

#include "egonet/random.hpp"

using namespace egonet;

TEST(Random, SplitMixReferenceSequence) {
  // Published SplitMix64 outputs for seed 1234567.
  SplitMix64 r(1234567);
  EXPECT_EQ(r(), 6457827717110365317ULL);
  EXPECT_EQ(r(), 3203168211198807973ULL);
  EXPECT_EQ(r(), 9817491932198370423ULL);
}

TEST(Random, Deterministic) {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Random, UniformRangeAndMoments) {
  SplitMix64 r(7);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  SplitMix64 e(9);
  sum = 0;
  for (int i = 0; i < n; ++i) sum += e.exponential(4.0);
  EXPECT_NEAR(sum / n, 0.25, 0.005);
  SplitMix64 g(11);
  sum = 0;
  for (int i = 0; i < n; ++i) {
    const double z = g.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Random, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 3), derive_seed(5, 3));
}
