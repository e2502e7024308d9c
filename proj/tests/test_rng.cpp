#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "varagg/rng.hpp"

using varagg::CounterRng;

// Known-answer vectors of the Random123 reference implementation.
TEST(Rng, PhiloxKnownAnswers) {
  EXPECT_EQ(CounterRng::philox({0, 0, 0, 0}, {0, 0}),
            (CounterRng::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(CounterRng::philox({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               {0xffffffffu, 0xffffffffu}),
            (CounterRng::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(CounterRng::philox({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                               {0xa4093822u, 0x299f31d0u}),
            (CounterRng::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Rng, UniformOpenInterval) {
  const CounterRng rng(42);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(i, 0);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
}

TEST(Rng, StreamsAndSlotsDiffer) {
  const CounterRng a(7, 0);
  const CounterRng b(7, 1);
  EXPECT_NE(a.uniform(0, 0), b.uniform(0, 0));
  EXPECT_NE(a.uniform(0, 0), a.uniform(0, 1));
  EXPECT_NE(a.uniform(0, 0), a.uniform(1, 0));
  EXPECT_NE(CounterRng(7).uniform(0, 0), CounterRng(8).uniform(0, 0));
}

TEST(Rng, PureFunctionOfCounter) {
  const CounterRng rng(123456789);
  std::vector<double> serial;
  for (int i = 0; i < 1000; ++i) serial.push_back(rng.uniform(i, 3));
  std::vector<double> split;
  for (int w = 0; w < 4; ++w) {
    const CounterRng worker(123456789);
    for (int i = w * 250; i < (w + 1) * 250; ++i) split.push_back(worker.uniform(i, 3));
  }
  EXPECT_EQ(serial, split);
}

TEST(Rng, PairsLookIndependent) {
  const CounterRng rng(99);
  const int n = 200000;
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) sxy += (rng.uniform(i, 0) - 0.5) * (rng.uniform(i, 1) - 0.5);
  EXPECT_NEAR(sxy / n, 0.0, 5.0 / 12.0 / std::sqrt(n));
}
