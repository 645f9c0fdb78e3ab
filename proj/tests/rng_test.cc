// Copyright 2026 The Duofuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "duofuzz/rng.h"

#include <vector>

#include "gtest/gtest.h"

namespace duofuzz {
namespace {

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngTest, UniformStaysInRange) {
  Rng rng(1);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const uint64_t v = rng.Uniform(7);
    ASSERT_LT(v, 7u);
    ++seen[v];
  }
  for (int count : seen) EXPECT_GT(count, 800);
}

TEST(RngTest, UnitRealInHalfOpenInterval) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.UnitReal();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
}

TEST(RngTest, SaveAndLoadResumesStream) {
  Rng a(9);
  for (int i = 0; i < 17; ++i) a.NextU64();
  Rng b;
  b.LoadState(a.SaveState());
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngTest, LoadRejectsGarbage) {
  Rng rng;
  EXPECT_THROW(rng.LoadState("not a state"), std::invalid_argument);
}

TEST(RngTest, StableHashIsFnv1a) {
  EXPECT_EQ(StableHash(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(StableHash("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(RngTest, MixSeedSeparatesInputs) {
  EXPECT_NE(MixSeed(1, 2), MixSeed(2, 1));
  EXPECT_EQ(MixSeed(5, 6), MixSeed(5, 6));
}

TEST(RngTest, ShuffleIsPermutation) {
  std::vector<int> v = {1, 2, 3, 4, 5, 6, 7, 8};
  Rng rng(11);
  Shuffle(v, rng);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8}));
}

}  // namespace
}  // namespace duofuzz
