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

#include "duofuzz/coverage.h"

#include "gtest/gtest.h"

namespace duofuzz {
namespace {

TEST(CoverageMapTest, UnionOfDisjointSets) {
  const CoverageMap a({"r1"}, 10);
  const CoverageMap b({"r2"}, 10);
  EXPECT_EQ(MergeCoverage(a, b).regions(), (std::set<std::string>{"r1", "r2"}));
}

TEST(CoverageMapTest, MergeLaws) {
  const CoverageMap x({"r1", "r3"}, 10);
  const CoverageMap y({"r2", "r3"}, 10);
  const CoverageMap z({"r4"}, std::nullopt);
  EXPECT_EQ(MergeCoverage(x, x), x);
  EXPECT_EQ(MergeCoverage(x, CoverageMap(10)), x);
  EXPECT_EQ(MergeCoverage(x, y), MergeCoverage(y, x));
  EXPECT_EQ(MergeCoverage(MergeCoverage(x, y), z),
            MergeCoverage(x, MergeCoverage(y, z)));
}

TEST(CoverageMapTest, ConflictingTotalsThrow) {
  CoverageMap a({"r1"}, 10);
  EXPECT_THROW(a.MergeFrom(CoverageMap({"r2"}, 11)), CoverageConflictError);
}

TEST(CoverageMapTest, UnknownTotalTakesKnownOne) {
  CoverageMap a({"r1"}, std::nullopt);
  a.MergeFrom(CoverageMap({"r2"}, 4));
  EXPECT_EQ(a.total_regions(), 4u);
  EXPECT_DOUBLE_EQ(a.Normalized(), 0.5);
}

TEST(CoverageMapTest, InsertReportsNovelty) {
  CoverageMap a(std::nullopt);
  EXPECT_TRUE(a.Insert("x"));
  EXPECT_FALSE(a.Insert("x"));
  EXPECT_EQ(a.Normalized(), 0.0);
}

TEST(CoverageMapTest, JsonRoundTrip) {
  const CoverageMap a({"b", "a"}, 7);
  EXPECT_EQ(CoverageMap::FromJson(a.ToJson()), a);
  const CoverageMap u({"c"}, std::nullopt);
  EXPECT_EQ(CoverageMap::FromJson(u.ToJson()), u);
}

}  // namespace
}  // namespace duofuzz
