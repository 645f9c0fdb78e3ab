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


#include "duofuzz/driver_scheduler.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace duofuzz {
namespace {

DriverRecord Record(const std::string& id, uint64_t sequence,
                    size_t regions, double seconds, int energy = 10) {
  DriverRecord r;
  r.driver.id = id;
  r.sequence = sequence;
  r.energy = energy;
  for (size_t i = 0; i < regions; ++i) {
    r.coverage.Insert(id + ":" + std::to_string(i));
  }
  r.exec_seconds = seconds;
  r.slices = seconds > 0 ? 1 : 0;
  return r;
}

SliceReport Report(const std::string& id, std::set<std::string> regions,
                   double seconds = 1.0) {
  SliceReport r;
  r.driver_id = id;
  r.new_regions = std::move(regions);
  r.exec_seconds = seconds;
  return r;
}

TEST(ScoreDriverTest, Examples) {
  auto s = ScoreDriver(Record("a", 0, 120, 60.0, 10));
  EXPECT_EQ(s.priority, PriorityClass::kScored);
  EXPECT_NEAR(s.value, 2.0, 1e-12);
  EXPECT_NEAR(ScoreDriver(Record("a", 0, 120, 60.0, 0)).value, 0.2, 1e-12);
  EXPECT_NEAR(ScoreDriver(Record("a", 0, 120, 60.0, 1)).value, 0.2, 1e-12);
  EXPECT_NEAR(ScoreDriver(Record("a", 0, 120, 60.0, 5)).value, 1.0, 1e-12);
  EXPECT_NEAR(ScoreDriver(Record("a", 0, 0, 60.0, 10)).value, 0.0, 1e-12);
  EXPECT_EQ(ScoreDriver(Record("a", 0, 0, 0.0)).priority,
            PriorityClass::kFresh);
}

TEST(RouletteSelectTest, FreshFirstInCreationOrder) {
  std::vector<DriverRecord> pool = {
      Record("old", 0, 500, 1.0), Record("b", 2, 0, 0.0),
      Record("a", 1, 0, 0.0), Record("c", 3, 0, 0.0)};
  Rng rng(1);
  EXPECT_EQ(RouletteSelect(pool, 2, rng),
            (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(RouletteSelect(pool, 4, rng),
            (std::vector<std::string>{"a", "b", "c", "old"}));
}

TEST(RouletteSelectTest, ProportionalToScore) {
  std::vector<DriverRecord> pool = {Record("hi", 0, 30, 10.0),
                                    Record("lo", 1, 10, 10.0)};
  Rng rng(42);
  const int n = 100000;
  int hi = 0;
  for (int i = 0; i < n; ++i) {
    hi += RouletteSelect(pool, 1, rng)[0] == "hi";
  }
  const double p = static_cast<double>(hi) / n;
  const double sigma = std::sqrt(0.75 * 0.25 / n);
  EXPECT_NEAR(p, 0.75, 3 * sigma);
}

TEST(RouletteSelectTest, WithoutReplacementAndSkipsRetired) {
  std::vector<DriverRecord> pool = {Record("a", 0, 5, 1.0),
                                    Record("b", 1, 5, 1.0),
                                    Record("dead", 2, 900, 1.0),
                                    Record("busy", 3, 900, 1.0)};
  pool[2].state = DriverState::kRetiredBug;
  pool[3].state = DriverState::kRunning;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    auto chosen = RouletteSelect(pool, 5, rng);
    ASSERT_EQ(chosen.size(), 2u);
    EXPECT_NE(chosen[0], chosen[1]);
  }
}

TEST(RouletteSelectTest, AllZeroWeightsIsUniform) {
  std::vector<DriverRecord> pool = {Record("a", 0, 0, 5.0),
                                    Record("b", 1, 0, 5.0)};
  Rng rng(9);
  int a = 0;
  for (int i = 0; i < 4000; ++i) a += RouletteSelect(pool, 1, rng)[0] == "a";
  EXPECT_NEAR(a / 4000.0, 0.5, 0.05);
}

TEST(ApplySliceResultTest, EnergyArithmetic) {
  EnergyPolicy policy;
  CoverageMap global;
  DriverRecord r = Record("d", 0, 0, 0.0);
  r.state = DriverState::kRunning;

  // New regions: -1 then +2, capped at E0.
  auto e = ApplySliceResult(r, Report("d", {"x", "y"}), global, policy);
  EXPECT_EQ(r.energy, 10);
  EXPECT_EQ(e.new_for_driver, 2u);
  EXPECT_EQ(e.new_globally, 2u);
  EXPECT_EQ(r.state, DriverState::kIdle);
  EXPECT_EQ(r.slices, 1u);

  // Nothing new: -1.
  for (int k = 0; k < 3; ++k) {
    r.state = DriverState::kRunning;
    ApplySliceResult(r, Report("d", {"x"}), global, policy);
  }
  EXPECT_EQ(r.energy, 7);
  EXPECT_DOUBLE_EQ(r.exec_seconds, 4.0);

  // New for the driver but already global still refunds.
  global.Insert("z");
  r.state = DriverState::kRunning;
  e = ApplySliceResult(r, Report("d", {"z"}), global, policy);
  EXPECT_EQ(r.energy, 8);
  EXPECT_EQ(e.new_for_driver, 1u);
  EXPECT_EQ(e.new_globally, 0u);

  // Floor at zero.
  for (int k = 0; k < 20; ++k) {
    r.state = DriverState::kRunning;
    ApplySliceResult(r, Report("d", {}), global, policy);
  }
  EXPECT_EQ(r.energy, 0);
}

TEST(ApplySliceResultTest, CrashRetiresAndKeepsCoverage) {
  CoverageMap global;
  DriverRecord r = Record("d", 0, 0, 0.0);
  r.state = DriverState::kRunning;
  SliceReport rep = Report("d", {"a"});
  rep.crashed = true;
  rep.crash_info = "boom";
  auto e = ApplySliceResult(r, rep, global);
  EXPECT_TRUE(e.retired);
  EXPECT_EQ(r.state, DriverState::kRetiredBug);
  EXPECT_TRUE(global.Contains("a"));
}

TEST(ApplySliceResultTest, FailedSlicesCreditNothing) {
  CoverageMap global;
  DriverRecord r = Record("d", 0, 0, 0.0);
  r.state = DriverState::kRunning;
  SliceReport rep = Report("d", {"a"});
  rep.failed = true;
  auto e = ApplySliceResult(r, rep, global);
  EXPECT_FALSE(e.retired);
  EXPECT_EQ(r.state, DriverState::kIdle);
  EXPECT_TRUE(global.empty());
  EXPECT_EQ(r.energy, 9);

  r.state = DriverState::kRunning;
  rep.failure = FailureCategory::kOutOfSpace;
  e = ApplySliceResult(r, rep, global);
  EXPECT_TRUE(e.retired);
  EXPECT_EQ(r.state, DriverState::kRetiredExhausted);
}

TEST(ApplySliceResultTest, RejectsMisuse) {
  CoverageMap global;
  DriverRecord r = Record("d", 0, 0, 0.0);
  EXPECT_THROW(ApplySliceResult(r, Report("d", {}), global), std::logic_error);
  r.state = DriverState::kRunning;
  EXPECT_THROW(ApplySliceResult(r, Report("e", {}), global), std::logic_error);
}

TEST(StillbornRateTest, Values) {
  EXPECT_NEAR(StillbornRate(27, 100), 0.73, 1e-9);
  EXPECT_EQ(StillbornRate(5, 5), 0.0);
  EXPECT_EQ(StillbornRate(0, 5), 1.0);
  EXPECT_THROW(StillbornRate(0, 0), UndefinedMetricError);
  EXPECT_THROW(StillbornRate(6, 5), std::invalid_argument);
}

TEST(DriverStateTest, NamesRoundTrip) {
  for (auto s : {DriverState::kIdle, DriverState::kRunning,
                 DriverState::kRetiredBug, DriverState::kRetiredExhausted}) {
    EXPECT_EQ(ParseDriverState(DriverStateName(s)), s);
  }
  EXPECT_THROW(ParseDriverState("zombie"), std::invalid_argument);
}

DriverSource Source(const std::string& id) {
  DriverSource d;
  d.id = id;
  d.group = ApiGroup({"f"});
  d.text = "call f\n";
  return d;
}

TEST(DriverPoolTest, AddSelectApply) {
  DriverPool pool;
  pool.Add(Source("a"), "bin-a", 100);
  pool.Add(Source("b"), "bin-b", 100);
  EXPECT_THROW(pool.Add(Source("a"), "", 100), std::invalid_argument);
  EXPECT_EQ(pool.Find("b")->sequence, 1u);
  EXPECT_EQ(pool.Find("a")->energy, 10);

  Rng rng(1);
  auto chosen = pool.Select(4, rng);
  EXPECT_EQ(chosen, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(pool.Find("a")->state, DriverState::kRunning);
  EXPECT_TRUE(pool.Select(1, rng).empty());

  CoverageMap global(100);
  pool.Apply(Report("a", {"r1"}), global);
  SliceReport crash = Report("b", {});
  crash.crashed = true;
  pool.Apply(crash, global);
  EXPECT_EQ(pool.ActiveCount(), 1u);
  EXPECT_EQ(pool.Select(4, rng), (std::vector<std::string>{"a"}));
  pool.Abort("a");
  EXPECT_EQ(pool.Find("a")->state, DriverState::kIdle);
  EXPECT_THROW(pool.Apply(Report("zzz", {}), global), std::logic_error);
}

TEST(DriverPoolTest, RoundRobinCycles) {
  DriverPool pool({}, DriverSelection::kRoundRobin);
  for (const char* id : {"a", "b", "c"}) pool.Add(Source(id), "", 10);
  Rng rng(1);
  CoverageMap global(10);
  std::vector<std::string> order;
  for (int round = 0; round < 4; ++round) {
    auto chosen = pool.Select(2, rng);
    for (const auto& id : chosen) {
      order.push_back(id);
      pool.Apply(Report(id, {}), global);
    }
  }
  EXPECT_EQ(order, (std::vector<std::string>{"a", "b", "c", "a", "b", "c",
                                             "a", "b"}));
}

TEST(DriverPoolTest, JsonRoundTrip) {
  DriverPool pool({}, DriverSelection::kRoundRobin);
  pool.Add(Source("a"), "bin", 50);
  pool.Add(Source("b"), "bin", 50);
  Rng rng(1);
  pool.Select(1, rng);
  CoverageMap global(50);
  pool.Apply(Report("a", {"q"}, 2.5), global);
  pool.Find("a")->crash_artifact = "artifacts/a/crash.txt";

  const auto back =
      DriverPool::FromJson(pool.ToJson(), {}, DriverSelection::kRoundRobin);
  ASSERT_EQ(back.records().size(), 2u);
  EXPECT_EQ(back.records()[0], pool.records()[0]);
  EXPECT_EQ(back.records()[1], pool.records()[1]);
  EXPECT_EQ(back.ToJson(), pool.ToJson());
}

}  // namespace
}  // namespace duofuzz
