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


#include "duofuzz/executor.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "duofuzz/subprocess.h"
#include "test_util.h"

namespace duofuzz {
namespace {

namespace fs = std::filesystem;
using ::duofuzz::testing::DataDir;
using ::duofuzz::testing::TempDir;

LibrarySpec Kv() {
  return LoadLibrarySpecFile((DataDir() / "kv" / "kv.json").string());
}

DriverSource Toy(const std::string& id, std::vector<std::string> group,
                 const std::string& text) {
  DriverSource d;
  d.id = id;
  d.group = ApiGroup(std::move(group));
  d.language = DriverLanguage::kToy;
  d.text = text;
  return d;
}

TEST(ToyToolchainTest, AcceptsKnownCalls) {
  ToyToolchain tc(Kv());
  auto r = tc.Compile(Toy("d1", {"kv_open", "kv_close"},
                          "call kv_open $input\ncall kv_close\n"));
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.binary, "toy:d1");
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(ToyToolchainTest, ReportsSyntaxErrors) {
  ToyToolchain tc(Kv());
  auto r = tc.Compile(Toy("d2", {"kv_open"}, "call kv_open $input)\n"));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.diagnostics,
            "d2.toy:1:14: error: expected expression\n"
            "d2.toy:1:14: note: invalid argument '$input)'\n");
  EXPECT_EQ(ClassifyFailure(r.diagnostics), FailureCategory::kCorruptedCode);
}

TEST(ToyToolchainTest, ReportsUndeclaredCalls) {
  ToyToolchain tc(Kv());
  auto r = tc.Compile(
      Toy("d3", {"kv_open"}, "call kv_open\ncall kv_open_ex $input\n"));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.diagnostics,
            "d3.toy:2:6: error: use of undeclared identifier 'kv_open_ex'\n");
  EXPECT_EQ(ClassifyFailure(r.diagnostics),
            FailureCategory::kNonexistingIdentifier);
}

TEST(ToyToolchainTest, BlankSourceIsAnError) {
  ToyToolchain tc(Kv());
  auto r = tc.Compile(Toy("d4", {"kv_open"}, " \n\n"));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(ClassifyFailure(r.diagnostics), FailureCategory::kCorruptedCode);
}

TEST(CommandToolchainTest, RunsCommandAndCapturesDiagnostics) {
  TempDir dir;
  ToolchainConfig config;
  config.work_root = dir.path();
  config.sanitizer_flags = "";
  config.compile_command = "cp {src} {out}";
  CommandToolchain tc(config);
  DriverSource d = Toy("c1", {"kv_open"}, "int x;\n");
  d.language = DriverLanguage::kC;
  auto ok = tc.Compile(d);
  ASSERT_TRUE(ok.ok) << ok.diagnostics;
  EXPECT_TRUE(fs::exists(ok.binary));
  EXPECT_TRUE(fs::exists(dir.path() / "c1" / "driver.c"));

  config.compile_command =
      "echo \"{src}:1:1: error: unknown type name 'Foo'\" >&2; exit 1";
  CommandToolchain failing(config);
  auto bad = failing.Compile(d);
  EXPECT_FALSE(bad.ok);
  EXPECT_NE(bad.diagnostics.find("unknown type name 'Foo'"),
            std::string::npos);
}

TEST(CommandToolchainTest, MissingCompilerIsEnvironmentError) {
  TempDir dir;
  ToolchainConfig config;
  config.work_root = dir.path();
  config.compile_command = "duofuzz-no-such-compiler {src} -o {out}";
  CommandToolchain tc(config);
  DriverSource d = Toy("c2", {"kv_open"}, "int x;\n");
  d.language = DriverLanguage::kC;
  EXPECT_THROW(tc.Compile(d), EnvironmentError);
}

TEST(CommandToolchainTest, TimeoutIsADiagnostic) {
  TempDir dir;
  ToolchainConfig config;
  config.work_root = dir.path();
  config.compile_command = "sleep 5";
  config.sanitizer_flags = "";
  config.timeout_seconds = 0.2;
  CommandToolchain tc(config);
  DriverSource d = Toy("c3", {"kv_open"}, "int x;\n");
  auto r = tc.Compile(d);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.diagnostics.find("timed out"), std::string::npos);
}

TEST(SimConfigTest, JsonRoundTripAndValidation) {
  SimConfig c;
  c.library_seed = 99;
  c.crash_probability = 0.5;
  const SimConfig back = SimConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());
  EXPECT_THROW(SimConfig::FromJson({{"discovery_rate_min", 0.0}}),
               std::invalid_argument);
  EXPECT_THROW(SimConfig::FromJson({{"regions_per_api_min", 50},
                                    {"regions_per_api_max", 10}}),
               std::invalid_argument);
  EXPECT_THROW(SimConfig::FromJson({{"crash_tick_min", 1}}),
               std::invalid_argument);
}

TEST(SimulatedAdapterTest, RateOneCoversAllReachable) {
  const auto spec = Kv();
  SimulatedAdapter sim(spec, SimConfig{}, 1);
  const auto d = Toy("s1", {"kv_open", "kv_close"},
                     "call kv_open\ncall kv_close\n");
  SimTargetModel model = sim.ModelFor(d);
  model.discovery_rate = 1.0;
  model.crash_tick.reset();
  sim.SetModel("s1", model);
  CoverageMap prior(sim.total_regions());
  SliceRequest req{d, "toy:s1", prior, 0, 1.0};
  const auto r = sim.RunSlice(req);
  EXPECT_EQ(r.new_regions,
            std::set<std::string>(model.reachable.begin(),
                                  model.reachable.end()));
  EXPECT_FALSE(r.crashed);
  EXPECT_EQ(r.exec_seconds, 1.0);
}

TEST(SimulatedAdapterTest, ModelCoversCalledBlocks) {
  const auto spec = Kv();
  SimulatedAdapter sim(spec, SimConfig{}, 1);
  const auto one = sim.ModelFor(Toy("a", {"kv_version"}, "call kv_version\n"));
  const auto both = sim.ModelFor(Toy(
      "b", {"kv_version", "kv_open"}, "call kv_version\ncall kv_open\n"));
  EXPECT_GE(one.reachable.size(), 5u);
  EXPECT_LE(one.reachable.size(), 40u);
  EXPECT_GT(both.reachable.size(), one.reachable.size());
  for (const auto& r : one.reachable) {
    EXPECT_TRUE(std::binary_search(both.reachable.begin(),
                                   both.reachable.end(), r));
  }
  // Unknown callees contribute nothing.
  const auto with_bogus = sim.ModelFor(
      Toy("c", {"kv_version"}, "call kv_version\ncall kv_bogus\n"));
  EXPECT_EQ(with_bogus.reachable, one.reachable);
  EXPECT_GT(*sim.total_regions(), 0u);
}

TEST(SimulatedAdapterTest, IrrationalDriverCrashesOnFirstTick) {
  const auto spec = Kv();  // imply(kv_open, kv_close)
  SimulatedAdapter sim(spec, SimConfig{}, 3);
  const auto d = Toy("s2", {"kv_open"}, "call kv_open $input\n");
  EXPECT_EQ(sim.ModelFor(d).crash_tick, 1u);
  CoverageMap prior(sim.total_regions());
  const auto r = sim.RunSlice(SliceRequest{d, "toy:s2", prior, 0, 1.0});
  EXPECT_TRUE(r.crashed);
  ASSERT_TRUE(r.crash_info.has_value());
  ASSERT_TRUE(r.crash_input.has_value());
}

TEST(SimulatedAdapterTest, CrashTickHonored) {
  const auto spec = Kv();
  SimulatedAdapter sim(spec, SimConfig{}, 3);
  const auto d = Toy("s3", {"kv_version"}, "call kv_version\n");
  sim.SetModel("s3", SimTargetModel{{"r0", "r1"}, 0.5, 3});
  CoverageMap prior(sim.total_regions());
  EXPECT_FALSE(sim.RunSlice(SliceRequest{d, "", prior, 0, 1.0}).crashed);
  EXPECT_FALSE(sim.RunSlice(SliceRequest{d, "", prior, 1, 1.0}).crashed);
  EXPECT_TRUE(sim.RunSlice(SliceRequest{d, "", prior, 2, 1.0}).crashed);
}

TEST(SimulatedAdapterTest, DeterministicAndConverges) {
  const auto spec = Kv();
  const auto d = Toy("s4", {"kv_open", "kv_put", "kv_close"},
                     "call kv_open\ncall kv_put\ncall kv_close\n");
  SimConfig config;
  config.crash_probability = 0.0;
  SimulatedAdapter a(spec, config, 11);
  SimulatedAdapter b(spec, config, 11);
  const auto model = a.ModelFor(d);
  CoverageMap cov_a(a.total_regions());
  CoverageMap cov_b(b.total_regions());
  for (uint64_t tick = 0; tick < 60; ++tick) {
    auto ra = a.RunSlice(SliceRequest{d, "", cov_a, tick, 1.0});
    auto rb = b.RunSlice(SliceRequest{d, "", cov_b, tick, 1.0});
    ASSERT_EQ(ra.new_regions, rb.new_regions);
    for (const auto& r : ra.new_regions) {
      EXPECT_FALSE(cov_a.Contains(r));
      cov_a.Insert(r);
      cov_b.Insert(r);
    }
  }
  // With rate >= 0.2, 60 ticks leave a region undiscovered with
  // probability below 0.8^60.
  EXPECT_EQ(cov_a.size(), model.reachable.size());

  SimulatedAdapter other(spec, config, 12);
  CoverageMap fresh(other.total_regions());
  EXPECT_EQ(other.ModelFor(d).reachable, model.reachable);
}

TEST(ReadRegionLinesTest, Parses) {
  auto r = ReadRegionLines("a.c:1\n\nb.c:fn:3\r\n");
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(*r, (std::set<std::string>{"a.c:1", "b.c:fn:3"}));
  EXPECT_TRUE(ReadRegionLines("")->empty());
  EXPECT_FALSE(ReadRegionLines("garbage\n").has_value());
  EXPECT_FALSE(ReadRegionLines("a.c:\n").has_value());
}

TEST(DirectorySizeTest, SumsFiles) {
  TempDir dir;
  fs::create_directories(dir.path() / "sub");
  std::ofstream(dir.path() / "a") << std::string(100, 'a');
  std::ofstream(dir.path() / "sub" / "b") << std::string(28, 'b');
  EXPECT_EQ(DirectorySize(dir.path()), 128u);
  EXPECT_EQ(DirectorySize(dir.path() / "missing"), 0u);
}

class ExternalFuzzerTest : public ::testing::Test {
 protected:
  fs::path Script(const std::string& name, const std::string& body) {
    const fs::path p = dir_.path() / name;
    std::ofstream(p) << "#!/bin/sh\n" << body;
    fs::permissions(p, fs::perms::owner_all);
    return p;
  }
  FuzzerConfig Config() {
    FuzzerConfig c;
    c.work_root = dir_.path() / "work";
    return c;
  }
  DriverSource driver_ = Toy("x1", {"kv_open"}, "");
  CoverageMap prior_;
  TempDir dir_;
};

TEST_F(ExternalFuzzerTest, CleanSliceWithCoverage) {
  auto config = Config();
  const auto bin = Script("fuzz", "exit 0\n");
  config.coverage_command = "printf 'a.c:1\\na.c:2\\n'";
  config.total_regions = 10;
  ExternalFuzzerAdapter adapter(config);
  auto r = adapter.RunSlice(SliceRequest{driver_, bin.string(), prior_, 0, 1});
  EXPECT_FALSE(r.failed);
  EXPECT_FALSE(r.crashed);
  EXPECT_EQ(r.new_regions, (std::set<std::string>{"a.c:1", "a.c:2"}));
  EXPECT_GT(r.exec_seconds, 0.0);
  EXPECT_EQ(adapter.total_regions(), 10u);
  EXPECT_TRUE(fs::is_directory(config.work_root / "x1" / "corpus"));
}

TEST_F(ExternalFuzzerTest, CrashPicksArtifact) {
  auto config = Config();
  const auto bin = Script(
      "fuzz", "printf 'boom' > crash-abc\necho 'ERROR: AddressSanitizer' >&2\n"
              "exit 77\n");
  ExternalFuzzerAdapter adapter(config);
  auto r = adapter.RunSlice(SliceRequest{driver_, bin.string(), prior_, 0, 1});
  EXPECT_TRUE(r.crashed);
  EXPECT_FALSE(r.failed);
  ASSERT_TRUE(r.crash_info.has_value());
  EXPECT_NE(r.crash_info->find("exit code 77"), std::string::npos);
  EXPECT_NE(r.crash_info->find("AddressSanitizer"), std::string::npos);
  ASSERT_TRUE(r.crash_input.has_value());
  EXPECT_EQ(fs::path(*r.crash_input).filename(), "crash-abc");
}

TEST_F(ExternalFuzzerTest, QuotaExceededIsOutOfSpace) {
  auto config = Config();
  config.quota_bytes = 1000;
  const auto bin = Script(
      "fuzz", "head -c 5000 /dev/zero > corpus/big\nexit 0\n");
  ExternalFuzzerAdapter adapter(config);
  auto r = adapter.RunSlice(SliceRequest{driver_, bin.string(), prior_, 0, 1});
  EXPECT_TRUE(r.failed);
  EXPECT_EQ(r.failure, FailureCategory::kOutOfSpace);
  EXPECT_EQ(ClassifyFailure(r.failure_detail), FailureCategory::kOutOfSpace);
}

TEST_F(ExternalFuzzerTest, UnparsableCoverageFailsSlice) {
  auto config = Config();
  const auto bin = Script("fuzz", "exit 0\n");
  config.coverage_command = "echo not-a-region";
  ExternalFuzzerAdapter adapter(config);
  auto r = adapter.RunSlice(SliceRequest{driver_, bin.string(), prior_, 0, 1});
  EXPECT_TRUE(r.failed);
  EXPECT_TRUE(r.new_regions.empty());
}

TEST_F(ExternalFuzzerTest, MissingFuzzerIsEnvironmentError) {
  ExternalFuzzerAdapter adapter(Config());
  EXPECT_THROW(adapter.RunSlice(SliceRequest{
                   driver_, (dir_.path() / "nope").string(), prior_, 0, 1}),
               EnvironmentError);
}

TEST(RealToolchainTest, LibFuzzerDriverCompilesAndRuns) {
  if (!RunShell("command -v clang").ok()) GTEST_SKIP() << "clang not found";
  TempDir dir;
  ToolchainConfig tc_config;
  tc_config.work_root = dir.path();
  tc_config.sanitizer_flags = "";
  DriverSource d;
  d.id = "real1";
  d.group = ApiGroup({"LLVMFuzzerTestOneInput"});
  d.language = DriverLanguage::kC;
  d.text =
      "#include <stddef.h>\n#include <stdint.h>\n"
      "int LLVMFuzzerTestOneInput(const uint8_t *data, size_t size) {\n"
      "  if (size > 3 && data[0] == 'F' && data[1] == 'U' && data[2] == 'Z' "
      "&& data[3] == 'Z') __builtin_trap();\n"
      "  return 0;\n}\n";
  CommandToolchain tc(tc_config);
  auto compiled = tc.Compile(d);
  if (!compiled.ok &&
      compiled.diagnostics.find("fuzzer") != std::string::npos) {
    GTEST_SKIP() << "libFuzzer runtime unavailable";
  }
  ASSERT_TRUE(compiled.ok) << compiled.diagnostics;

  FuzzerConfig fz;
  fz.work_root = dir.path() / "run";
  fz.run_command = "{bin} {corpus} -runs=2000";
  ExternalFuzzerAdapter adapter(fz);
  CoverageMap prior;
  auto r = adapter.RunSlice(SliceRequest{d, compiled.binary, prior, 0, 5});
  EXPECT_FALSE(r.failed);
}

}  // namespace
}  // namespace duofuzz
