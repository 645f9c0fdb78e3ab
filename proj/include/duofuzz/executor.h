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

// Compiling drivers and running them for one time slice.
//
// Two execution adapters share one interface: ExternalFuzzerAdapter drives a
// coverage-guided fuzzer binary through configurable shell commands, and
// SimulatedAdapter is a deterministic stand-in used for tests and scheduler
// experiments.
#ifndef DUOFUZZ_EXECUTOR_H_
#define DUOFUZZ_EXECUTOR_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "duofuzz/api_model.h"
#include "duofuzz/constraint_engine.h"
#include "duofuzz/coverage.h"
#include "duofuzz/driver.h"
#include "duofuzz/failure_classifier.h"
#include "json.hpp"

namespace duofuzz {

// Something outside the driver is broken: a missing compiler or fuzzer
// binary, an unwritable work directory.
class EnvironmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CompileResult {
  bool ok = false;
  std::string binary;       // when ok
  std::string diagnostics;  // compiler output
};

class Toolchain {
 public:
  virtual ~Toolchain() = default;
  // Content problems come back as !ok with diagnostics; environment
  // problems throw EnvironmentError.
  virtual CompileResult Compile(const DriverSource& driver) = 0;
};

struct ToolchainConfig {
  // {src} and {out} are replaced by shell-quoted paths.
  std::string compile_command = "clang -g -fsanitize=fuzzer {src} -o {out}";
  // Appended verbatim.
  std::string sanitizer_flags = "-fsanitize=address,undefined";
  std::filesystem::path work_root = "work";
  double timeout_seconds = 300;
};

class CommandToolchain : public Toolchain {
 public:
  explicit CommandToolchain(ToolchainConfig config)
      : config_(std::move(config)) {}
  CompileResult Compile(const DriverSource& driver) override;

 private:
  ToolchainConfig config_;
};

// "Compiles" toy scripts: syntax check plus name resolution against spec,
// with clang-style diagnostics.
class ToyToolchain : public Toolchain {
 public:
  explicit ToyToolchain(const LibrarySpec& spec);
  CompileResult Compile(const DriverSource& driver) override;

 private:
  std::set<std::string> names_;
};

struct SliceReport {
  std::string driver_id;
  // Regions covered by the driver as of the end of the slice; may include
  // regions it had already covered.
  std::set<std::string> new_regions;
  double exec_seconds = 0.0;
  bool crashed = false;
  std::optional<std::string> crash_info;   // present iff crashed
  std::optional<std::string> crash_input;  // bytes or a path, when known
  // The slice was aborted and no coverage is credited.
  bool failed = false;
  FailureCategory failure = FailureCategory::kUnknown;
  std::string failure_detail;
};

struct SliceRequest {
  const DriverSource& driver;
  std::string binary;
  const CoverageMap& prior_coverage;
  uint64_t slice_index = 0;  // slices this driver has already run
  double seconds = 1.0;
};

class ExecutorAdapter {
 public:
  virtual ~ExecutorAdapter() = default;
  // Safe to call concurrently for distinct drivers.
  virtual SliceReport RunSlice(const SliceRequest& request) = 0;
  virtual std::optional<uint64_t> total_regions() const = 0;
};

// Per-driver behavior of the simulated target.
struct SimTargetModel {
  std::vector<std::string> reachable;  // sorted region ids
  double discovery_rate = 1.0;         // in (0, 1]
  std::optional<uint64_t> crash_tick;  // 1-based slice that crashes
};

struct SimConfig {
  uint64_t library_seed = 1;
  uint32_t regions_per_api_min = 5;
  uint32_t regions_per_api_max = 40;
  // Regions reachable only when two linked APIs are called together.
  uint32_t regions_per_pair_min = 0;
  uint32_t regions_per_pair_max = 8;
  double discovery_rate_min = 0.2;
  double discovery_rate_max = 0.6;
  // Chance that a rational driver hits a bug at some later tick.
  double crash_probability = 0.05;
  uint64_t crash_tick_min = 5;
  uint64_t crash_tick_max = 100;

  nlohmann::json ToJson() const;
  static SimConfig FromJson(const nlohmann::json& j);
};

// Region layout: each API owns a block of regions, each pair of APIs linked
// by a type dependency owns a smaller block. A driver reaches the blocks of
// the APIs it calls and of every linked pair among them. Drivers whose call
// set breaks an implicit constraint of the spec crash on their first tick;
// the others crash at a seeded later tick with crash_probability. New
// regions are drawn per slice as independent Bernoulli(discovery_rate)
// trials over the reachable regions the driver has not covered yet, from a
// stream seeded by (campaign seed, driver id, slice index).
class SimulatedAdapter : public ExecutorAdapter {
 public:
  SimulatedAdapter(const LibrarySpec& spec, SimConfig config,
                   uint64_t campaign_seed);

  SliceReport RunSlice(const SliceRequest& request) override;
  std::optional<uint64_t> total_regions() const override { return total_; }

  SimTargetModel ModelFor(const DriverSource& driver) const;
  // Test hook: pins the model of one driver id.
  void SetModel(const std::string& driver_id, SimTargetModel model);

 private:
  LibrarySpec spec_;
  SimConfig config_;
  uint64_t campaign_seed_;
  DependencyIndex index_;
  std::map<std::string, std::pair<uint64_t, uint64_t>> api_blocks_;
  std::map<std::pair<std::string, std::string>,
           std::pair<uint64_t, uint64_t>>
      pair_blocks_;
  uint64_t total_ = 0;
  mutable std::mutex mu_;
  std::map<std::string, SimTargetModel> pinned_;
};

// Parses a coverage export; nullopt when any line is malformed.
using CoverageReader =
    std::function<std::optional<std::set<std::string>>(std::string_view)>;

// Default reader: one "<file>:<region-id>" per covered region; blank lines
// ignored.
std::optional<std::set<std::string>> ReadRegionLines(std::string_view text);

struct FuzzerConfig {
  // Placeholders: {bin} {corpus} {seconds}.
  std::string run_command = "{bin} {corpus} -max_total_time={seconds}";
  // Placeholders: {bin} {corpus}. Output goes to the coverage reader.
  std::string coverage_command;
  std::filesystem::path work_root = "work";
  uint64_t quota_bytes = uint64_t{1} << 30;
  std::optional<uint64_t> total_regions;
};

// Runs the fuzzer in work_root/<driver-id>/ with a persistent corpus
// directory, so stopping after a slice and starting again resumes from the
// same corpus.
class ExternalFuzzerAdapter : public ExecutorAdapter {
 public:
  explicit ExternalFuzzerAdapter(FuzzerConfig config,
                                 CoverageReader reader = ReadRegionLines);

  SliceReport RunSlice(const SliceRequest& request) override;
  std::optional<uint64_t> total_regions() const override {
    return config_.total_regions;
  }

 private:
  FuzzerConfig config_;
  CoverageReader reader_;
};

uint64_t DirectorySize(const std::filesystem::path& dir);

}  // namespace duofuzz

#endif  // DUOFUZZ_EXECUTOR_H_
