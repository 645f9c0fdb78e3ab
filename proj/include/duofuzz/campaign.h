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

// The campaign loop: alternating group rounds (select groups, generate
// drivers) and driver rounds (select drivers, run one slice each), with
// persistence and reporting.
#ifndef DUOFUZZ_CAMPAIGN_H_
#define DUOFUZZ_CAMPAIGN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "duofuzz/api_model.h"
#include "duofuzz/coverage.h"
#include "duofuzz/driver.h"
#include "duofuzz/driver_factory.h"
#include "duofuzz/driver_scheduler.h"
#include "duofuzz/executor.h"
#include "duofuzz/group_scheduler.h"
#include "duofuzz/prompts.h"
#include "duofuzz/rng.h"
#include "duofuzz/text_gen_client.h"
#include "json.hpp"

namespace duofuzz {

inline constexpr int kCampaignStateVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The saved state was written by an incompatible version.
class StateVersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CampaignMode { kSim, kReal };

struct SeedDriver {
  std::string id;
  ApiGroup group;
  DriverLanguage language = DriverLanguage::kToy;
  std::string text;
};

struct Ablation {
  bool no_implicit = false;
  bool random_groups = false;
  bool round_robin_drivers = false;
};

struct CampaignConfig {
  std::filesystem::path spec_path;
  CampaignMode mode = CampaignMode::kSim;
  uint64_t seed = 0;
  uint64_t rounds = 50;                // K
  double wall_clock_seconds = 0.0;     // 0 means no limit
  double query_budget = 5.0;           // currency units per campaign
  int max_retries = 4;
  size_t batch_groups = 4;             // k
  size_t batch_drivers = 4;            // n
  double slice_seconds = 1.0;
  size_t workers = 4;
  size_t window = 2048;
  size_t max_group_len = kDefaultMaxGroupLen;
  uint64_t enumeration_cap = 0;
  bool loose_pointer_match = false;
  DriverLanguage language = DriverLanguage::kToy;
  std::string project;                 // defaults to the library name
  double early_run_seconds = 15.0;
  EnergyPolicy energy;
  Ablation ablation;
  std::optional<std::filesystem::path> prompts_dir;
  std::optional<std::filesystem::path> source_root;
  std::filesystem::path output_dir = "duofuzz-out";
  nlohmann::json client = nlohmann::json::object();
  ToolchainConfig toolchain;
  FuzzerConfig fuzzer;
  SimConfig sim;
  std::vector<SeedDriver> seed_drivers;

  // Relative paths are resolved against base_dir. Throws ConfigError.
  static CampaignConfig FromJson(const nlohmann::json& j,
                                 const std::filesystem::path& base_dir = {});
  static CampaignConfig Load(const std::filesystem::path& path);
  nlohmann::json ToJson() const;
};

struct CampaignCounters {
  uint64_t groups_selected = 0;
  uint64_t queries = 0;
  uint64_t compilable = 0;
  uint64_t early_crashes = 0;
  uint64_t accepted = 0;
  uint64_t client_errors = 0;
  uint64_t slices = 0;
  uint64_t failed_slices = 0;
  std::map<std::string, uint64_t> failures;     // by category tag
  std::map<std::string, uint64_t> generations;  // by result name

  nlohmann::json ToJson() const;
  static CampaignCounters FromJson(const nlohmann::json& j);
};

enum class ReportFormat { kJson, kTable, kCsv };
ReportFormat ParseReportFormat(std::string_view name);

// Builds the report document from a saved state.
nlohmann::json ReportFromState(const nlohmann::json& state);
std::string RenderReport(const nlohmann::json& report, ReportFormat format);
// "slice_index,cumulative_regions" lines with a header.
std::string CoverageCsv(const nlohmann::json& report);

class Campaign {
 public:
  // The client is built from config.client unless one is passed in.
  explicit Campaign(CampaignConfig config,
                    std::unique_ptr<TextGenClient> client = nullptr);
  ~Campaign();

  // Rebuilds a campaign from a saved state. Throws StateVersionError for an
  // unsupported schema version. A config, when given, must carry the same
  // seed; only its round and wall-clock limits are taken over.
  static std::unique_ptr<Campaign> Resume(
      const nlohmann::json& state,
      const std::optional<CampaignConfig>& config = std::nullopt,
      std::unique_ptr<TextGenClient> client = nullptr);
  static std::unique_ptr<Campaign> ResumeFile(
      const std::filesystem::path& state_path,
      const std::optional<CampaignConfig>& config = std::nullopt,
      std::unique_ptr<TextGenClient> client = nullptr);

  // Runs rounds until the round or wall-clock limit, or at most max_rounds
  // more rounds. Persists after every round when persist is set. Returns
  // the number of rounds run.
  uint64_t Run(std::optional<uint64_t> max_rounds = std::nullopt,
               bool persist = true);
  // One group round followed by one driver round.
  void Round();
  bool Finished() const;

  nlohmann::json SaveState() const;
  // Writes state.json, report.json and coverage.csv to the output directory.
  void Persist() const;
  nlohmann::json Report() const;

  const CampaignConfig& config() const { return config_; }
  const LibrarySpec& spec() const { return spec_; }
  const DriverPool& pool() const { return pool_; }
  const GroupScheduler& groups() const { return *groups_; }
  const CoverageMap& coverage() const { return coverage_; }
  const CampaignCounters& counters() const { return counters_; }
  const TextGenClient& client() const { return *client_; }
  uint64_t rounds_done() const { return rounds_done_; }

 private:
  struct Restore;
  Campaign(CampaignConfig config, std::unique_ptr<TextGenClient> client,
           const Restore* restore);

  void GroupRound();
  void DriverRound();
  void AddSeedDrivers();
  void StoreCrash(DriverRecord& record, const SliceReport& report);
  void WriteDriverSource(const DriverSource& driver) const;

  CampaignConfig config_;
  LibrarySpec spec_;
  DependencyIndex index_;
  PromptTemplates templates_;
  FactoryConfig factory_config_;
  std::unique_ptr<TextGenClient> client_;
  std::unique_ptr<Toolchain> toolchain_;
  std::unique_ptr<ExecutorAdapter> executor_;
  std::unique_ptr<GroupScheduler> groups_;
  DriverPool pool_;
  CoverageMap coverage_;
  CampaignCounters counters_;
  Rng group_rng_;
  Rng driver_rng_;
  uint64_t rounds_done_ = 0;
  uint64_t next_driver_ = 0;
  bool query_budget_exhausted_ = false;
  double elapsed_seconds_ = 0.0;
  std::vector<std::pair<uint64_t, uint64_t>> series_;
};

}  // namespace duofuzz

#endif  // DUOFUZZ_CAMPAIGN_H_
