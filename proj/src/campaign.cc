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

#include "duofuzz/campaign.h"

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace duofuzz {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Writes through a temporary file so a crash never leaves a torn file.
void WriteFileAtomic(const fs::path& path, std::string_view text) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw EnvironmentError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

fs::path Resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

json PathOrNull(const std::optional<fs::path>& p) {
  return p ? json(p->string()) : json(nullptr);
}

std::optional<fs::path> OptionalPath(const json& j, const char* key,
                                     const fs::path& base) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return Resolve(base, j[key].get<std::string>());
}

std::string DriverId(uint64_t n) {
  std::ostringstream out;
  out << "drv-" << std::setw(5) << std::setfill('0') << n;
  return out.str();
}

std::unique_ptr<TextGenClient> MakeClient(const CampaignConfig& config) {
  const json& j = config.client;
  const std::string kind = j.value(
      "kind", config.mode == CampaignMode::kSim ? "sim" : "http");
  if (kind == "sim") {
    SimClientConfig c = SimClientConfig::FromJson(j);
    if (!j.contains("seed")) c.seed = MixSeed(config.seed, 4);
    return std::make_unique<SimulatedClient>(c);
  }
  if (kind == "scripted") {
    const double cost = j.value("cost_per_query", 0.0);
    const bool cycle = j.value("cycle", false);
    if (j.contains("dir")) {
      return std::make_unique<ScriptedClient>(
          ScriptedClient::ReadDirectory(j["dir"].get<std::string>()), cost,
          cycle);
    }
    return std::make_unique<ScriptedClient>(
        j.value("responses", std::vector<std::string>{}), cost, cycle);
  }
  if (kind == "http") {
    return std::make_unique<HttpChatClient>(HttpClientConfig::FromJson(j));
  }
  throw ConfigError("unknown client kind: " + kind);
}

constexpr std::string_view kGenerationResults[] = {
    "accepted",          "rejected_missing_api", "rejected_compile",
    "rejected_early_crash", "exhausted_retries", "budget_exhausted"};

}  // namespace

CampaignConfig CampaignConfig::FromJson(const json& j, const fs::path& base) {
  CampaignConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("spec")) throw ConfigError("config: missing 'spec'");
    c.spec_path = Resolve(base, j.at("spec").get<std::string>());
    const std::string mode = j.value("mode", "sim");
    if (mode == "sim") {
      c.mode = CampaignMode::kSim;
    } else if (mode == "real") {
      c.mode = CampaignMode::kReal;
      c.slice_seconds = 60.0;
    } else {
      throw ConfigError("config: mode must be 'sim' or 'real'");
    }
    c.seed = j.value("seed", c.seed);
    c.rounds = j.value("rounds", c.rounds);
    c.wall_clock_seconds = j.value("wall_clock_seconds", c.wall_clock_seconds);
    c.query_budget = j.value("query_budget", c.query_budget);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.batch_groups = j.value("batch_groups", c.batch_groups);
    c.batch_drivers = j.value("batch_drivers", c.batch_drivers);
    c.slice_seconds = j.value("slice_seconds", c.slice_seconds);
    c.workers = j.value("workers", c.workers);
    c.window = j.value("window", c.window);
    c.max_group_len = j.value("max_group_len", c.max_group_len);
    c.enumeration_cap = j.value("enumeration_cap", c.enumeration_cap);
    c.loose_pointer_match =
        j.value("loose_pointer_match", c.loose_pointer_match);
    c.language = ParseDriverLanguage(j.value("language", "toy"));
    c.project = j.value("project", c.project);
    c.early_run_seconds = j.value("early_run_seconds", c.early_run_seconds);
    if (j.contains("energy")) {
      c.energy.initial = j["energy"].value("initial", c.energy.initial);
      c.energy.refund = j["energy"].value("refund", c.energy.refund);
    }
    if (j.contains("ablation")) {
      const json& a = j["ablation"];
      c.ablation.no_implicit = a.value("no_implicit", false);
      c.ablation.random_groups = a.value("random_groups", false);
      c.ablation.round_robin_drivers = a.value("round_robin_drivers", false);
    }
    c.prompts_dir = OptionalPath(j, "prompts_dir", base);
    c.source_root = OptionalPath(j, "source_root", base);
    c.output_dir = Resolve(base, j.value("output_dir", "duofuzz-out"));
    if (j.contains("client")) {
      c.client = j["client"];
      if (c.client.contains("dir")) {
        c.client["dir"] =
            Resolve(base, c.client["dir"].get<std::string>()).string();
      }
    }
    if (j.contains("toolchain")) {
      const json& t = j["toolchain"];
      c.toolchain.compile_command =
          t.value("compile_command", c.toolchain.compile_command);
      c.toolchain.sanitizer_flags =
          t.value("sanitizer_flags", c.toolchain.sanitizer_flags);
      c.toolchain.timeout_seconds =
          t.value("timeout_seconds", c.toolchain.timeout_seconds);
    }
    if (j.contains("fuzzer")) {
      const json& f = j["fuzzer"];
      c.fuzzer.run_command = f.value("run_command", c.fuzzer.run_command);
      c.fuzzer.coverage_command =
          f.value("coverage_command", c.fuzzer.coverage_command);
      c.fuzzer.quota_bytes = f.value("quota_bytes", c.fuzzer.quota_bytes);
      if (f.contains("total_regions") && !f["total_regions"].is_null()) {
        c.fuzzer.total_regions = f["total_regions"].get<uint64_t>();
      }
    }
    if (j.contains("sim")) c.sim = SimConfig::FromJson(j["sim"]);
    for (const auto& s : j.value("seed_drivers", json::array())) {
      SeedDriver seed;
      seed.id = s.at("id").get<std::string>();
      seed.group = ApiGroup(s.at("group").get<std::vector<std::string>>());
      seed.language = ParseDriverLanguage(s.value("language", "toy"));
      if (s.contains("text")) {
        seed.text = s["text"].get<std::string>();
      } else {
        seed.text = ReadFile(Resolve(base, s.at("file").get<std::string>()));
      }
      c.seed_drivers.push_back(std::move(seed));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (c.max_retries < 1) throw ConfigError("config: max_retries must be >= 1");
  if (c.batch_groups < 1 || c.batch_drivers < 1 || c.workers < 1) {
    throw ConfigError("config: batch sizes and workers must be >= 1");
  }
  if (!(c.slice_seconds > 0.0) || c.query_budget < 0.0 ||
      c.wall_clock_seconds < 0.0 || c.rounds < 1) {
    throw ConfigError(
        "config: rounds and slice_seconds must be positive, budgets "
        "non-negative");
  }
  if (c.energy.initial < 1 || c.energy.refund < 0) {
    throw ConfigError("config: energy.initial must be >= 1");
  }
  if (c.mode == CampaignMode::kReal && c.language == DriverLanguage::kToy) {
    throw ConfigError("config: toy drivers can only run in sim mode");
  }
  return c;
}

CampaignConfig CampaignConfig::Load(const fs::path& path) {
  const std::string text = ReadFile(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config: invalid JSON in " + path.string());
  return FromJson(j, fs::absolute(path).parent_path());
}

json CampaignConfig::ToJson() const {
  json seeds = json::array();
  for (const auto& s : seed_drivers) {
    seeds.push_back({{"id", s.id},
                     {"group", s.group.members()},
                     {"language", DriverLanguageName(s.language)},
                     {"text", s.text}});
  }
  json j = {
      {"spec", spec_path.string()},
      {"mode", mode == CampaignMode::kSim ? "sim" : "real"},
      {"seed", seed},
      {"rounds", rounds},
      {"wall_clock_seconds", wall_clock_seconds},
      {"query_budget", query_budget},
      {"max_retries", max_retries},
      {"batch_groups", batch_groups},
      {"batch_drivers", batch_drivers},
      {"slice_seconds", slice_seconds},
      {"workers", workers},
      {"window", window},
      {"max_group_len", max_group_len},
      {"enumeration_cap", enumeration_cap},
      {"loose_pointer_match", loose_pointer_match},
      {"language", DriverLanguageName(language)},
      {"project", project},
      {"early_run_seconds", early_run_seconds},
      {"energy", {{"initial", energy.initial}, {"refund", energy.refund}}},
      {"ablation",
       {{"no_implicit", ablation.no_implicit},
        {"random_groups", ablation.random_groups},
        {"round_robin_drivers", ablation.round_robin_drivers}}},
      {"prompts_dir", PathOrNull(prompts_dir)},
      {"source_root", PathOrNull(source_root)},
      {"output_dir", output_dir.string()},
      {"client", client},
      {"toolchain",
       {{"compile_command", toolchain.compile_command},
        {"sanitizer_flags", toolchain.sanitizer_flags},
        {"timeout_seconds", toolchain.timeout_seconds}}},
      {"fuzzer",
       {{"run_command", fuzzer.run_command},
        {"coverage_command", fuzzer.coverage_command},
        {"quota_bytes", fuzzer.quota_bytes},
        {"total_regions", fuzzer.total_regions
                              ? json(*fuzzer.total_regions)
                              : json(nullptr)}}},
      {"sim", sim.ToJson()},
      {"seed_drivers", seeds}};
  return j;
}

json CampaignCounters::ToJson() const {
  return {{"groups_selected", groups_selected},
          {"queries", queries},
          {"compilable", compilable},
          {"early_crashes", early_crashes},
          {"accepted", accepted},
          {"client_errors", client_errors},
          {"slices", slices},
          {"failed_slices", failed_slices},
          {"failures", failures},
          {"generations", generations}};
}

CampaignCounters CampaignCounters::FromJson(const json& j) {
  CampaignCounters c;
  c.groups_selected = j.at("groups_selected").get<uint64_t>();
  c.queries = j.at("queries").get<uint64_t>();
  c.compilable = j.at("compilable").get<uint64_t>();
  c.early_crashes = j.at("early_crashes").get<uint64_t>();
  c.accepted = j.at("accepted").get<uint64_t>();
  c.client_errors = j.at("client_errors").get<uint64_t>();
  c.slices = j.at("slices").get<uint64_t>();
  c.failed_slices = j.at("failed_slices").get<uint64_t>();
  c.failures = j.at("failures").get<std::map<std::string, uint64_t>>();
  c.generations = j.at("generations").get<std::map<std::string, uint64_t>>();
  return c;
}

struct Campaign::Restore {
  const json* state;
};

Campaign::Campaign(CampaignConfig config, std::unique_ptr<TextGenClient> client)
    : Campaign(std::move(config), std::move(client), nullptr) {}

Campaign::~Campaign() = default;

Campaign::Campaign(CampaignConfig config, std::unique_ptr<TextGenClient> client,
                   const Restore* restore)
    : config_(std::move(config)),
      spec_(LoadLibrarySpecFile(config_.spec_path.string())),
      index_(spec_, config_.loose_pointer_match),
      pool_(config_.energy, config_.ablation.round_robin_drivers
                                ? DriverSelection::kRoundRobin
                                : DriverSelection::kRoulette),
      group_rng_(MixSeed(config_.seed, 1)),
      driver_rng_(MixSeed(config_.seed, 2)) {
  if (config_.project.empty()) config_.project = spec_.library_name;
  templates_ = config_.prompts_dir
                   ? PromptTemplates::Load(*config_.prompts_dir,
                                           config_.language)
                   : PromptTemplates::Defaults(config_.language);
  factory_config_.project = config_.project;
  factory_config_.language = config_.language;
  factory_config_.max_retries = config_.max_retries;
  factory_config_.temperature = config_.client.value("temperature", 1.0);
  factory_config_.early_run_seconds = config_.early_run_seconds;
  if (config_.source_root) {
    factory_config_.source_root = config_.source_root;
  } else if (spec_.source_root) {
    factory_config_.source_root = fs::path(*spec_.source_root);
  }

  client_ = client ? std::move(client) : MakeClient(config_);

  const fs::path work = config_.output_dir / "work";
  if (config_.language == DriverLanguage::kToy) {
    toolchain_ = std::make_unique<ToyToolchain>(spec_);
  } else {
    ToolchainConfig t = config_.toolchain;
    t.work_root = work;
    toolchain_ = std::make_unique<CommandToolchain>(t);
  }
  if (config_.mode == CampaignMode::kSim) {
    executor_ =
        std::make_unique<SimulatedAdapter>(spec_, config_.sim, config_.seed);
  } else {
    FuzzerConfig f = config_.fuzzer;
    f.work_root = work;
    executor_ = std::make_unique<ExternalFuzzerAdapter>(f);
  }
  coverage_ = CoverageMap(executor_->total_regions());

  EnumerateOptions options;
  options.max_size = config_.max_group_len;
  options.max_group_len = config_.max_group_len;
  options.cap = config_.enumeration_cap;
  options.order_seed = MixSeed(config_.seed, 3) | 1;
  options.check_implicit = !config_.ablation.no_implicit;
  groups_ = std::make_unique<GroupScheduler>(
      std::make_unique<GroupEnumerator>(spec_, index_, options),
      GroupSchedulerOptions{config_.window, config_.ablation.random_groups});

  if (restore == nullptr) {
    AddSeedDrivers();
    return;
  }
  const json& s = *restore->state;
  groups_->LoadState(s.at("groups"));
  pool_ = DriverPool::FromJson(s.at("pool"), config_.energy,
                               config_.ablation.round_robin_drivers
                                   ? DriverSelection::kRoundRobin
                                   : DriverSelection::kRoulette);
  coverage_ = CoverageMap::FromJson(s.at("coverage"));
  counters_ = CampaignCounters::FromJson(s.at("counters"));
  group_rng_.LoadState(s.at("rng").at("group").get<std::string>());
  driver_rng_.LoadState(s.at("rng").at("driver").get<std::string>());
  client_->LoadState(s.at("client"));
  rounds_done_ = s.at("rounds_done").get<uint64_t>();
  next_driver_ = s.at("next_driver").get<uint64_t>();
  query_budget_exhausted_ = s.at("query_budget_exhausted").get<bool>();
  elapsed_seconds_ = s.value("elapsed_seconds", 0.0);
  for (const auto& point : s.at("series")) {
    series_.emplace_back(point.at(0).get<uint64_t>(),
                         point.at(1).get<uint64_t>());
  }
}

std::unique_ptr<Campaign> Campaign::Resume(
    const json& state, const std::optional<CampaignConfig>& config,
    std::unique_ptr<TextGenClient> client) {
  if (!state.is_object() || !state.contains("version")) {
    throw StateVersionError("campaign state has no schema version");
  }
  const int version = state["version"].get<int>();
  if (version != kCampaignStateVersion) {
    throw StateVersionError(
        "campaign state schema version " + std::to_string(version) +
        " is not supported by this build (expected " +
        std::to_string(kCampaignStateVersion) +
        "); migrate the state file first");
  }
  CampaignConfig saved = CampaignConfig::FromJson(state.at("config"));
  if (config) {
    if (config->seed != saved.seed) {
      throw ConfigError("resume: seed " + std::to_string(config->seed) +
                        " differs from the saved seed " +
                        std::to_string(saved.seed) +
                        "; the seed is part of the campaign state");
    }
    saved.rounds = config->rounds;
    saved.wall_clock_seconds = config->wall_clock_seconds;
  }
  Restore restore{&state};
  return std::unique_ptr<Campaign>(
      new Campaign(std::move(saved), std::move(client), &restore));
}

std::unique_ptr<Campaign> Campaign::ResumeFile(
    const fs::path& state_path, const std::optional<CampaignConfig>& config,
    std::unique_ptr<TextGenClient> client) {
  const std::string text = ReadFile(state_path);
  json state = json::parse(text, nullptr, false);
  if (state.is_discarded()) {
    throw ConfigError("cannot parse campaign state " + state_path.string());
  }
  return Resume(state, config, std::move(client));
}

void Campaign::AddSeedDrivers() {
  for (const auto& seed : config_.seed_drivers) {
    DriverSource driver{seed.id, seed.group, seed.language, seed.text, 0};
    const CompileResult compiled = toolchain_->Compile(driver);
    if (!compiled.ok) {
      std::cerr << "warning: seed driver " << seed.id
                << " does not compile; skipped\n"
                << compiled.diagnostics;
      continue;
    }
    pool_.Add(driver, compiled.binary, executor_->total_regions());
    groups_->AddSeeded(seed.group);
    WriteDriverSource(driver);
  }
}

void Campaign::WriteDriverSource(const DriverSource& driver) const {
  const fs::path path = config_.output_dir / "drivers" /
                        (driver.id + std::string(DriverExtension(driver.language)));
  WriteFileAtomic(path, driver.text);
}

void Campaign::GroupRound() {
  if (query_budget_exhausted_) return;
  const std::vector<ApiGroup> batch =
      groups_->SelectBatch(config_.batch_groups, group_rng_);
  const FactoryContext context{spec_, templates_, *client_, *toolchain_,
                               *executor_, factory_config_};
  for (const ApiGroup& group : batch) {
    if (query_budget_exhausted_) {
      groups_->Release(group);
      continue;
    }
    const std::string id = DriverId(next_driver_++);
    GenerationOutcome outcome;
    try {
      outcome = GenerateDriver(group, id, config_.query_budget, context);
    } catch (const ClientError& e) {
      ++counters_.client_errors;
      std::cerr << "warning: text generation failed for {" << group.Key()
                << "}: " << e.what() << "\n";
      groups_->Release(group);
      continue;
    } catch (...) {
      groups_->Release(group);
      throw;
    }
    counters_.queries += outcome.queries;
    counters_.compilable += outcome.compiled;
    counters_.early_crashes += outcome.early_crashes;
    for (const auto& f : outcome.failures) {
      if (f.category) {
        ++counters_.failures[std::string(FailureCategoryTag(*f.category))];
      }
    }
    ++counters_.generations[std::string(GenerationResultName(outcome.result))];

    if (outcome.result == GenerationResult::kBudgetExhausted) {
      query_budget_exhausted_ = true;
      if (outcome.queries == 0) {
        groups_->Release(group);
        continue;
      }
    }
    ++counters_.groups_selected;
    const bool accepted = outcome.result == GenerationResult::kAccepted;
    groups_->OnGenerated(group, accepted, outcome.queries);
    if (accepted) {
      ++counters_.accepted;
      WriteDriverSource(*outcome.driver);
      pool_.Add(std::move(*outcome.driver), outcome.binary,
                executor_->total_regions());
    }
  }
}

void Campaign::StoreCrash(DriverRecord& record, const SliceReport& report) {
  const std::string rel = "artifacts/" + record.driver.id;
  const fs::path dir = config_.output_dir / rel;
  fs::create_directories(dir);
  WriteFileAtomic(dir / "crash.txt", report.crash_info.value_or("crashed\n"));
  if (report.crash_input) {
    std::error_code ec;
    const fs::path src(*report.crash_input);
    if (config_.mode == CampaignMode::kReal && fs::is_regular_file(src, ec)) {
      fs::copy_file(src, dir / src.filename(),
                    fs::copy_options::overwrite_existing, ec);
    } else {
      WriteFileAtomic(dir / "crash_input", *report.crash_input);
    }
  }
  record.crash_artifact = rel;
}

void Campaign::DriverRound() {
  const std::vector<std::string> ids =
      pool_.Select(config_.batch_drivers, driver_rng_);
  if (ids.empty()) return;

  std::vector<SliceReport> reports(ids.size());
  std::vector<std::exception_ptr> errors(ids.size());
  auto run = [&](size_t i) {
    try {
      const DriverRecord* record = pool_.Find(ids[i]);
      reports[i] = executor_->RunSlice(SliceRequest{
          record->driver, record->binary, record->coverage, record->slices,
          config_.slice_seconds});
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  for (size_t begin = 0; begin < ids.size(); begin += config_.workers) {
    const size_t end = std::min(ids.size(), begin + config_.workers);
    if (end - begin == 1) {
      run(begin);
      continue;
    }
    std::vector<std::thread> threads;
    for (size_t i = begin; i < end; ++i) threads.emplace_back(run, i);
    for (auto& t : threads) t.join();
  }
  for (size_t i = 0; i < ids.size(); ++i) {
    if (errors[i]) {
      for (const auto& id : ids) pool_.Abort(id);
      std::rethrow_exception(errors[i]);
    }
  }

  // Reports are applied in selection order so runs are reproducible no
  // matter which slice finished first.
  for (const SliceReport& report : reports) {
    pool_.Apply(report, coverage_);
    DriverRecord& record = *pool_.Find(report.driver_id);
    series_.emplace_back(counters_.slices, coverage_.size());
    ++counters_.slices;
    if (report.failed) {
      ++counters_.failed_slices;
      ++counters_.failures[std::string(FailureCategoryTag(report.failure))];
      continue;
    }
    if (report.crashed) StoreCrash(record, report);
    const double normalized =
        coverage_.total_regions()
            ? record.coverage.Normalized()
            : static_cast<double>(record.coverage.size()) /
                  static_cast<double>(std::max<size_t>(coverage_.size(), 1));
    groups_->OnCoverage(record.driver.group, normalized);
  }
}

void Campaign::Round() {
  GroupRound();
  DriverRound();
  ++rounds_done_;
}

bool Campaign::Finished() const {
  return rounds_done_ >= config_.rounds ||
         (config_.wall_clock_seconds > 0.0 &&
          elapsed_seconds_ >= config_.wall_clock_seconds);
}

uint64_t Campaign::Run(std::optional<uint64_t> max_rounds, bool persist) {
  uint64_t done = 0;
  while (!Finished() && (!max_rounds || done < *max_rounds)) {
    const auto start = std::chrono::steady_clock::now();
    try {
      Round();
    } catch (const EnvironmentError&) {
      if (persist) Persist();
      throw;
    }
    elapsed_seconds_ += std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    ++done;
    if (persist) Persist();
  }
  return done;
}

json Campaign::SaveState() const {
  json series = json::array();
  for (const auto& [slice, regions] : series_) {
    series.push_back({slice, regions});
  }
  return {{"version", kCampaignStateVersion},
          {"library", spec_.library_name},
          {"config", config_.ToJson()},
          {"rounds_done", rounds_done_},
          {"next_driver", next_driver_},
          {"query_budget_exhausted", query_budget_exhausted_},
          {"elapsed_seconds", elapsed_seconds_},
          {"groups", groups_->SaveState()},
          {"pool", pool_.ToJson()},
          {"coverage", coverage_.ToJson()},
          {"counters", counters_.ToJson()},
          {"rng",
           {{"group", group_rng_.SaveState()},
            {"driver", driver_rng_.SaveState()}}},
          {"client", client_->SaveState()},
          {"series", series}};
}

json Campaign::Report() const { return ReportFromState(SaveState()); }

void Campaign::Persist() const {
  const json state = SaveState();
  const json report = ReportFromState(state);
  WriteFileAtomic(config_.output_dir / "state.json", state.dump(1) + "\n");
  WriteFileAtomic(config_.output_dir / "report.json", report.dump(2) + "\n");
  WriteFileAtomic(config_.output_dir / "coverage.csv", CoverageCsv(report));
}

json ReportFromState(const json& state) {
  const json& config = state.at("config");
  const json& counters = state.at("counters");
  const uint64_t queries = counters.at("queries").get<uint64_t>();
  const uint64_t accepted = counters.at("accepted").get<uint64_t>();

  json failures = json::object();
  for (FailureCategory c : kAllFailureCategories) {
    const std::string tag(FailureCategoryTag(c));
    failures[tag] = counters.at("failures").value(tag, uint64_t{0});
  }
  json generations = json::object();
  for (std::string_view name : kGenerationResults) {
    const std::string key(name);
    generations[key] = counters.at("generations").value(key, uint64_t{0});
  }

  json drivers = json::array();
  uint64_t bugs = 0;
  for (const auto& d : state.at("pool").at("drivers")) {
    const std::string s = d.at("state").get<std::string>();
    if (s == "retired_bug") ++bugs;
    drivers.push_back({{"id", d.at("driver").at("id")},
                       {"group", d.at("driver").at("group")},
                       {"generation", d.at("driver").at("generation")},
                       {"state", s},
                       {"energy", d.at("energy")},
                       {"slices", d.at("slices")},
                       {"exec_seconds", d.at("exec_seconds")},
                       {"regions", d.at("coverage").at("regions").size()},
                       {"crash_artifact", d.at("crash_artifact")}});
  }
  json groups = json::array();
  uint64_t with_driver = 0;
  for (const auto& g : state.at("groups").at("records")) {
    const std::string s = g.at("status").get<std::string>();
    if (s == "candidate") continue;
    if (s == "has_driver") ++with_driver;
    groups.push_back({{"members", g.at("members")},
                      {"status", s},
                      {"attempts", g.at("attempts")},
                      {"observed_coverage", g.at("observed_coverage")}});
  }

  const json& cov = state.at("coverage");
  const uint64_t regions = cov.at("regions").size();
  json total = cov.value("total_regions", json(nullptr));
  double normalized = 0.0;
  if (!total.is_null() && total.get<uint64_t>() > 0) {
    normalized = static_cast<double>(regions) /
                 static_cast<double>(total.get<uint64_t>());
  }
  json series = json::array();
  for (const auto& p : state.at("series")) {
    series.push_back({{"slice_index", p.at(0)},
                      {"cumulative_regions", p.at(1)}});
  }

  return {
      {"library", state.value("library", "")},
      {"mode", config.at("mode")},
      {"seed", config.at("seed")},
      {"ablation", config.at("ablation")},
      {"rounds", state.at("rounds_done")},
      {"groups_enumerated", state.at("groups").at("pulled")},
      {"groups_selected", counters.at("groups_selected")},
      {"groups_with_driver", with_driver},
      {"queries", queries},
      {"compilable", counters.at("compilable")},
      {"accepted", accepted},
      {"early_crashes", counters.at("early_crashes")},
      {"stillborn_rate",
       queries > 0 ? json(1.0 - static_cast<double>(accepted) /
                                    static_cast<double>(queries))
                   : json(nullptr)},
      {"query_cost", state.at("client").at("cost")},
      {"client_errors", counters.at("client_errors")},
      {"failure_categories", failures},
      {"generation_results", generations},
      {"drivers_in_pool", drivers.size()},
      {"bugs", bugs},
      {"slices", counters.at("slices")},
      {"failed_slices", counters.at("failed_slices")},
      {"coverage",
       {{"regions", regions},
        {"total_regions", total},
        {"normalized", normalized}}},
      {"coverage_series", series},
      {"drivers", drivers},
      {"groups", groups}};
}

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "table") return ReportFormat::kTable;
  if (name == "csv") return ReportFormat::kCsv;
  throw std::invalid_argument("unknown report format: " + std::string(name));
}

std::string CoverageCsv(const json& report) {
  std::string out = "slice_index,cumulative_regions\n";
  for (const auto& p : report.at("coverage_series")) {
    out += std::to_string(p.at("slice_index").get<uint64_t>()) + "," +
           std::to_string(p.at("cumulative_regions").get<uint64_t>()) + "\n";
  }
  return out;
}

std::string RenderReport(const json& report, ReportFormat format) {
  if (format == ReportFormat::kJson) return report.dump(2) + "\n";
  if (format == ReportFormat::kCsv) return CoverageCsv(report);

  std::ostringstream out;
  auto row = [&](std::string_view key, const json& value) {
    out << std::left << std::setw(22) << key << " "
        << (value.is_string() ? value.get<std::string>() : value.dump())
        << "\n";
  };
  for (const char* key :
       {"library", "mode", "seed", "rounds", "groups_enumerated",
        "groups_selected", "groups_with_driver", "queries", "compilable",
        "accepted", "early_crashes", "stillborn_rate", "query_cost",
        "client_errors", "drivers_in_pool", "bugs", "slices",
        "failed_slices"}) {
    row(key, report.at(key));
  }
  row("coverage", report.at("coverage").at("regions"));
  out << "\nfailure categories\n";
  for (const auto& [tag, count] : report.at("failure_categories").items()) {
    out << "  " << std::left << std::setw(28) << tag << " " << count.dump()
        << "\n";
  }
  out << "\n"
      << std::left << std::setw(12) << "driver" << std::setw(18) << "state"
      << std::setw(8) << "energy" << std::setw(8) << "slices" << std::setw(9)
      << "regions"
      << "group\n";
  for (const auto& d : report.at("drivers")) {
    std::string group;
    for (const auto& m : d.at("group")) {
      if (!group.empty()) group += ",";
      group += m.get<std::string>();
    }
    out << std::left << std::setw(12) << d.at("id").get<std::string>()
        << std::setw(18) << d.at("state").get<std::string>() << std::setw(8)
        << d.at("energy").dump() << std::setw(8) << d.at("slices").dump()
        << std::setw(9) << d.at("regions").dump() << group << "\n";
  }
  return out.str();
}

}  // namespace duofuzz
