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

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <variant>

#include "duofuzz/rng.h"
#include "duofuzz/subprocess.h"
#include "duofuzz/template.h"

namespace duofuzz {

namespace fs = std::filesystem;

namespace {

bool IsBlank(std::string_view text) {
  return text.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

void WriteFile(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw EnvironmentError("cannot write " + path.string());
}

void MakeDirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw EnvironmentError("cannot create " + dir.string() + ": " +
                           ec.message());
  }
}

std::string FormatSeconds(double seconds) {
  if (seconds == static_cast<double>(static_cast<int64_t>(seconds))) {
    return std::to_string(static_cast<int64_t>(seconds));
  }
  std::ostringstream out;
  out << seconds;
  return out.str();
}

std::string Tail(const std::string& text, size_t n) {
  return text.size() <= n ? text : text.substr(text.size() - n);
}

}  // namespace

CompileResult CommandToolchain::Compile(const DriverSource& driver) {
  const fs::path dir = fs::absolute(config_.work_root / driver.id);
  MakeDirs(dir);
  const fs::path src =
      dir / ("driver" + std::string(DriverExtension(driver.language)));
  const fs::path out = dir / "driver";
  CompileResult result;
  if (IsBlank(driver.text)) {
    result.diagnostics = src.string() + ":1:1: error: expected expression\n";
    return result;
  }
  WriteFile(src, driver.text);
  std::string command = FillTemplate(
      config_.compile_command,
      {{"src", ShellQuote(src.string())}, {"out", ShellQuote(out.string())}});
  if (!config_.sanitizer_flags.empty()) {
    command += " " + config_.sanitizer_flags;
  }
  const ProcessResult run = RunShell(command, config_.timeout_seconds, dir);
  if (!run.signaled && (run.exit_code == 127 || run.exit_code == 126)) {
    throw EnvironmentError("toolchain could not be run: " + command + "\n" +
                           run.err);
  }
  if (run.timed_out) {
    result.diagnostics = "compilation timed out after " +
                         FormatSeconds(config_.timeout_seconds) + "s\n";
    return result;
  }
  if (run.ok()) {
    result.ok = true;
    result.binary = out.string();
    result.diagnostics = run.err;
    return result;
  }
  result.diagnostics = run.err + run.out;
  return result;
}

ToyToolchain::ToyToolchain(const LibrarySpec& spec) {
  for (const auto& api : spec.apis) names_.insert(api.name);
}

CompileResult ToyToolchain::Compile(const DriverSource& driver) {
  const std::string file = driver.id + ".toy";
  CompileResult result;
  if (IsBlank(driver.text)) {
    result.diagnostics = file + ":1:1: error: expected expression\n";
    return result;
  }
  auto parsed = ParseToyScript(driver.text);
  if (auto* error = std::get_if<ToySyntaxError>(&parsed)) {
    result.diagnostics = file + ":" + std::to_string(error->line) + ":" +
                         std::to_string(error->column) +
                         ": error: expected expression\n" + file + ":" +
                         std::to_string(error->line) + ":" +
                         std::to_string(error->column) + ": note: " +
                         error->message + "\n";
    return result;
  }
  for (const auto& call : std::get<std::vector<ToyCall>>(parsed)) {
    if (!names_.count(call.callee)) {
      result.diagnostics += file + ":" + std::to_string(call.line) +
                            ":6: error: use of undeclared identifier '" +
                            call.callee + "'\n";
    }
  }
  if (!result.diagnostics.empty()) return result;
  result.ok = true;
  result.binary = "toy:" + driver.id;
  return result;
}

nlohmann::json SimConfig::ToJson() const {
  return {{"library_seed", library_seed},
          {"regions_per_api_min", regions_per_api_min},
          {"regions_per_api_max", regions_per_api_max},
          {"regions_per_pair_min", regions_per_pair_min},
          {"regions_per_pair_max", regions_per_pair_max},
          {"discovery_rate_min", discovery_rate_min},
          {"discovery_rate_max", discovery_rate_max},
          {"crash_probability", crash_probability},
          {"crash_tick_min", crash_tick_min},
          {"crash_tick_max", crash_tick_max}};
}

SimConfig SimConfig::FromJson(const nlohmann::json& j) {
  SimConfig c;
  c.library_seed = j.value("library_seed", c.library_seed);
  c.regions_per_api_min = j.value("regions_per_api_min", c.regions_per_api_min);
  c.regions_per_api_max = j.value("regions_per_api_max", c.regions_per_api_max);
  c.regions_per_pair_min =
      j.value("regions_per_pair_min", c.regions_per_pair_min);
  c.regions_per_pair_max =
      j.value("regions_per_pair_max", c.regions_per_pair_max);
  c.discovery_rate_min = j.value("discovery_rate_min", c.discovery_rate_min);
  c.discovery_rate_max = j.value("discovery_rate_max", c.discovery_rate_max);
  c.crash_probability = j.value("crash_probability", c.crash_probability);
  c.crash_tick_min = j.value("crash_tick_min", c.crash_tick_min);
  c.crash_tick_max = j.value("crash_tick_max", c.crash_tick_max);
  if (c.regions_per_api_min > c.regions_per_api_max ||
      c.regions_per_pair_min > c.regions_per_pair_max ||
      c.crash_tick_min > c.crash_tick_max || c.crash_tick_min < 2 ||
      !(c.discovery_rate_min > 0.0) ||
      c.discovery_rate_min > c.discovery_rate_max ||
      c.discovery_rate_max > 1.0) {
    throw std::invalid_argument("inconsistent simulator config");
  }
  return c;
}

namespace {

uint64_t DrawInRange(Rng& rng, uint64_t lo, uint64_t hi) {
  return lo + rng.Uniform(hi - lo + 1);
}

}  // namespace

SimulatedAdapter::SimulatedAdapter(const LibrarySpec& spec, SimConfig config,
                                   uint64_t campaign_seed)
    : spec_(spec),
      config_(config),
      campaign_seed_(campaign_seed),
      index_(spec_) {
  std::vector<std::string> names = spec_.ApiNames();
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    Rng rng(MixSeed(config_.library_seed, StableHash(name)));
    const uint64_t size = DrawInRange(rng, config_.regions_per_api_min,
                                      config_.regions_per_api_max);
    api_blocks_[name] = {total_, size};
    total_ += size;
  }
  for (size_t i = 0; i < names.size(); ++i) {
    for (size_t j = i + 1; j < names.size(); ++j) {
      if (!index_.Linked(names[i], names[j])) continue;
      Rng rng(MixSeed(config_.library_seed,
                      StableHash(names[i] + "|" + names[j])));
      const uint64_t size = DrawInRange(rng, config_.regions_per_pair_min,
                                        config_.regions_per_pair_max);
      if (size == 0) continue;
      pair_blocks_[{names[i], names[j]}] = {total_, size};
      total_ += size;
    }
  }
}

void SimulatedAdapter::SetModel(const std::string& driver_id,
                                SimTargetModel model) {
  std::lock_guard<std::mutex> lock(mu_);
  pinned_[driver_id] = std::move(model);
}

SimTargetModel SimulatedAdapter::ModelFor(const DriverSource& driver) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = pinned_.find(driver.id);
    if (it != pinned_.end()) return it->second;
  }
  std::vector<std::string> calls;
  const std::vector<std::string> callees =
      driver.language == DriverLanguage::kToy ? ToyCallees(driver.text)
                                              : driver.group.members();
  for (const auto& c : callees) {
    if (api_blocks_.count(c)) calls.push_back(c);
  }
  std::sort(calls.begin(), calls.end());

  std::vector<uint64_t> ids;
  for (const auto& c : calls) {
    const auto [offset, size] = api_blocks_.at(c);
    for (uint64_t k = 0; k < size; ++k) ids.push_back(offset + k);
  }
  for (size_t i = 0; i < calls.size(); ++i) {
    for (size_t j = i + 1; j < calls.size(); ++j) {
      auto it = pair_blocks_.find({calls[i], calls[j]});
      if (it == pair_blocks_.end()) continue;
      for (uint64_t k = 0; k < it->second.second; ++k) {
        ids.push_back(it->second.first + k);
      }
    }
  }
  std::sort(ids.begin(), ids.end());

  SimTargetModel model;
  for (uint64_t id : ids) model.reachable.push_back("r" + std::to_string(id));

  ApiGroup called(calls);
  Rng rng(MixSeed(MixSeed(config_.library_seed, campaign_seed_),
                  StableHash(called.Key())));
  model.discovery_rate =
      config_.discovery_rate_min +
      (config_.discovery_rate_max - config_.discovery_rate_min) *
          rng.UnitReal();
  if (!SatImplicit(called, spec_.implicit)) {
    model.crash_tick = 1;
  } else if (rng.Bernoulli(config_.crash_probability)) {
    model.crash_tick =
        DrawInRange(rng, config_.crash_tick_min, config_.crash_tick_max);
  }
  return model;
}

SliceReport SimulatedAdapter::RunSlice(const SliceRequest& request) {
  const SimTargetModel model = ModelFor(request.driver);
  SliceReport report;
  report.driver_id = request.driver.id;
  report.exec_seconds = request.seconds;
  Rng rng(MixSeed(MixSeed(campaign_seed_, StableHash(request.driver.id)),
                  request.slice_index));
  for (const auto& region : model.reachable) {
    if (request.prior_coverage.Contains(region)) continue;
    if (rng.Bernoulli(model.discovery_rate)) report.new_regions.insert(region);
  }
  const uint64_t tick = request.slice_index + 1;
  if (model.crash_tick && tick >= *model.crash_tick) {
    report.crashed = true;
    report.crash_info = "simulated crash in " + request.driver.id +
                        " at tick " + std::to_string(tick);
    report.crash_input =
        "sim-crash:" + request.driver.id + ":" + std::to_string(tick);
  }
  return report;
}

std::optional<std::set<std::string>> ReadRegionLines(std::string_view text) {
  std::set<std::string> regions;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (IsBlank(line)) continue;
    const size_t colon = line.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == line.size()) {
      return std::nullopt;
    }
    regions.insert(line);
  }
  return regions;
}

uint64_t DirectorySize(const fs::path& dir) {
  uint64_t total = 0;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(dir, ec), end; it != end;
       it.increment(ec)) {
    if (ec) break;
    if (it->is_regular_file(ec)) total += it->file_size(ec);
  }
  return total;
}

ExternalFuzzerAdapter::ExternalFuzzerAdapter(FuzzerConfig config,
                                             CoverageReader reader)
    : config_(std::move(config)), reader_(std::move(reader)) {}

SliceReport ExternalFuzzerAdapter::RunSlice(const SliceRequest& request) {
  const fs::path dir = fs::absolute(config_.work_root / request.driver.id);
  const fs::path corpus = dir / "corpus";
  MakeDirs(corpus);
  const std::string bin = ShellQuote(fs::absolute(request.binary).string());
  const std::string corpus_arg = ShellQuote(corpus.string());

  SliceReport report;
  report.driver_id = request.driver.id;
  const std::string command =
      FillTemplate(config_.run_command, {{"bin", bin},
                                         {"corpus", corpus_arg},
                                         {"seconds", FormatSeconds(request.seconds)}});
  const auto start = std::chrono::steady_clock::now();
  const ProcessResult run =
      RunShell(command, request.seconds * 1.5 + 10.0, dir);
  report.exec_seconds = std::max(
      1e-3, std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count());
  if (!run.signaled && (run.exit_code == 127 || run.exit_code == 126)) {
    throw EnvironmentError("fuzzer could not be run: " + command + "\n" +
                           run.err);
  }

  const uint64_t used = DirectorySize(dir);
  if (used > config_.quota_bytes ||
      run.err.find("No space left on device") != std::string::npos) {
    report.failed = true;
    report.failure = FailureCategory::kOutOfSpace;
    report.failure_detail = "workdir quota exceeded: " + std::to_string(used) +
                            " bytes used, quota " +
                            std::to_string(config_.quota_bytes);
    return report;
  }

  if (!run.timed_out && !run.ok()) {
    report.crashed = true;
    report.crash_info =
        (run.signaled ? "killed by signal " + std::to_string(run.signal)
                      : "exit code " + std::to_string(run.exit_code)) +
        "\n" + Tail(run.err, 4096);
    // libFuzzer leaves crash-*/leak-*/oom-*/timeout-* files in its cwd.
    std::optional<fs::path> newest;
    fs::file_time_type newest_time;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      const std::string name = entry.path().filename().string();
      if (!(name.rfind("crash-", 0) == 0 || name.rfind("leak-", 0) == 0 ||
            name.rfind("oom-", 0) == 0 || name.rfind("timeout-", 0) == 0)) {
        continue;
      }
      const auto t = entry.last_write_time(ec);
      if (!newest || t > newest_time) {
        newest = entry.path();
        newest_time = t;
      }
    }
    if (newest) report.crash_input = newest->string();
  }

  if (config_.coverage_command.empty()) return report;
  const std::string cov_command = FillTemplate(
      config_.coverage_command, {{"bin", bin}, {"corpus", corpus_arg}});
  const ProcessResult cov = RunShell(cov_command, 600.0, dir);
  std::optional<std::set<std::string>> regions;
  if (cov.ok()) regions = reader_(cov.out);
  if (!regions) {
    report.failed = true;
    report.failure_detail = cov.ok() ? "coverage export unparsable"
                                     : "coverage export failed: " +
                                           Tail(cov.err, 1024);
    return report;
  }
  report.new_regions = std::move(*regions);
  return report;
}

}  // namespace duofuzz
