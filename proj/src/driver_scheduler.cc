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

#include <algorithm>

namespace duofuzz {

std::string_view DriverStateName(DriverState state) {
  switch (state) {
    case DriverState::kIdle:
      return "idle";
    case DriverState::kRunning:
      return "running";
    case DriverState::kRetiredBug:
      return "retired_bug";
    case DriverState::kRetiredExhausted:
      return "retired_exhausted";
  }
  return "idle";
}

DriverState ParseDriverState(std::string_view name) {
  for (DriverState s : {DriverState::kIdle, DriverState::kRunning,
                        DriverState::kRetiredBug,
                        DriverState::kRetiredExhausted}) {
    if (DriverStateName(s) == name) return s;
  }
  throw std::invalid_argument("unknown driver state: " + std::string(name));
}

nlohmann::json DriverRecord::ToJson() const {
  nlohmann::json j = {{"driver", driver.ToJson()},
                      {"sequence", sequence},
                      {"binary", binary},
                      {"energy", energy},
                      {"coverage", coverage.ToJson()},
                      {"exec_seconds", exec_seconds},
                      {"slices", slices},
                      {"state", DriverStateName(state)}};
  j["crash_artifact"] = crash_artifact ? nlohmann::json(*crash_artifact)
                                       : nlohmann::json(nullptr);
  return j;
}

DriverRecord DriverRecord::FromJson(const nlohmann::json& j) {
  DriverRecord r;
  r.driver = DriverSource::FromJson(j.at("driver"));
  r.sequence = j.at("sequence").get<uint64_t>();
  r.binary = j.at("binary").get<std::string>();
  r.energy = j.at("energy").get<int>();
  r.coverage = CoverageMap::FromJson(j.at("coverage"));
  r.exec_seconds = j.at("exec_seconds").get<double>();
  r.slices = j.at("slices").get<uint64_t>();
  r.state = ParseDriverState(j.at("state").get<std::string>());
  if (j.contains("crash_artifact") && !j["crash_artifact"].is_null()) {
    r.crash_artifact = j["crash_artifact"].get<std::string>();
  }
  return r;
}

DriverScore ScoreDriver(const DriverRecord& record,
                        const EnergyPolicy& policy) {
  if (record.exec_seconds <= 0.0) return {PriorityClass::kFresh, 0.0};
  const double weight = static_cast<double>(std::max(record.energy, 1)) /
                        static_cast<double>(policy.initial);
  return {PriorityClass::kScored,
          static_cast<double>(record.coverage.size()) / record.exec_seconds *
              weight};
}

std::vector<std::string> RouletteSelect(std::span<const DriverRecord> pool,
                                        size_t n, Rng& rng,
                                        const EnergyPolicy& policy) {
  std::vector<const DriverRecord*> fresh;
  std::vector<const DriverRecord*> scored;
  std::vector<double> weights;
  for (const auto& r : pool) {
    if (r.Retired() || r.state == DriverState::kRunning) continue;
    const DriverScore s = ScoreDriver(r, policy);
    if (s.priority == PriorityClass::kFresh) {
      fresh.push_back(&r);
    } else {
      scored.push_back(&r);
      weights.push_back(s.value);
    }
  }
  std::stable_sort(fresh.begin(), fresh.end(),
                   [](const DriverRecord* a, const DriverRecord* b) {
                     return a->sequence < b->sequence;
                   });
  std::vector<std::string> chosen;
  for (const DriverRecord* r : fresh) {
    if (chosen.size() == n) return chosen;
    chosen.push_back(r->driver.id);
  }
  while (chosen.size() < n && !scored.empty()) {
    double total = 0.0;
    for (double w : weights) total += w;
    size_t pick = scored.size() - 1;
    if (total > 0.0) {
      const double target = rng.UnitReal() * total;
      double acc = 0.0;
      for (size_t i = 0; i < scored.size(); ++i) {
        acc += weights[i];
        if (target < acc && weights[i] > 0.0) {
          pick = i;
          break;
        }
      }
      // Rounding can leave target at the very top; fall back to the last
      // positive weight.
      while (weights[pick] <= 0.0) --pick;
    } else {
      pick = rng.Uniform(scored.size());
    }
    chosen.push_back(scored[pick]->driver.id);
    scored.erase(scored.begin() + pick);
    weights.erase(weights.begin() + pick);
  }
  return chosen;
}

SliceEffect ApplySliceResult(DriverRecord& record, const SliceReport& report,
                             CoverageMap& global_coverage,
                             const EnergyPolicy& policy) {
  if (report.driver_id != record.driver.id) {
    throw std::logic_error("slice report for " + report.driver_id +
                           " applied to " + record.driver.id);
  }
  if (record.state != DriverState::kRunning) {
    throw std::logic_error("driver " + record.driver.id + " is not running");
  }
  SliceEffect effect;
  record.exec_seconds += std::max(report.exec_seconds, 0.0);
  ++record.slices;
  record.energy = std::max(record.energy - 1, 0);
  if (report.failed) {
    if (report.failure == FailureCategory::kOutOfSpace) {
      record.state = DriverState::kRetiredExhausted;
      effect.retired = true;
    } else {
      record.state = DriverState::kIdle;
    }
    return effect;
  }
  for (const auto& region : report.new_regions) {
    if (record.coverage.Insert(region)) ++effect.new_for_driver;
    if (global_coverage.Insert(region)) ++effect.new_globally;
  }
  if (effect.new_for_driver > 0) {
    record.energy = std::min(record.energy + policy.refund, policy.initial);
  }
  if (report.crashed) {
    record.state = DriverState::kRetiredBug;
    effect.retired = true;
  } else {
    record.state = DriverState::kIdle;
  }
  return effect;
}

double StillbornRate(uint64_t accepted, uint64_t queries) {
  if (queries == 0) {
    throw UndefinedMetricError("stillborn rate needs at least one query");
  }
  if (accepted > queries) {
    throw std::invalid_argument("more accepted drivers than queries");
  }
  return 1.0 - static_cast<double>(accepted) / static_cast<double>(queries);
}

DriverRecord& DriverPool::Add(DriverSource driver, std::string binary,
                              std::optional<uint64_t> total_regions) {
  if (by_id_.count(driver.id)) {
    throw std::invalid_argument("duplicate driver id: " + driver.id);
  }
  DriverRecord record;
  record.sequence = records_.empty() ? 0 : records_.back().sequence + 1;
  record.driver = std::move(driver);
  record.binary = std::move(binary);
  record.energy = policy_.initial;
  record.coverage = CoverageMap(total_regions);
  by_id_[record.driver.id] = records_.size();
  records_.push_back(std::move(record));
  return records_.back();
}

std::vector<std::string> DriverPool::Select(size_t n, Rng& rng) {
  std::vector<std::string> chosen;
  if (selection_ == DriverSelection::kRoulette) {
    chosen = RouletteSelect(records_, n, rng, policy_);
  } else {
    std::vector<const DriverRecord*> eligible;
    for (const auto& r : records_) {
      if (!r.Retired() && r.state != DriverState::kRunning) {
        eligible.push_back(&r);
      }
    }
    if (!eligible.empty()) {
      auto start = std::find_if(
          eligible.begin(), eligible.end(),
          [&](const DriverRecord* r) { return r->sequence >= cursor_; });
      size_t i = static_cast<size_t>(start - eligible.begin()) %
                 eligible.size();
      for (size_t k = 0; k < std::min(n, eligible.size()); ++k) {
        chosen.push_back(eligible[i]->driver.id);
        cursor_ = eligible[i]->sequence + 1;
        i = (i + 1) % eligible.size();
      }
    }
  }
  for (const auto& id : chosen) Find(id)->state = DriverState::kRunning;
  return chosen;
}

SliceEffect DriverPool::Apply(const SliceReport& report,
                              CoverageMap& global_coverage) {
  DriverRecord* record = Find(report.driver_id);
  if (record == nullptr) {
    throw std::logic_error("slice report for unknown driver " +
                           report.driver_id);
  }
  return ApplySliceResult(*record, report, global_coverage, policy_);
}

void DriverPool::Abort(const std::string& id) {
  DriverRecord* record = Find(id);
  if (record != nullptr && record->state == DriverState::kRunning) {
    record->state = DriverState::kIdle;
  }
}

DriverRecord* DriverPool::Find(const std::string& id) {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

const DriverRecord* DriverPool::Find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

size_t DriverPool::ActiveCount() const {
  return static_cast<size_t>(
      std::count_if(records_.begin(), records_.end(),
                    [](const DriverRecord& r) { return !r.Retired(); }));
}

nlohmann::json DriverPool::ToJson() const {
  nlohmann::json drivers = nlohmann::json::array();
  for (const auto& r : records_) drivers.push_back(r.ToJson());
  return {{"drivers", drivers}, {"cursor", cursor_}};
}

DriverPool DriverPool::FromJson(const nlohmann::json& j, EnergyPolicy policy,
                                DriverSelection selection) {
  DriverPool pool(policy, selection);
  for (const auto& item : j.at("drivers")) {
    DriverRecord r = DriverRecord::FromJson(item);
    if (pool.by_id_.count(r.driver.id)) {
      throw std::invalid_argument("duplicate driver id: " + r.driver.id);
    }
    pool.by_id_[r.driver.id] = pool.records_.size();
    pool.records_.push_back(std::move(r));
  }
  pool.cursor_ = j.value("cursor", uint64_t{0});
  return pool;
}

}  // namespace duofuzz
