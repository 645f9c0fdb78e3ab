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

// The fuzz-driver pool: saturation scores, roulette-wheel selection and
// slice feedback.
#ifndef DUOFUZZ_DRIVER_SCHEDULER_H_
#define DUOFUZZ_DRIVER_SCHEDULER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "duofuzz/coverage.h"
#include "duofuzz/driver.h"
#include "duofuzz/executor.h"
#include "duofuzz/rng.h"
#include "json.hpp"

namespace duofuzz {

enum class DriverState { kIdle, kRunning, kRetiredBug, kRetiredExhausted };

std::string_view DriverStateName(DriverState state);
DriverState ParseDriverState(std::string_view name);

struct DriverRecord {
  DriverSource driver;
  uint64_t sequence = 0;  // creation order within the pool
  std::string binary;
  int energy = 10;
  CoverageMap coverage;
  double exec_seconds = 0.0;
  uint64_t slices = 0;
  DriverState state = DriverState::kIdle;
  // Path of the stored crash artifact, relative to the campaign directory.
  std::optional<std::string> crash_artifact;

  bool Retired() const {
    return state == DriverState::kRetiredBug ||
           state == DriverState::kRetiredExhausted;
  }
  nlohmann::json ToJson() const;
  static DriverRecord FromJson(const nlohmann::json& j);
  bool operator==(const DriverRecord&) const = default;
};

struct EnergyPolicy {
  int initial = 10;  // E0, also the cap
  int refund = 2;
};

enum class PriorityClass { kFresh, kScored };

struct DriverScore {
  PriorityClass priority = PriorityClass::kFresh;
  double value = 0.0;  // meaningful for kScored
};

// exec_seconds == 0 is fresh; otherwise |coverage| / exec_seconds scaled by
// max(energy, 1) / E0.
DriverScore ScoreDriver(const DriverRecord& record,
                        const EnergyPolicy& policy = {});

// Fresh eligible drivers first, oldest first; the remaining slots are drawn
// without replacement with probability proportional to the score (uniform
// when all remaining scores are zero). Retired and running drivers are
// skipped.
std::vector<std::string> RouletteSelect(std::span<const DriverRecord> pool,
                                        size_t n, Rng& rng,
                                        const EnergyPolicy& policy = {});

// Outcome of applying one slice.
struct SliceEffect {
  size_t new_for_driver = 0;
  size_t new_globally = 0;
  bool retired = false;
};

// Throws std::logic_error when the report belongs to another driver or the
// record is not running. A failed slice only accounts time and energy.
SliceEffect ApplySliceResult(DriverRecord& record, const SliceReport& report,
                             CoverageMap& global_coverage,
                             const EnergyPolicy& policy = {});

class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// 1 - accepted / queries. Throws UndefinedMetricError when queries == 0 and
// std::invalid_argument when accepted > queries.
double StillbornRate(uint64_t accepted, uint64_t queries);

enum class DriverSelection { kRoulette, kRoundRobin };

class DriverPool {
 public:
  explicit DriverPool(EnergyPolicy policy = {},
                      DriverSelection selection = DriverSelection::kRoulette)
      : policy_(policy), selection_(selection) {}

  // Throws std::invalid_argument on a duplicate id.
  DriverRecord& Add(DriverSource driver, std::string binary,
                    std::optional<uint64_t> total_regions);

  // Marks the chosen drivers running.
  std::vector<std::string> Select(size_t n, Rng& rng);
  SliceEffect Apply(const SliceReport& report, CoverageMap& global_coverage);
  // Puts a running driver back to idle without feedback.
  void Abort(const std::string& id);

  DriverRecord* Find(const std::string& id);
  const DriverRecord* Find(const std::string& id) const;
  const std::vector<DriverRecord>& records() const { return records_; }
  size_t ActiveCount() const;
  const EnergyPolicy& policy() const { return policy_; }

  nlohmann::json ToJson() const;
  static DriverPool FromJson(const nlohmann::json& j, EnergyPolicy policy,
                             DriverSelection selection);

 private:
  EnergyPolicy policy_;
  DriverSelection selection_;
  std::vector<DriverRecord> records_;  // creation order
  std::map<std::string, size_t> by_id_;
  uint64_t cursor_ = 0;  // round-robin position
};

}  // namespace duofuzz

#endif  // DUOFUZZ_DRIVER_SCHEDULER_H_
