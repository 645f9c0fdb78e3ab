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

// Multi-objective prioritization of API groups awaiting driver generation.
//
// Each candidate is scored on four objectives, all oriented so that larger
// is better: similarity to groups that already produced coverage, predicted
// coverage, negated group length and the gain in API-frequency entropy of
// the driver pool. Candidates are ranked into Pareto fronts and batches are
// filled from the lowest front upward.
#ifndef DUOFUZZ_GROUP_SCHEDULER_H_
#define DUOFUZZ_GROUP_SCHEDULER_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "duofuzz/api_model.h"
#include "duofuzz/constraint_engine.h"
#include "duofuzz/rng.h"
#include "json.hpp"

namespace duofuzz {

enum class GroupStatus { kCandidate, kGenerating, kHasDriver, kExhausted };

std::string_view GroupStatusName(GroupStatus status);
GroupStatus ParseGroupStatus(std::string_view name);

struct GroupRecord {
  ApiGroup group;
  GroupStatus status = GroupStatus::kCandidate;
  // Best normalized coverage among the group's drivers, in [0, 1].
  double observed_coverage = 0.0;
  int attempts = 0;
  // True once one of the group's drivers finished a slice.
  bool executed = false;
};

struct ObjectiveVector {
  double similarity = 0.0;
  double predicted_coverage = 0.0;
  int neg_length = 0;
  double entropy_gain = 0.0;

  std::array<double, 4> AsArray() const {
    return {similarity, predicted_coverage, static_cast<double>(neg_length),
            entropy_gain};
  }
};

using FrequencyMap = std::map<std::string, uint64_t>;

// |a ∩ b| / |a ∪ b| over sorted, duplicate-free ranges; 0 when both are empty.
double Jaccard(std::span<const std::string> a, std::span<const std::string> b);

// Sum of Jaccard(s, candidate) * C_s over the executed records of history.
double SimilarityScore(const ApiGroup& candidate,
                       std::span<const GroupRecord> history);

// Shannon entropy in bits of the normalized frequency distribution.
double PoolEntropy(const FrequencyMap& frequencies);

// Entropy after counting each member of candidate once more, minus the
// entropy before.
double EntropyGain(const ApiGroup& candidate, const FrequencyMap& frequencies);

// v dominates w when v >= w in every objective and v > w in at least one.
bool Dominates(const ObjectiveVector& v, const ObjectiveVector& w);

// Nondominated-sorting rank of every vector (0 = first front).
std::vector<int> ParetoRank(std::span<const ObjectiveVector> vectors);

// Peels fronts until at least `needed` indices are covered or the input is
// exhausted.
std::vector<std::vector<size_t>> ParetoFronts(
    std::span<const ObjectiveVector> vectors, size_t needed);

struct GroupSchedulerOptions {
  size_t window = 2048;
  // Ablation: pick uniformly from the window instead of Pareto ranking.
  bool random_selection = false;
};

class GroupScheduler {
 public:
  GroupScheduler(std::unique_ptr<GroupEnumerator> source,
                 GroupSchedulerOptions options);

  // Up to k candidates moved to kGenerating. Uniformly random while no group
  // has been executed (bootstrap) or in random-selection mode; otherwise
  // Pareto fronts in order, each front sorted by entropy gain (descending)
  // then by member names. Empty when the candidate space is exhausted.
  std::vector<ApiGroup> SelectBatch(size_t k, Rng& rng);

  // Outcome of driver generation for a group in kGenerating.
  void OnGenerated(const ApiGroup& group, bool accepted, int attempts);
  // Returns a kGenerating group to the candidates (e.g. query budget ran out).
  void Release(const ApiGroup& group);
  // Registers a group whose driver came from outside the generation path.
  void AddSeeded(const ApiGroup& group);
  // Feedback after a slice of one of the group's drivers.
  void OnCoverage(const ApiGroup& group, double normalized_coverage);

  ObjectiveVector Objectives(const ApiGroup& candidate) const;

  const GroupRecord* Find(const ApiGroup& group) const;
  std::vector<GroupRecord> Records() const;
  std::vector<GroupRecord> History() const;
  const FrequencyMap& frequencies() const { return frequencies_; }
  uint64_t pulled() const { return source_->produced(); }
  size_t window_size() const { return window_.size(); }

  nlohmann::json SaveState() const;
  // Expects a scheduler built over a fresh enumerator with the same options
  // that produced the saved state.
  void LoadState(const nlohmann::json& state);

 private:
  size_t Intern(const ApiGroup& group);
  GroupRecord& Require(const ApiGroup& group, GroupStatus expected);
  void FillWindow();
  void CountDriver(const ApiGroup& group);
  void RebuildDerived();
  double IndexedSimilarity(const ApiGroup& candidate) const;
  double FastEntropyGain(const ApiGroup& candidate) const;

  std::unique_ptr<GroupEnumerator> source_;
  GroupSchedulerOptions options_;

  std::vector<GroupRecord> records_;
  std::unordered_map<std::string, size_t> by_key_;
  std::vector<size_t> window_;  // record ids with status kCandidate

  // Derived state, rebuilt on load.
  FrequencyMap frequencies_;
  uint64_t frequency_total_ = 0;
  double frequency_xlogx_ = 0.0;  // sum of c * log2(c)
  std::unordered_map<std::string, std::vector<size_t>> executed_by_api_;
  std::unordered_map<std::string, std::pair<double, int>> api_coverage_;
};

}  // namespace duofuzz

#endif  // DUOFUZZ_GROUP_SCHEDULER_H_
