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

#include "duofuzz/group_scheduler.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace duofuzz {

using nlohmann::json;

std::string_view GroupStatusName(GroupStatus status) {
  switch (status) {
    case GroupStatus::kCandidate:
      return "candidate";
    case GroupStatus::kGenerating:
      return "generating";
    case GroupStatus::kHasDriver:
      return "has_driver";
    case GroupStatus::kExhausted:
      return "exhausted";
  }
  return "candidate";
}

GroupStatus ParseGroupStatus(std::string_view name) {
  for (auto s : {GroupStatus::kCandidate, GroupStatus::kGenerating,
                 GroupStatus::kHasDriver, GroupStatus::kExhausted}) {
    if (GroupStatusName(s) == name) return s;
  }
  throw std::invalid_argument("unknown group status: " + std::string(name));
}

double Jaccard(std::span<const std::string> a,
               std::span<const std::string> b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const size_t unioned = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(unioned);
}

double SimilarityScore(const ApiGroup& candidate,
                       std::span<const GroupRecord> history) {
  double score = 0.0;
  for (const auto& record : history) {
    if (!record.executed) continue;
    score += Jaccard(record.group.members(), candidate.members()) *
             record.observed_coverage;
  }
  return score;
}

double PoolEntropy(const FrequencyMap& frequencies) {
  uint64_t total = 0;
  for (const auto& [api, count] : frequencies) total += count;
  if (total == 0) return 0.0;
  double entropy = 0.0;
  for (const auto& [api, count] : frequencies) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / static_cast<double>(total);
    entropy -= p * std::log2(p);
  }
  return entropy;
}

double EntropyGain(const ApiGroup& candidate, const FrequencyMap& frequencies) {
  FrequencyMap after = frequencies;
  for (const auto& name : candidate.members()) ++after[name];
  return PoolEntropy(after) - PoolEntropy(frequencies);
}

bool Dominates(const ObjectiveVector& v, const ObjectiveVector& w) {
  const auto a = v.AsArray();
  const auto b = w.AsArray();
  bool strictly = false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strictly = true;
  }
  return strictly;
}

std::vector<std::vector<size_t>> ParetoFronts(
    std::span<const ObjectiveVector> vectors, size_t needed) {
  std::vector<std::vector<size_t>> fronts;
  std::vector<size_t> remaining(vectors.size());
  for (size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  size_t covered = 0;
  while (!remaining.empty() && covered < needed) {
    std::vector<size_t> front;
    std::vector<size_t> rest;
    for (size_t i : remaining) {
      bool dominated = false;
      for (size_t j : remaining) {
        if (j != i && Dominates(vectors[j], vectors[i])) {
          dominated = true;
          break;
        }
      }
      (dominated ? rest : front).push_back(i);
    }
    covered += front.size();
    fronts.push_back(std::move(front));
    remaining = std::move(rest);
  }
  return fronts;
}

std::vector<int> ParetoRank(std::span<const ObjectiveVector> vectors) {
  std::vector<int> ranks(vectors.size(), 0);
  const auto fronts = ParetoFronts(vectors, vectors.size());
  for (size_t r = 0; r < fronts.size(); ++r) {
    for (size_t i : fronts[r]) ranks[i] = static_cast<int>(r);
  }
  return ranks;
}

namespace {

double XLog2X(uint64_t c) {
  if (c == 0) return 0.0;
  const double x = static_cast<double>(c);
  return x * std::log2(x);
}

double EntropyFromSums(uint64_t total, double xlogx) {
  if (total == 0) return 0.0;
  const double t = static_cast<double>(total);
  return std::log2(t) - xlogx / t;
}

}  // namespace

GroupScheduler::GroupScheduler(std::unique_ptr<GroupEnumerator> source,
                               GroupSchedulerOptions options)
    : source_(std::move(source)), options_(options) {
  if (!source_) throw std::invalid_argument("group scheduler needs a source");
  if (options_.window == 0) options_.window = 1;
}

size_t GroupScheduler::Intern(const ApiGroup& group) {
  const std::string key = group.Key();
  auto it = by_key_.find(key);
  if (it != by_key_.end()) return it->second;
  const size_t id = records_.size();
  records_.push_back(GroupRecord{group});
  by_key_.emplace(key, id);
  return id;
}

GroupRecord& GroupScheduler::Require(const ApiGroup& group,
                                     GroupStatus expected) {
  auto it = by_key_.find(group.Key());
  if (it == by_key_.end()) {
    throw std::logic_error("unknown group: " + group.Key());
  }
  GroupRecord& record = records_[it->second];
  if (record.status != expected) {
    throw std::logic_error("group " + group.Key() + " is " +
                           std::string(GroupStatusName(record.status)) +
                           ", expected " +
                           std::string(GroupStatusName(expected)));
  }
  return record;
}

void GroupScheduler::FillWindow() {
  while (window_.size() < options_.window) {
    auto group = source_->Next();
    if (!group) break;
    if (by_key_.count(group->Key())) continue;  // seeded earlier
    window_.push_back(Intern(*group));
  }
}

void GroupScheduler::CountDriver(const ApiGroup& group) {
  for (const auto& name : group.members()) ++frequencies_[name];
  frequency_total_ = 0;
  frequency_xlogx_ = 0.0;
  for (const auto& [name, count] : frequencies_) {
    frequency_total_ += count;
    frequency_xlogx_ += XLog2X(count);
  }
}

double GroupScheduler::FastEntropyGain(const ApiGroup& candidate) const {
  uint64_t total = frequency_total_ + candidate.size();
  double xlogx = frequency_xlogx_;
  for (const auto& name : candidate.members()) {
    auto it = frequencies_.find(name);
    const uint64_t c = it == frequencies_.end() ? 0 : it->second;
    xlogx += XLog2X(c + 1) - XLog2X(c);
  }
  return EntropyFromSums(total, xlogx) -
         EntropyFromSums(frequency_total_, frequency_xlogx_);
}

double GroupScheduler::IndexedSimilarity(const ApiGroup& candidate) const {
  // Only executed groups sharing a member contribute.
  std::vector<std::pair<size_t, int>> overlap;
  for (const auto& name : candidate.members()) {
    auto it = executed_by_api_.find(name);
    if (it == executed_by_api_.end()) continue;
    for (size_t id : it->second) overlap.emplace_back(id, 1);
  }
  std::sort(overlap.begin(), overlap.end());
  double score = 0.0;
  for (size_t i = 0; i < overlap.size();) {
    size_t j = i;
    int common = 0;
    while (j < overlap.size() && overlap[j].first == overlap[i].first) {
      common += overlap[j].second;
      ++j;
    }
    const GroupRecord& record = records_[overlap[i].first];
    const double unioned =
        static_cast<double>(record.group.size() + candidate.size() - common);
    score += static_cast<double>(common) / unioned * record.observed_coverage;
    i = j;
  }
  return score;
}

ObjectiveVector GroupScheduler::Objectives(const ApiGroup& candidate) const {
  ObjectiveVector v;
  v.similarity = IndexedSimilarity(candidate);
  double predicted = 0.0;
  for (const auto& name : candidate.members()) {
    auto it = executed_by_api_.find(name);
    if (it == executed_by_api_.end() || it->second.empty()) continue;
    double sum = 0.0;
    for (size_t id : it->second) sum += records_[id].observed_coverage;
    predicted += sum / static_cast<double>(it->second.size());
  }
  if (!candidate.empty()) {
    predicted /= static_cast<double>(candidate.size());
  }
  v.predicted_coverage = predicted;
  v.neg_length = -static_cast<int>(candidate.size());
  v.entropy_gain = FastEntropyGain(candidate);
  return v;
}

std::vector<ApiGroup> GroupScheduler::SelectBatch(size_t k, Rng& rng) {
  FillWindow();
  std::vector<ApiGroup> batch;
  if (k == 0 || window_.empty()) return batch;
  const size_t take = std::min(k, window_.size());

  const bool bootstrap = executed_by_api_.empty();
  if (bootstrap || options_.random_selection) {
    for (size_t i = 0; i < take; ++i) {
      const size_t j = i + static_cast<size_t>(rng.Uniform(window_.size() - i));
      std::swap(window_[i], window_[j]);
    }
    for (size_t i = 0; i < take; ++i) {
      GroupRecord& record = records_[window_[i]];
      record.status = GroupStatus::kGenerating;
      batch.push_back(record.group);
    }
    window_.erase(window_.begin(), window_.begin() + static_cast<long>(take));
    return batch;
  }

  std::vector<ObjectiveVector> objectives;
  objectives.reserve(window_.size());
  for (size_t id : window_) objectives.push_back(Objectives(records_[id].group));
  const auto fronts = ParetoFronts(objectives, take);

  std::vector<size_t> chosen;  // positions in window_
  for (auto front : fronts) {
    std::sort(front.begin(), front.end(), [&](size_t a, size_t b) {
      if (objectives[a].entropy_gain != objectives[b].entropy_gain) {
        return objectives[a].entropy_gain > objectives[b].entropy_gain;
      }
      return records_[window_[a]].group < records_[window_[b]].group;
    });
    for (size_t pos : front) {
      if (chosen.size() == take) break;
      chosen.push_back(pos);
    }
    if (chosen.size() == take) break;
  }
  for (size_t pos : chosen) {
    GroupRecord& record = records_[window_[pos]];
    record.status = GroupStatus::kGenerating;
    batch.push_back(record.group);
  }
  std::vector<bool> drop(window_.size(), false);
  for (size_t pos : chosen) drop[pos] = true;
  std::vector<size_t> kept;
  kept.reserve(window_.size() - chosen.size());
  for (size_t i = 0; i < window_.size(); ++i) {
    if (!drop[i]) kept.push_back(window_[i]);
  }
  window_ = std::move(kept);
  return batch;
}

void GroupScheduler::OnGenerated(const ApiGroup& group, bool accepted,
                                 int attempts) {
  GroupRecord& record = Require(group, GroupStatus::kGenerating);
  record.attempts += attempts;
  record.status = accepted ? GroupStatus::kHasDriver : GroupStatus::kExhausted;
  if (accepted) CountDriver(group);
}

void GroupScheduler::Release(const ApiGroup& group) {
  GroupRecord& record = Require(group, GroupStatus::kGenerating);
  record.status = GroupStatus::kCandidate;
  window_.push_back(by_key_.at(group.Key()));
}

void GroupScheduler::AddSeeded(const ApiGroup& group) {
  const size_t id = Intern(group);
  GroupRecord& record = records_[id];
  if (record.status == GroupStatus::kHasDriver) return;
  if (record.status == GroupStatus::kCandidate) {
    window_.erase(std::remove(window_.begin(), window_.end(), id),
                  window_.end());
  }
  record.status = GroupStatus::kHasDriver;
  CountDriver(group);
}

void GroupScheduler::OnCoverage(const ApiGroup& group,
                                double normalized_coverage) {
  auto it = by_key_.find(group.Key());
  if (it == by_key_.end()) {
    throw std::logic_error("coverage for unknown group: " + group.Key());
  }
  GroupRecord& record = records_[it->second];
  if (!record.executed) {
    record.executed = true;
    for (const auto& name : group.members()) {
      auto& ids = executed_by_api_[name];
      ids.insert(std::upper_bound(ids.begin(), ids.end(), it->second),
                 it->second);
    }
  }
  record.observed_coverage = std::max(record.observed_coverage,
                                      std::clamp(normalized_coverage, 0.0, 1.0));
}

const GroupRecord* GroupScheduler::Find(const ApiGroup& group) const {
  auto it = by_key_.find(group.Key());
  return it == by_key_.end() ? nullptr : &records_[it->second];
}

std::vector<GroupRecord> GroupScheduler::Records() const { return records_; }

std::vector<GroupRecord> GroupScheduler::History() const {
  std::vector<GroupRecord> history;
  for (const auto& record : records_) {
    if (record.executed) history.push_back(record);
  }
  return history;
}

json GroupScheduler::SaveState() const {
  json records = json::array();
  for (const auto& r : records_) {
    records.push_back({{"members", r.group.members()},
                       {"status", std::string(GroupStatusName(r.status))},
                       {"observed_coverage", r.observed_coverage},
                       {"attempts", r.attempts},
                       {"executed", r.executed}});
  }
  return {{"pulled", pulled()}, {"records", std::move(records)},
          {"window", window_}};
}

void GroupScheduler::LoadState(const json& state) {
  const uint64_t pulled = state.at("pulled").get<uint64_t>();
  if (source_->produced() != 0) {
    throw std::logic_error("group scheduler state loaded into a used source");
  }
  if (source_->Skip(pulled) != pulled) {
    throw std::runtime_error(
        "group enumeration is shorter than the saved position; the spec or "
        "enumeration options changed");
  }
  records_.clear();
  by_key_.clear();
  for (const auto& r : state.at("records")) {
    GroupRecord record;
    record.group = ApiGroup(r.at("members").get<std::vector<std::string>>());
    record.status = ParseGroupStatus(r.at("status").get<std::string>());
    record.observed_coverage = r.at("observed_coverage").get<double>();
    record.attempts = r.at("attempts").get<int>();
    record.executed = r.at("executed").get<bool>();
    by_key_.emplace(record.group.Key(), records_.size());
    records_.push_back(std::move(record));
  }
  window_ = state.at("window").get<std::vector<size_t>>();
  for (size_t id : window_) {
    if (id >= records_.size()) throw std::runtime_error("bad window entry");
  }
  RebuildDerived();
}

void GroupScheduler::RebuildDerived() {
  frequencies_.clear();
  executed_by_api_.clear();
  for (size_t id = 0; id < records_.size(); ++id) {
    const GroupRecord& r = records_[id];
    if (r.status == GroupStatus::kHasDriver) {
      for (const auto& name : r.group.members()) ++frequencies_[name];
    }
    if (r.executed) {
      for (const auto& name : r.group.members()) {
        executed_by_api_[name].push_back(id);
      }
    }
  }
  frequency_total_ = 0;
  frequency_xlogx_ = 0.0;
  for (const auto& [name, count] : frequencies_) {
    frequency_total_ += count;
    frequency_xlogx_ += XLog2X(count);
  }
}

}  // namespace duofuzz
