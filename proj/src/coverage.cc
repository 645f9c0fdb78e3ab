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

#include "duofuzz/coverage.h"

#include <utility>

namespace duofuzz {

CoverageMap::CoverageMap(std::set<std::string> regions,
                         std::optional<uint64_t> total_regions)
    : regions_(std::move(regions)), total_(total_regions) {
  CheckBound();
}

void CoverageMap::CheckBound() const {
  if (total_ && regions_.size() > *total_) {
    throw CoverageConflictError("coverage holds " +
                                std::to_string(regions_.size()) +
                                " regions but total is " +
                                std::to_string(*total_));
  }
}

bool CoverageMap::Insert(const std::string& region) {
  const bool added = regions_.insert(region).second;
  if (added) CheckBound();
  return added;
}

size_t CoverageMap::MergeFrom(const CoverageMap& other) {
  if (total_ && other.total_ && *total_ != *other.total_) {
    throw CoverageConflictError("cannot merge coverage with totals " +
                                std::to_string(*total_) + " and " +
                                std::to_string(*other.total_));
  }
  if (!total_) total_ = other.total_;
  const size_t before = regions_.size();
  regions_.insert(other.regions_.begin(), other.regions_.end());
  CheckBound();
  return regions_.size() - before;
}

double CoverageMap::Normalized() const {
  if (!total_ || *total_ == 0) return 0.0;
  return static_cast<double>(regions_.size()) / static_cast<double>(*total_);
}

nlohmann::json CoverageMap::ToJson() const {
  return {{"regions", regions_},
          {"total_regions", total_ ? nlohmann::json(*total_) : nlohmann::json()}};
}

CoverageMap CoverageMap::FromJson(const nlohmann::json& j) {
  std::optional<uint64_t> total;
  if (j.contains("total_regions") && !j.at("total_regions").is_null()) {
    total = j.at("total_regions").get<uint64_t>();
  }
  return CoverageMap(j.at("regions").get<std::set<std::string>>(), total);
}

CoverageMap MergeCoverage(const CoverageMap& a, const CoverageMap& b) {
  CoverageMap out = a;
  out.MergeFrom(b);
  return out;
}

}  // namespace duofuzz
