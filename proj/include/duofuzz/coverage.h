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

#ifndef DUOFUZZ_COVERAGE_H_
#define DUOFUZZ_COVERAGE_H_

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace duofuzz {

class CoverageConflictError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A set of opaque covered-region identifiers plus, when known, the number of
// instrumented regions used to normalize it.
class CoverageMap {
 public:
  CoverageMap() = default;
  explicit CoverageMap(std::optional<uint64_t> total_regions)
      : total_(total_regions) {}
  CoverageMap(std::set<std::string> regions,
              std::optional<uint64_t> total_regions);

  const std::set<std::string>& regions() const { return regions_; }
  std::optional<uint64_t> total_regions() const { return total_; }
  size_t size() const { return regions_.size(); }
  bool empty() const { return regions_.empty(); }
  bool Contains(const std::string& region) const {
    return regions_.count(region) > 0;
  }

  // Returns true when the region was not covered before.
  bool Insert(const std::string& region);
  // Set union; returns the number of regions that were new. Throws
  // CoverageConflictError when both sides know different totals.
  size_t MergeFrom(const CoverageMap& other);
  // |regions| / total, or 0 when the total is unknown or zero.
  double Normalized() const;

  nlohmann::json ToJson() const;
  static CoverageMap FromJson(const nlohmann::json& j);

  bool operator==(const CoverageMap&) const = default;

 private:
  void CheckBound() const;

  std::set<std::string> regions_;
  std::optional<uint64_t> total_;
};

CoverageMap MergeCoverage(const CoverageMap& a, const CoverageMap& b);

}  // namespace duofuzz

#endif  // DUOFUZZ_COVERAGE_H_
