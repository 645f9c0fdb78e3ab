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

// Substring-pattern classification of driver build and run failures.
#ifndef DUOFUZZ_FAILURE_CLASSIFIER_H_
#define DUOFUZZ_FAILURE_CLASSIFIER_H_

#include <cstddef>
#include <span>
#include <string_view>

namespace duofuzz {

enum class FailureCategory {
  kCorruptedCode,          // G1
  kLanguageBasics,         // G2
  kNonexistingIdentifier,  // G3
  kTypeError,              // G4
  kTokenLimit,             // G5
  kOutOfSpace,             // G6
  kUnknown,
};

inline constexpr FailureCategory kAllFailureCategories[] = {
    FailureCategory::kCorruptedCode,  FailureCategory::kLanguageBasics,
    FailureCategory::kNonexistingIdentifier, FailureCategory::kTypeError,
    FailureCategory::kTokenLimit,     FailureCategory::kOutOfSpace,
    FailureCategory::kUnknown,
};

// "G1_corrupted", ..., "unknown".
std::string_view FailureCategoryTag(FailureCategory category);
// Throws std::invalid_argument for an unknown tag.
FailureCategory ParseFailureCategory(std::string_view tag);

std::span<const std::string_view> FailurePatterns(FailureCategory category);

// Diagnostics longer than this many characters cannot be fed back to the
// text-generation client (about 16k tokens at 4 characters per token).
inline constexpr size_t kDefaultDiagnosticCharBudget = 16385 * 4;

// First category in G1..G6 order with a pattern hit. G5 also fires when the
// text is longer than char_budget.
FailureCategory ClassifyFailure(
    std::string_view diagnostics,
    size_t char_budget = kDefaultDiagnosticCharBudget);

}  // namespace duofuzz

#endif  // DUOFUZZ_FAILURE_CLASSIFIER_H_
