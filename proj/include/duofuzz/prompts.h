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

// Prompt templates for constraint analysis, driver generation and driver
// repair, plus parsing of the constraint-analysis answer.
//
// Templates use FillTemplate placeholders. Recognized names: {project}
// {group} {signature} {hints} {header} {error} {target} {driver}.
#ifndef DUOFUZZ_PROMPTS_H_
#define DUOFUZZ_PROMPTS_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "duofuzz/api_model.h"
#include "duofuzz/driver.h"
#include "duofuzz/template.h"

namespace duofuzz {

struct PromptTemplates {
  std::string constraint;
  std::string generation;
  std::string repair;
  std::vector<std::string> hints;

  // Built-in templates for the given driver language.
  static PromptTemplates Defaults(DriverLanguage language);
  // Defaults overridden by constraint.txt, generation.txt, repair.txt and
  // hints.txt (one hint per line) when present in `dir`.
  static PromptTemplates Load(const std::filesystem::path& dir,
                              DriverLanguage language);
};

// The nine built-in generation hints.
const std::vector<std::string>& DefaultHints();

struct HeaderFile {
  std::string path;
  std::string text;
};

// Throws std::invalid_argument when no header has content.
std::string BuildConstraintPrompt(const PromptTemplates& templates,
                                  std::span<const HeaderFile> headers);

struct ParsedConstraints {
  std::vector<ImplicitConstraint> constraints;
  std::vector<std::string> rejected_lines;
};

// Accepts lines of the form imply(a, b) / conflict(a, b) (optionally
// bulleted, optionally ending in '.') whose names both resolve in spec.
// Blank lines are ignored; every other line is rejected.
ParsedConstraints ParseImplicitConstraints(std::string_view llm_output,
                                           const LibrarySpec& spec);

// Throws std::invalid_argument for an empty group and UnknownApiError for a
// member missing from spec.
std::string BuildGenerationPrompt(const PromptTemplates& templates,
                                  const LibrarySpec& spec,
                                  const ApiGroup& group);

inline constexpr size_t kDefaultRepairDiagnosticChars = 4000;

// Keeps the first `budget` characters and appends a truncation marker.
std::string TruncateDiagnostics(std::string_view diagnostics, size_t budget);

struct RepairInput {
  std::string project;
  ApiGroup group;
  std::string driver_text;
  std::string diagnostics;
  std::vector<std::string> snippets;
};

// Throws std::invalid_argument when diagnostics are empty. The target
// section is left out when there are no snippets.
std::string BuildRepairPrompt(const PromptTemplates& templates,
                              const RepairInput& input,
                              size_t diagnostic_budget =
                                  kDefaultRepairDiagnosticChars);

}  // namespace duofuzz

#endif  // DUOFUZZ_PROMPTS_H_
