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

// The generate / filter / repair loop that turns an API group into an
// accepted fuzz driver.
#ifndef DUOFUZZ_DRIVER_FACTORY_H_
#define DUOFUZZ_DRIVER_FACTORY_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "duofuzz/api_model.h"
#include "duofuzz/driver.h"
#include "duofuzz/executor.h"
#include "duofuzz/failure_classifier.h"
#include "duofuzz/prompts.h"
#include "duofuzz/retriever.h"
#include "duofuzz/text_gen_client.h"

namespace duofuzz {

enum class GenerationResult {
  kAccepted,
  kRejectedMissingApi,
  kRejectedCompile,
  kRejectedEarlyCrash,
  kExhaustedRetries,
  kBudgetExhausted,
};

std::string_view GenerationResultName(GenerationResult result);

// One rejected answer.
struct AttemptFailure {
  int attempt = 0;
  GenerationResult stage = GenerationResult::kRejectedCompile;
  // Set for compile rejections and for early runs the environment aborted.
  std::optional<FailureCategory> category;
  std::string diagnostics;
};

struct GenerationOutcome {
  GenerationResult result = GenerationResult::kExhaustedRetries;
  std::optional<DriverSource> driver;  // iff accepted
  std::string binary;                  // iff accepted
  std::string diagnostics;             // of the last rejection
  std::optional<FailureCategory> category;
  std::vector<AttemptFailure> failures;
  int queries = 0;
  int compiled = 0;       // answers that passed the compile step
  int early_crashes = 0;  // of which crashed in the short run
};

struct FactoryConfig {
  std::string project;
  DriverLanguage language = DriverLanguage::kToy;
  // Total client queries per group, the first one included.
  int max_retries = 4;
  double temperature = 1.0;
  // Length of the short fuzzing run that filters crashing drivers.
  double early_run_seconds = 15.0;
  size_t repair_diagnostic_chars = kDefaultRepairDiagnosticChars;
  size_t classify_char_budget = kDefaultDiagnosticCharBudget;
  std::optional<std::filesystem::path> source_root;
  size_t max_snippets = kDefaultMaxSnippets;
};

struct FactoryContext {
  const LibrarySpec& spec;
  const PromptTemplates& templates;
  TextGenClient& client;
  Toolchain& toolchain;
  ExecutorAdapter& executor;
  const FactoryConfig& config;
};

// Runs the attempt loop for one group. Stops with kBudgetExhausted before a
// query whose worst-case cost would push the client past cost_budget.
// A ClientError is retried once and then propagates, as does
// EnvironmentError.
GenerationOutcome GenerateDriver(const ApiGroup& group,
                                 const std::string& driver_id,
                                 double cost_budget,
                                 const FactoryContext& context);

}  // namespace duofuzz

#endif  // DUOFUZZ_DRIVER_FACTORY_H_
