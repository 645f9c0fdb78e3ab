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

#include "duofuzz/driver_factory.h"

#include "duofuzz/coverage.h"

namespace duofuzz {

std::string_view GenerationResultName(GenerationResult result) {
  switch (result) {
    case GenerationResult::kAccepted:
      return "accepted";
    case GenerationResult::kRejectedMissingApi:
      return "rejected_missing_api";
    case GenerationResult::kRejectedCompile:
      return "rejected_compile";
    case GenerationResult::kRejectedEarlyCrash:
      return "rejected_early_crash";
    case GenerationResult::kExhaustedRetries:
      return "exhausted_retries";
    case GenerationResult::kBudgetExhausted:
      return "budget_exhausted";
  }
  return "unknown";
}

namespace {

std::string Query(TextGenClient& client, const std::string& prompt,
                  double temperature) {
  try {
    return client.Complete(prompt, temperature);
  } catch (const ClientError&) {
    return client.Complete(prompt, temperature);
  }
}

}  // namespace

GenerationOutcome GenerateDriver(const ApiGroup& group,
                                 const std::string& driver_id,
                                 double cost_budget,
                                 const FactoryContext& context) {
  const FactoryConfig& config = context.config;
  GenerationOutcome outcome;
  std::string previous_text;
  std::vector<std::string> snippets;

  for (int attempt = 0; attempt < config.max_retries; ++attempt) {
    std::string prompt;
    if (attempt == 0) {
      prompt = BuildGenerationPrompt(context.templates, context.spec, group);
    } else {
      prompt = BuildRepairPrompt(
          context.templates,
          RepairInput{config.project, group, previous_text,
                      outcome.diagnostics, snippets},
          config.repair_diagnostic_chars);
    }
    if (context.client.accumulated_cost() +
            context.client.MaxQueryCost(prompt) >
        cost_budget) {
      outcome.result = GenerationResult::kBudgetExhausted;
      return outcome;
    }
    const std::string answer =
        Query(context.client, prompt, config.temperature);
    ++outcome.queries;

    DriverSource driver{driver_id, group, config.language,
                        StripCodeFences(answer), attempt};
    previous_text = driver.text;
    snippets.clear();

    auto reject = [&](GenerationResult stage, std::string diagnostics,
                      std::optional<FailureCategory> category) {
      outcome.diagnostics = std::move(diagnostics);
      outcome.category = category;
      outcome.failures.push_back(
          AttemptFailure{attempt, stage, category, outcome.diagnostics});
    };

    const std::vector<std::string> missing = MissingApis(driver, group);
    if (!missing.empty()) {
      std::string diagnostics = "error: the driver does not call:";
      for (const auto& name : missing) diagnostics += " " + name;
      reject(GenerationResult::kRejectedMissingApi, diagnostics + "\n",
             std::nullopt);
      continue;
    }

    const CompileResult compiled = context.toolchain.Compile(driver);
    if (!compiled.ok) {
      const std::string diagnostics = compiled.diagnostics.empty()
                                          ? "error: compilation failed\n"
                                          : compiled.diagnostics;
      for (const auto& s :
           RetrieveContext(diagnostics, config.source_root,
                           config.max_snippets)) {
        snippets.push_back(s.Render());
      }
      reject(GenerationResult::kRejectedCompile, diagnostics,
             ClassifyFailure(diagnostics, config.classify_char_budget));
      continue;
    }
    ++outcome.compiled;

    const CoverageMap empty(context.executor.total_regions());
    const SliceReport early = context.executor.RunSlice(
        SliceRequest{driver, compiled.binary, empty, 0,
                     config.early_run_seconds});
    if (early.crashed) {
      ++outcome.early_crashes;
      reject(GenerationResult::kRejectedEarlyCrash,
             "the driver crashed during the short fuzzing run:\n" +
                 early.crash_info.value_or(""),
             std::nullopt);
      continue;
    }
    if (early.failed) {
      reject(GenerationResult::kRejectedEarlyCrash,
             "the short fuzzing run was aborted: " + early.failure_detail,
             early.failure);
      continue;
    }

    outcome.result = GenerationResult::kAccepted;
    outcome.driver = std::move(driver);
    outcome.binary = compiled.binary;
    outcome.diagnostics.clear();
    outcome.category.reset();
    return outcome;
  }
  outcome.result = GenerationResult::kExhaustedRetries;
  return outcome;
}

}  // namespace duofuzz
