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

// duofuzz command-line interface.
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "duofuzz/api_model.h"
#include "duofuzz/campaign.h"
#include "duofuzz/constraint_engine.h"
#include "duofuzz/failure_classifier.h"
#include "duofuzz/prompts.h"
#include "json.hpp"

namespace {

std::string ReadInput(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin),
            std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int Solve(const std::string& spec_path, duofuzz::EnumerateOptions options,
          bool loose, bool count_only) {
  const duofuzz::LibrarySpec spec = duofuzz::LoadLibrarySpecFile(spec_path);
  const duofuzz::DependencyIndex index(spec, loose);
  duofuzz::GroupEnumerator enumerator(spec, index, options);
  uint64_t count = 0;
  while (auto group = enumerator.Next()) {
    ++count;
    if (!count_only) std::cout << group->Key() << "\n";
  }
  if (count_only) std::cout << count << "\n";
  return 0;
}

int Classify(const std::string& path, size_t budget) {
  const std::string text = ReadInput(path);
  std::cout << duofuzz::FailureCategoryTag(
                   duofuzz::ClassifyFailure(text, budget))
            << "\n";
  return 0;
}

int InferConstraints(const std::string& spec_path, const std::string& answer,
                     const std::string& write_path) {
  duofuzz::LibrarySpec spec = duofuzz::LoadLibrarySpecFile(spec_path);
  const duofuzz::ParsedConstraints parsed =
      duofuzz::ParseImplicitConstraints(ReadInput(answer), spec);
  for (const auto& c : parsed.constraints) std::cout << c.ToString() << "\n";
  for (const auto& line : parsed.rejected_lines) {
    std::cerr << "rejected: " << line << "\n";
  }
  if (!write_path.empty()) {
    for (const auto& c : parsed.constraints) {
      if (std::find(spec.implicit.begin(), spec.implicit.end(), c) ==
          spec.implicit.end()) {
        spec.implicit.push_back(c);
      }
    }
    std::ofstream out(write_path, std::ios::binary | std::ios::trunc);
    out << duofuzz::SaveLibrarySpec(spec);
    if (!out) throw std::runtime_error("cannot write " + write_path);
  }
  return 0;
}

int ConstraintPrompt(const std::vector<std::string>& headers,
                     const std::string& prompts_dir) {
  std::vector<duofuzz::HeaderFile> files;
  for (const auto& h : headers) files.push_back({h, ReadInput(h)});
  const auto templates =
      prompts_dir.empty()
          ? duofuzz::PromptTemplates::Defaults(duofuzz::DriverLanguage::kC)
          : duofuzz::PromptTemplates::Load(prompts_dir,
                                           duofuzz::DriverLanguage::kC);
  std::cout << duofuzz::BuildConstraintPrompt(templates, files);
  return 0;
}

void PrintSummary(const duofuzz::Campaign& campaign) {
  std::cout << duofuzz::RenderReport(campaign.Report(),
                                     duofuzz::ReportFormat::kTable);
  std::cout << "\nstate written to "
            << (campaign.config().output_dir / "state.json").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"duofuzz: API-group driven fuzz-driver generation and "
               "scheduling"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand(
      "solve", "Enumerate valid and rational API groups of a spec");
  std::string solve_spec;
  duofuzz::EnumerateOptions solve_options;
  bool solve_loose = false;
  bool solve_count = false;
  bool solve_no_implicit = false;
  bool solve_no_explicit = false;
  solve->add_option("--spec", solve_spec, "LibrarySpec JSON")->required();
  solve->add_option("--min", solve_options.min_size, "Smallest group size");
  solve->add_option("--max", solve_options.max_size, "Largest group size");
  solve->add_option("--max-group-len", solve_options.max_group_len,
                    "Configured limit on --max");
  solve->add_option("--cap", solve_options.cap, "Stop after this many groups");
  solve->add_option("--order-seed", solve_options.order_seed,
                    "Shuffle the API order (0 keeps sorted order)");
  solve->add_flag("--loose", solve_loose,
                  "Let T and T* match in dependency checks");
  solve->add_flag("--no-implicit", solve_no_implicit,
                  "Ignore imply/conflict constraints");
  solve->add_flag("--no-explicit", solve_no_explicit,
                  "Ignore type dependencies (every subset is valid)");
  solve->add_flag("--count", solve_count, "Print only the number of groups");

  // classify
  auto* classify = app.add_subcommand(
      "classify", "Classify build or run diagnostics into a failure category");
  std::string classify_file;
  size_t classify_budget = duofuzz::kDefaultDiagnosticCharBudget;
  classify->add_option("file", classify_file,
                       "Diagnostics file (default: standard input)");
  classify->add_option("--char-budget", classify_budget,
                       "Length above which diagnostics count as G5");

  // constraint prompt / inference
  auto* cprompt = app.add_subcommand(
      "constraint-prompt", "Print the implicit-constraint analysis prompt");
  std::vector<std::string> cprompt_headers;
  std::string cprompt_dir;
  cprompt->add_option("headers", cprompt_headers, "Header files")->required();
  cprompt->add_option("--prompts", cprompt_dir, "Template directory");

  auto* infer = app.add_subcommand(
      "infer-constraints",
      "Parse a constraint-analysis answer against a spec");
  std::string infer_spec;
  std::string infer_answer;
  std::string infer_write;
  infer->add_option("--spec", infer_spec, "LibrarySpec JSON")->required();
  infer->add_option("--answer", infer_answer,
                    "Answer text (default: standard input)");
  infer->add_option("--write", infer_write,
                    "Write the spec with the accepted constraints added");

  // campaign
  auto* campaign = app.add_subcommand("campaign", "Run fuzzing campaigns");
  campaign->require_subcommand(1);

  auto* run = campaign->add_subcommand("run", "Start a campaign");
  std::string run_config;
  std::string run_out;
  std::optional<uint64_t> run_rounds;
  std::optional<uint64_t> run_seed;
  bool no_implicit = false;
  bool random_groups = false;
  bool round_robin = false;
  run->add_option("--config", run_config, "Campaign config (JSON)")
      ->required();
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--rounds", run_rounds, "Number of rounds K");
  run->add_option("--seed", run_seed, "RNG seed");
  run->add_flag("--no-implicit", no_implicit,
                "Ablation: ignore implicit constraints");
  run->add_flag("--random-groups", random_groups,
                "Ablation: pick groups uniformly at random");
  run->add_flag("--round-robin-drivers", round_robin,
                "Ablation: run drivers round-robin");

  auto* resume = campaign->add_subcommand("resume", "Continue a campaign");
  std::string resume_state;
  std::string resume_config;
  std::optional<uint64_t> resume_rounds;
  resume->add_option("--state", resume_state, "Saved state.json")->required();
  resume->add_option("--config", resume_config,
                     "Config carrying new round or wall-clock limits");
  resume->add_option("--rounds", resume_rounds, "New total round limit");

  auto* report = campaign->add_subcommand("report", "Print a campaign report");
  std::string report_state;
  std::string report_format = "table";
  report->add_option("--state", report_state, "Saved state.json")->required();
  report->add_option("--format", report_format, "json, table or csv")
      ->check(CLI::IsMember({"json", "table", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      solve_options.check_implicit = !solve_no_implicit;
      solve_options.check_explicit = !solve_no_explicit;
      return Solve(solve_spec, solve_options, solve_loose, solve_count);
    }
    if (*classify) return Classify(classify_file, classify_budget);
    if (*cprompt) return ConstraintPrompt(cprompt_headers, cprompt_dir);
    if (*infer) return InferConstraints(infer_spec, infer_answer, infer_write);
    if (*run) {
      duofuzz::CampaignConfig config =
          duofuzz::CampaignConfig::Load(run_config);
      if (!run_out.empty()) config.output_dir = run_out;
      if (run_rounds) config.rounds = *run_rounds;
      if (run_seed) config.seed = *run_seed;
      config.ablation.no_implicit |= no_implicit;
      config.ablation.random_groups |= random_groups;
      config.ablation.round_robin_drivers |= round_robin;
      duofuzz::Campaign c(std::move(config));
      c.Persist();
      c.Run();
      PrintSummary(c);
      return 0;
    }
    if (*resume) {
      std::optional<duofuzz::CampaignConfig> config;
      if (!resume_config.empty()) {
        config = duofuzz::CampaignConfig::Load(resume_config);
      }
      std::ifstream in(resume_state, std::ios::binary);
      if (!in) throw std::runtime_error("cannot read " + resume_state);
      nlohmann::json state = nlohmann::json::parse(in, nullptr, false);
      if (state.is_discarded()) {
        throw std::runtime_error("cannot parse campaign state " +
                                 resume_state);
      }
      if (resume_rounds) {
        if (!config) {
          config = duofuzz::CampaignConfig::FromJson(state.at("config"));
        }
        config->rounds = *resume_rounds;
      }
      auto c = duofuzz::Campaign::Resume(state, config);
      c->Run();
      PrintSummary(*c);
      return 0;
    }
    if (*report) {
      std::ifstream in(report_state, std::ios::binary);
      if (!in) throw std::runtime_error("cannot read " + report_state);
      nlohmann::json state = nlohmann::json::parse(in, nullptr, false);
      if (state.is_discarded()) {
        throw std::runtime_error("cannot parse campaign state " +
                                 report_state);
      }
      std::cout << duofuzz::RenderReport(
          duofuzz::ReportFromState(state),
          duofuzz::ParseReportFormat(report_format));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
