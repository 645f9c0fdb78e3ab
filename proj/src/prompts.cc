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

#include "duofuzz/prompts.h"

#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "duofuzz/constraint_engine.h"

namespace duofuzz {

namespace {

constexpr std::string_view kConstraintTemplate =
    R"(You are reviewing the public interface of a C/C++ library to find usage
constraints between pairs of its functions.

There are two kinds of constraints:
- imply(foo, bar): a fuzz driver that calls foo must also call bar, for
  example because bar releases a resource that foo acquires.
- conflict(foo, bar): a fuzz driver must not call both foo and bar, for
  example because both release the same resource.

Header file:
{header}

Answer with one constraint per line, using only the forms imply(a, b) and
conflict(a, b), where a and b are functions declared in the header above.
Write nothing else.
)";

constexpr std::string_view kGenerationTemplateC =
    R"(## Instruction
Write a libFuzzer fuzz driver for the {project} library. The driver must
define `extern "C" int LLVMFuzzerTestOneInput(const uint8_t *data, size_t size)`
and call every API of the group below, passing them values derived from the
fuzz input. Reply with the complete source file only.

## Given API
Project: {project}
API group: {group}
Signatures:
{signature}

## Hint
{hints}
)";

constexpr std::string_view kGenerationTemplateToy =
    R"(## Instruction
Write a fuzz driver script for the {project} library in the call language:
one statement per line, each of the form `call <api>` optionally followed by
`$input` or literal arguments; lines starting with '#' are comments. The
script must call every API of the group below. Reply with the script only.

## Given API
Project: {project}
API group: {group}
Signatures:
{signature}

## Hint
{hints}
)";

constexpr std::string_view kRepairTemplate =
    R"(## Instruction
The fuzz driver below for the {project} library was rejected. Fix it and
reply with the complete corrected driver only. It must still call every API
of the group.
API group: {group}

## Error
{error}

{target}## Driver
{driver}
)";

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string JoinGroup(const ApiGroup& group) {
  std::string out;
  for (const auto& name : group.members()) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

}  // namespace

const std::vector<std::string>& DefaultHints() {
  static const std::vector<std::string> hints = {
      "Use exactly the entry-point signature given in the instruction.",
      "Consume bytes only from the fuzz input; do not read other sources.",
      "Check the return value of every call before using its result.",
      "Free or close every resource the driver acquires before returning.",
      "Do not write to the file system.",
      "Do not write loops that may never terminate.",
      "Call the APIs in an order where every required setup call comes "
      "first.",
      "Check the input length before casting or copying input bytes.",
      "Do not keep global state between invocations of the entry point.",
  };
  return hints;
}

PromptTemplates PromptTemplates::Defaults(DriverLanguage language) {
  PromptTemplates t;
  t.constraint = std::string(kConstraintTemplate);
  t.generation = std::string(language == DriverLanguage::kToy
                                 ? kGenerationTemplateToy
                                 : kGenerationTemplateC);
  t.repair = std::string(kRepairTemplate);
  t.hints = DefaultHints();
  return t;
}

PromptTemplates PromptTemplates::Load(const std::filesystem::path& dir,
                                      DriverLanguage language) {
  PromptTemplates t = Defaults(language);
  if (std::filesystem::exists(dir / "constraint.txt")) {
    t.constraint = ReadTextFile(dir / "constraint.txt");
  }
  if (std::filesystem::exists(dir / "generation.txt")) {
    t.generation = ReadTextFile(dir / "generation.txt");
  }
  if (std::filesystem::exists(dir / "repair.txt")) {
    t.repair = ReadTextFile(dir / "repair.txt");
  }
  if (std::filesystem::exists(dir / "hints.txt")) {
    t.hints.clear();
    std::istringstream in(ReadTextFile(dir / "hints.txt"));
    std::string line;
    while (std::getline(in, line)) {
      line = Trim(line);
      if (!line.empty()) t.hints.push_back(line);
    }
  }
  return t;
}

std::string BuildConstraintPrompt(const PromptTemplates& templates,
                                  std::span<const HeaderFile> headers) {
  std::string body;
  for (const auto& header : headers) {
    if (Trim(header.text).empty()) continue;
    if (!body.empty()) body += "\n";
    body += "// file: " + header.path + "\n" + header.text;
    if (body.back() != '\n') body += '\n';
  }
  if (body.empty()) {
    throw std::invalid_argument("constraint prompt needs a non-empty header");
  }
  return FillTemplate(templates.constraint, {{"header", body}});
}

ParsedConstraints ParseImplicitConstraints(std::string_view llm_output,
                                           const LibrarySpec& spec) {
  static const std::regex kLine(
      R"(^\s*(?:[-*]\s*|\d+[.)]\s*)?`?(imply|conflict)\s*\(\s*([A-Za-z_][\w:~]*)\s*,\s*([A-Za-z_][\w:~]*)\s*\)`?\s*\.?\s*$)");
  std::set<std::string> names;
  for (const auto& api : spec.apis) names.insert(api.name);

  ParsedConstraints parsed;
  std::set<ImplicitConstraint> seen;
  std::istringstream in{std::string(llm_output)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    std::smatch m;
    if (!std::regex_match(line, m, kLine) || !names.count(m[2]) ||
        !names.count(m[3]) || m[2] == m[3]) {
      parsed.rejected_lines.push_back(line);
      continue;
    }
    ImplicitConstraint c{m[1] == "imply" ? ConstraintKind::kImply
                                         : ConstraintKind::kConflict,
                         m[2], m[3]};
    if (seen.insert(c).second) parsed.constraints.push_back(std::move(c));
  }
  return parsed;
}

std::string BuildGenerationPrompt(const PromptTemplates& templates,
                                  const LibrarySpec& spec,
                                  const ApiGroup& group) {
  if (group.empty()) {
    throw std::invalid_argument("generation prompt needs a non-empty group");
  }
  std::string signatures;
  for (const auto& name : group.members()) {
    const ApiFunction* api = spec.Find(name);
    if (!api) throw UnknownApiError(name);
    signatures += "- " + name + ": " + api->signature + "\n";
  }
  std::string hints;
  for (size_t i = 0; i < templates.hints.size(); ++i) {
    hints += std::to_string(i + 1) + ". " + templates.hints[i] + "\n";
  }
  return FillTemplate(templates.generation, {{"project", spec.library_name},
                                             {"group", JoinGroup(group)},
                                             {"signature", signatures},
                                             {"hints", hints}});
}

std::string TruncateDiagnostics(std::string_view diagnostics, size_t budget) {
  if (diagnostics.size() <= budget) return std::string(diagnostics);
  return std::string(diagnostics.substr(0, budget)) + "\n[... truncated " +
         std::to_string(diagnostics.size() - budget) + " characters]";
}

std::string BuildRepairPrompt(const PromptTemplates& templates,
                              const RepairInput& input,
                              size_t diagnostic_budget) {
  if (Trim(input.diagnostics).empty()) {
    throw std::invalid_argument("repair prompt needs diagnostics");
  }
  std::string target;
  if (!input.snippets.empty()) {
    target = "## Target\n";
    for (const auto& snippet : input.snippets) {
      target += snippet;
      if (target.back() != '\n') target += '\n';
    }
    target += "\n";
  }
  return FillTemplate(
      templates.repair,
      {{"project", input.project},
       {"group", JoinGroup(input.group)},
       {"error", TruncateDiagnostics(input.diagnostics, diagnostic_budget)},
       {"target", target},
       {"driver", input.driver_text}});
}

}  // namespace duofuzz
