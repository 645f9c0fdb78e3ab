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

#include <gtest/gtest.h>

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "duofuzz/constraint_engine.h"
#include "test_util.h"

namespace duofuzz {
namespace {

using ::duofuzz::testing::DataDir;
using ::duofuzz::testing::TempDir;

LibrarySpec Kv() {
  return LoadLibrarySpecFile((DataDir() / "kv" / "kv.json").string());
}

TEST(PromptsTest, ConstraintPromptEmbedsHeader) {
  const auto t = PromptTemplates::Defaults(DriverLanguage::kC);
  std::vector<HeaderFile> headers = {{"kv.h", "void kv_close(KvHandle *h);"}};
  const std::string prompt = BuildConstraintPrompt(t, headers);
  EXPECT_NE(prompt.find("// file: kv.h\nvoid kv_close(KvHandle *h);\n"),
            std::string::npos);
  EXPECT_NE(prompt.find("imply(a, b)"), std::string::npos);
  EXPECT_EQ(prompt.find("{header}"), std::string::npos);
}

TEST(PromptsTest, ConstraintPromptConcatenatesHeaders) {
  const auto t = PromptTemplates::Defaults(DriverLanguage::kC);
  std::vector<HeaderFile> headers = {{"a.h", "int a(void);\n"},
                                     {"empty.h", "  \n"},
                                     {"b.h", "int b(void);\n"}};
  const std::string prompt = BuildConstraintPrompt(t, headers);
  const size_t a = prompt.find("// file: a.h");
  const size_t b = prompt.find("// file: b.h");
  ASSERT_NE(a, std::string::npos);
  ASSERT_NE(b, std::string::npos);
  EXPECT_LT(a, b);
  EXPECT_EQ(prompt.find("empty.h"), std::string::npos);
}

TEST(PromptsTest, ConstraintPromptRejectsEmptyHeader) {
  const auto t = PromptTemplates::Defaults(DriverLanguage::kC);
  std::vector<HeaderFile> headers = {{"e.h", "\n\t \n"}};
  EXPECT_THROW(BuildConstraintPrompt(t, headers), std::invalid_argument);
  EXPECT_THROW(BuildConstraintPrompt(t, {}), std::invalid_argument);
}

TEST(PromptsTest, ParsesConstraintLines) {
  const auto spec = Kv();
  const auto parsed = ParseImplicitConstraints(
      "imply(kv_open, kv_close)\n"
      "- conflict(kv_close, kv_iter_free)\n"
      "2. `imply(kv_iter_new, kv_iter_free)`\n"
      "imply(kv_open, kv_close)\n"
      "imply(kv_open, NOT_A_FUNCTION)\n"
      "Here are the constraints I found:\n"
      "conflict(kv_put, kv_put)\n"
      "\n",
      spec);
  ASSERT_EQ(parsed.constraints.size(), 3u);
  EXPECT_EQ(parsed.constraints[0],
            (ImplicitConstraint{ConstraintKind::kImply, "kv_open", "kv_close"}));
  EXPECT_EQ(parsed.constraints[1],
            (ImplicitConstraint{ConstraintKind::kConflict, "kv_close",
                                "kv_iter_free"}));
  EXPECT_EQ(parsed.constraints[2],
            (ImplicitConstraint{ConstraintKind::kImply, "kv_iter_new",
                                "kv_iter_free"}));
  EXPECT_EQ(parsed.rejected_lines,
            (std::vector<std::string>{"imply(kv_open, NOT_A_FUNCTION)",
                                      "Here are the constraints I found:",
                                      "conflict(kv_put, kv_put)"}));
}

TEST(PromptsTest, GenerationPromptHasSignaturesAndHints) {
  const auto spec = Kv();
  const auto t = PromptTemplates::Defaults(DriverLanguage::kC);
  const std::string prompt =
      BuildGenerationPrompt(t, spec, ApiGroup({"kv_open", "kv_close"}));
  EXPECT_NE(prompt.find("API group: kv_close, kv_open"), std::string::npos);
  EXPECT_NE(prompt.find("- kv_open: KvHandle *kv_open(const char *path, int "
                        "flags)"),
            std::string::npos);
  EXPECT_NE(prompt.find("LLVMFuzzerTestOneInput"), std::string::npos);
  ASSERT_EQ(t.hints.size(), 9u);
  for (int i = 1; i <= 9; ++i) {
    EXPECT_NE(prompt.find("\n" + std::to_string(i) + ". "), std::string::npos)
        << i;
  }
  EXPECT_EQ(prompt.find("\n10. "), std::string::npos);
  EXPECT_NE(prompt.find("## Instruction"), std::string::npos);
  EXPECT_NE(prompt.find("## Given API"), std::string::npos);
  EXPECT_NE(prompt.find("## Hint"), std::string::npos);
}

TEST(PromptsTest, GenerationPromptRejectsBadGroups) {
  const auto spec = Kv();
  const auto t = PromptTemplates::Defaults(DriverLanguage::kToy);
  EXPECT_THROW(BuildGenerationPrompt(t, spec, ApiGroup()),
               std::invalid_argument);
  EXPECT_THROW(BuildGenerationPrompt(t, spec, ApiGroup({"kv_nope"})),
               UnknownApiError);
}

TEST(PromptsTest, RepairPromptWithAndWithoutTarget) {
  const auto t = PromptTemplates::Defaults(DriverLanguage::kC);
  RepairInput input;
  input.project = "kv";
  input.group = ApiGroup({"kv_open", "kv_close"});
  input.driver_text = "int main() {}";
  input.diagnostics = "d.c:1:1: error: unknown type name 'KvStore'";

  const std::string plain = BuildRepairPrompt(t, input);
  EXPECT_EQ(plain.find("## Target"), std::string::npos);
  EXPECT_NE(plain.find("## Error\nd.c:1:1: error: unknown type name"),
            std::string::npos);
  EXPECT_NE(plain.find("## Driver\nint main() {}"), std::string::npos);

  input.snippets = {"// kv.h:14\ntypedef struct KvHandle {\n} KvHandle;"};
  const std::string targeted = BuildRepairPrompt(t, input);
  const size_t target = targeted.find("## Target\n// kv.h:14\n");
  ASSERT_NE(target, std::string::npos);
  EXPECT_LT(targeted.find("## Error"), target);
  EXPECT_LT(target, targeted.find("## Driver"));
}

TEST(PromptsTest, RepairPromptNeedsDiagnostics) {
  const auto t = PromptTemplates::Defaults(DriverLanguage::kC);
  RepairInput input;
  input.group = ApiGroup({"kv_open"});
  input.diagnostics = "  \n";
  EXPECT_THROW(BuildRepairPrompt(t, input), std::invalid_argument);
}

TEST(PromptsTest, TruncationMarker) {
  const std::string text(100, 'x');
  EXPECT_EQ(TruncateDiagnostics(text, 100), text);
  const std::string cut = TruncateDiagnostics(text, 40);
  EXPECT_EQ(cut, std::string(40, 'x') + "\n[... truncated 60 characters]");

  const auto t = PromptTemplates::Defaults(DriverLanguage::kC);
  RepairInput input;
  input.group = ApiGroup({"kv_open"});
  input.diagnostics = std::string(5000, 'e');
  const std::string prompt = BuildRepairPrompt(t, input, 1000);
  EXPECT_NE(prompt.find("[... truncated 4000 characters]"), std::string::npos);
  EXPECT_EQ(prompt.find(std::string(1001, 'e')), std::string::npos);
}

TEST(PromptsTest, LoadOverridesFromDirectory) {
  TempDir dir;
  std::ofstream(dir.path() / "generation.txt") << "G {group} {hints}";
  std::ofstream(dir.path() / "hints.txt") << "first\n\n  second  \n";
  const auto t = PromptTemplates::Load(dir.path(), DriverLanguage::kC);
  EXPECT_EQ(t.hints, (std::vector<std::string>{"first", "second"}));
  EXPECT_EQ(t.repair, PromptTemplates::Defaults(DriverLanguage::kC).repair);
  EXPECT_EQ(BuildGenerationPrompt(t, Kv(), ApiGroup({"kv_version"})),
            "G kv_version 1. first\n2. second\n");
}

}  // namespace
}  // namespace duofuzz
