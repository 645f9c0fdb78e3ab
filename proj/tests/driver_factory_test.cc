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

#include <gtest/gtest.h>

#include <memory>
#include <string>
#include <vector>

#include "test_util.h"

namespace duofuzz {
namespace {

using ::duofuzz::testing::DataDir;

// Throws ClientError on the queries listed in `fail_on` (0-based).
class FlakyClient : public TextGenClient {
 public:
  FlakyClient(std::vector<int> fail_on, std::string answer)
      : fail_on_(std::move(fail_on)), answer_(std::move(answer)) {}
  std::string Complete(const std::string&, double) override {
    const int n = calls_++;
    for (int f : fail_on_) {
      if (f == n) throw ClientError("transient");
    }
    ++queries_;
    return answer_;
  }
  double accumulated_cost() const override { return 0.0; }
  uint64_t queries() const override { return queries_; }
  double MaxQueryCost(const std::string&) const override { return 0.0; }
  nlohmann::json SaveState() const override { return {}; }
  void LoadState(const nlohmann::json&) override {}

  int calls() const { return calls_; }

 private:
  std::vector<int> fail_on_;
  std::string answer_;
  int calls_ = 0;
  uint64_t queries_ = 0;
};

class DriverFactoryTest : public ::testing::Test {
 protected:
  DriverFactoryTest()
      : spec_(LoadLibrarySpecFile((DataDir() / "kv" / "kv.json").string())),
        templates_(PromptTemplates::Defaults(DriverLanguage::kToy)),
        toolchain_(spec_),
        sim_(spec_, QuietSim(), 1) {
    config_.project = "kv";
    config_.source_root = DataDir() / "kv" / "src";
  }

  static SimConfig QuietSim() {
    SimConfig c;
    c.crash_probability = 0.0;
    return c;
  }

  GenerationOutcome Run(TextGenClient& client, const ApiGroup& group,
                        double budget = 1e9) {
    FactoryContext ctx{spec_, templates_, client, toolchain_, sim_, config_};
    return GenerateDriver(group, "drv-00001", budget, ctx);
  }

  LibrarySpec spec_;
  PromptTemplates templates_;
  ToyToolchain toolchain_;
  SimulatedAdapter sim_;
  FactoryConfig config_;
};

const char kGood[] = "```\ncall kv_open $input\ncall kv_close\n```\n";

TEST_F(DriverFactoryTest, AcceptsOnFirstAttempt) {
  ScriptedClient client({kGood});
  const auto out = Run(client, ApiGroup({"kv_open", "kv_close"}));
  ASSERT_EQ(out.result, GenerationResult::kAccepted);
  ASSERT_TRUE(out.driver.has_value());
  EXPECT_EQ(out.driver->generation, 0);
  EXPECT_EQ(out.driver->text, "call kv_open $input\ncall kv_close\n");
  EXPECT_EQ(out.driver->id, "drv-00001");
  EXPECT_EQ(out.binary, "toy:drv-00001");
  EXPECT_EQ(out.queries, 1);
  EXPECT_EQ(out.compiled, 1);
  EXPECT_TRUE(out.failures.empty());
  EXPECT_NE(client.prompts()[0].find("## Given API"), std::string::npos);
}

TEST_F(DriverFactoryTest, RepairsAfterMissingApiAndCompileError) {
  ScriptedClient client({"call kv_open\n",
                         "call kv_open\ncall kv_close\ncall kv_nope\n", kGood});
  const auto out = Run(client, ApiGroup({"kv_open", "kv_close"}));
  ASSERT_EQ(out.result, GenerationResult::kAccepted);
  EXPECT_EQ(out.driver->generation, 2);
  EXPECT_EQ(out.queries, 3);
  ASSERT_EQ(out.failures.size(), 2u);
  EXPECT_EQ(out.failures[0].stage, GenerationResult::kRejectedMissingApi);
  EXPECT_EQ(out.failures[0].attempt, 0);
  EXPECT_FALSE(out.failures[0].category.has_value());
  EXPECT_EQ(out.failures[1].stage, GenerationResult::kRejectedCompile);
  EXPECT_EQ(out.failures[1].category,
            FailureCategory::kNonexistingIdentifier);

  const auto prompts = client.prompts();
  ASSERT_EQ(prompts.size(), 3u);
  EXPECT_NE(prompts[1].find("the driver does not call: kv_close"),
            std::string::npos);
  EXPECT_NE(prompts[1].find("## Driver\ncall kv_open"), std::string::npos);
  EXPECT_NE(prompts[2].find("undeclared identifier 'kv_nope'"),
            std::string::npos);
}

TEST_F(DriverFactoryTest, RepairPromptCarriesRetrievedDefinition) {
  ScriptedClient client(
      {"call kv_open\ncall kv_close\ncall KvHandle\n", kGood});
  const auto out = Run(client, ApiGroup({"kv_open", "kv_close"}));
  ASSERT_EQ(out.result, GenerationResult::kAccepted);
  const auto prompts = client.prompts();
  ASSERT_EQ(prompts.size(), 2u);
  EXPECT_NE(prompts[1].find("## Target\n// kv.h:"), std::string::npos);
  EXPECT_NE(prompts[1].find("typedef struct KvHandle {"), std::string::npos);
}

TEST_F(DriverFactoryTest, StopsAfterFourQueries) {
  ScriptedClient client({"call kv_open $input)\n"}, 0.0, /*cycle=*/true);
  const auto out = Run(client, ApiGroup({"kv_open"}));
  EXPECT_EQ(out.result, GenerationResult::kExhaustedRetries);
  EXPECT_EQ(out.queries, 4);
  EXPECT_EQ(client.queries(), 4u);
  EXPECT_EQ(out.failures.size(), 4u);
  EXPECT_EQ(out.category, FailureCategory::kCorruptedCode);
  EXPECT_FALSE(out.driver.has_value());
}

TEST_F(DriverFactoryTest, HonorsConfiguredRetryCap) {
  config_.max_retries = 2;
  ScriptedClient client({""}, 0.0, true);
  const auto out = Run(client, ApiGroup({"kv_version"}));
  EXPECT_EQ(out.result, GenerationResult::kExhaustedRetries);
  EXPECT_EQ(out.queries, 2);
}

TEST_F(DriverFactoryTest, EarlyCrashIsRejected) {
  // kv_open without kv_close breaks the implied pairing, so the simulated
  // target crashes on its first tick.
  ScriptedClient client({"call kv_open\ncall kv_put\n", kGood});
  const auto out = Run(client, ApiGroup({"kv_open"}));
  ASSERT_EQ(out.result, GenerationResult::kAccepted);
  EXPECT_EQ(out.queries, 2);
  EXPECT_EQ(out.compiled, 2);
  EXPECT_EQ(out.early_crashes, 1);
  ASSERT_EQ(out.failures.size(), 1u);
  EXPECT_EQ(out.failures[0].stage, GenerationResult::kRejectedEarlyCrash);
}

TEST_F(DriverFactoryTest, BudgetCheckedBeforeEachQuery) {
  ScriptedClient client({"call kv_open\n"}, 1.0, true);
  const auto out = Run(client, ApiGroup({"kv_open", "kv_close"}), 2.5);
  EXPECT_EQ(out.result, GenerationResult::kBudgetExhausted);
  EXPECT_EQ(out.queries, 2);
  EXPECT_LE(client.accumulated_cost(), 2.5);

  ScriptedClient broke({kGood}, 1.0);
  const auto none = Run(broke, ApiGroup({"kv_open", "kv_close"}), 0.5);
  EXPECT_EQ(none.result, GenerationResult::kBudgetExhausted);
  EXPECT_EQ(none.queries, 0);
  EXPECT_EQ(broke.queries(), 0u);
}

TEST_F(DriverFactoryTest, ClientErrorRetriedOnce) {
  FlakyClient once({0}, kGood);
  const auto out = Run(once, ApiGroup({"kv_open", "kv_close"}));
  EXPECT_EQ(out.result, GenerationResult::kAccepted);
  EXPECT_EQ(once.calls(), 2);
  EXPECT_EQ(out.queries, 1);

  FlakyClient twice({0, 1}, kGood);
  EXPECT_THROW(Run(twice, ApiGroup({"kv_open", "kv_close"})), ClientError);
}

TEST_F(DriverFactoryTest, SimulatedClientEventuallySucceeds) {
  SimClientConfig sc;
  sc.seed = 5;
  SimulatedClient client(sc);
  int accepted = 0;
  for (const auto& group :
       {ApiGroup({"kv_open", "kv_close"}), ApiGroup({"kv_put", "kv_get"}),
        ApiGroup({"kv_iter_new", "kv_iter_free", "kv_iter_next"})}) {
    const auto out = Run(client, group);
    EXPECT_LE(out.queries, 4);
    accepted += out.result == GenerationResult::kAccepted;
  }
  EXPECT_GE(accepted, 2);
}

TEST(GenerationResultTest, Names) {
  EXPECT_EQ(GenerationResultName(GenerationResult::kAccepted), "accepted");
  EXPECT_EQ(GenerationResultName(GenerationResult::kExhaustedRetries),
            "exhausted_retries");
  EXPECT_EQ(GenerationResultName(GenerationResult::kBudgetExhausted),
            "budget_exhausted");
}

}  // namespace
}  // namespace duofuzz
