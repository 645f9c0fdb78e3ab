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

// Text-generation clients used for constraint inference and driver
// generation.
#ifndef DUOFUZZ_TEXT_GEN_CLIENT_H_
#define DUOFUZZ_TEXT_GEN_CLIENT_H_

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace duofuzz {

// Transport or protocol failure; the query did not produce text.
class ClientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TextGenClient {
 public:
  virtual ~TextGenClient() = default;

  virtual std::string Complete(const std::string& prompt,
                               double temperature) = 0;
  // Monotone nondecreasing.
  virtual double accumulated_cost() const = 0;
  virtual uint64_t queries() const = 0;
  // Upper bound on what Complete(prompt) may add to accumulated_cost().
  virtual double MaxQueryCost(const std::string& prompt) const = 0;

  virtual nlohmann::json SaveState() const = 0;
  virtual void LoadState(const nlohmann::json& state) = 0;
};

// Replays canned responses in order. Once they run out it returns empty
// text, or starts over when `cycle` is set.
class ScriptedClient : public TextGenClient {
 public:
  explicit ScriptedClient(std::vector<std::string> responses,
                          double cost_per_query = 0.0, bool cycle = false);
  // Contents of every regular file of `dir`, in filename order.
  static std::vector<std::string> ReadDirectory(
      const std::filesystem::path& dir);

  std::string Complete(const std::string& prompt, double temperature) override;
  double accumulated_cost() const override;
  uint64_t queries() const override;
  double MaxQueryCost(const std::string&) const override {
    return cost_per_query_;
  }
  nlohmann::json SaveState() const override;
  void LoadState(const nlohmann::json& state) override;

  // Prompts received so far, oldest first.
  std::vector<std::string> prompts() const;

 private:
  std::vector<std::string> responses_;
  double cost_per_query_;
  bool cycle_;
  mutable std::mutex mu_;
  uint64_t queries_ = 0;
  double cost_ = 0.0;
  std::vector<std::string> prompts_;
};

struct SimClientConfig {
  uint64_t seed = 0;
  // Probability that an answer to a generation prompt is broken, for a
  // group of two APIs; grows by per_extra_api for each further member.
  double base_failure = 0.25;
  double per_extra_api = 0.1;
  // Repair prompts fail with the generation probability times this factor.
  double repair_factor = 0.5;
  double cost_per_query = 0.01;

  nlohmann::json ToJson() const;
  static SimClientConfig FromJson(const nlohmann::json& j);
};

// Answers generation and repair prompts with toy call scripts. It reads the
// "API group:" line of the prompt and writes one call per member; broken
// answers drop a member, misspell one, or garble a statement. Answers are a
// function of the seed, the prompt text and the query count.
class SimulatedClient : public TextGenClient {
 public:
  explicit SimulatedClient(SimClientConfig config);

  std::string Complete(const std::string& prompt, double temperature) override;
  double accumulated_cost() const override;
  uint64_t queries() const override;
  double MaxQueryCost(const std::string&) const override {
    return config_.cost_per_query;
  }
  nlohmann::json SaveState() const override;
  void LoadState(const nlohmann::json& state) override;

 private:
  SimClientConfig config_;
  mutable std::mutex mu_;
  uint64_t queries_ = 0;
  double cost_ = 0.0;
};

struct HttpClientConfig {
  // Chat-completions URL, e.g. https://api.openai.com/v1/chat/completions.
  std::string endpoint;
  std::string model;
  // Name of the environment variable holding the API key.
  std::string api_key_env = "DUOFUZZ_API_KEY";
  // Prices in currency units per 1000 tokens.
  double input_price_per_1k = 0.0005;
  double output_price_per_1k = 0.0015;
  int max_tokens = 2048;
  double timeout_seconds = 120;

  nlohmann::json ToJson() const;
  static HttpClientConfig FromJson(const nlohmann::json& j);
};

// OpenAI-style chat-completion client.
class HttpChatClient : public TextGenClient {
 public:
  // Throws ClientError when the endpoint is malformed or the key variable
  // is unset.
  explicit HttpChatClient(HttpClientConfig config);

  std::string Complete(const std::string& prompt, double temperature) override;
  double accumulated_cost() const override;
  uint64_t queries() const override;
  // Prompt tokens estimated generously at one per 3 characters, plus
  // max_tokens of output.
  double MaxQueryCost(const std::string& prompt) const override;
  nlohmann::json SaveState() const override;
  void LoadState(const nlohmann::json& state) override;

 private:
  HttpClientConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  std::string api_key_;
  mutable std::mutex mu_;
  uint64_t queries_ = 0;
  double cost_ = 0.0;
};

// Returns the body of the first fenced code block, or the trimmed text when
// there is none.
std::string StripCodeFences(std::string_view text);

}  // namespace duofuzz

#endif  // DUOFUZZ_TEXT_GEN_CLIENT_H_
