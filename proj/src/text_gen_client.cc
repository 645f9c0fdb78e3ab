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

#include "duofuzz/text_gen_client.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "duofuzz/rng.h"
#include "httplib.h"

namespace duofuzz {

namespace fs = std::filesystem;

ScriptedClient::ScriptedClient(std::vector<std::string> responses,
                               double cost_per_query, bool cycle)
    : responses_(std::move(responses)),
      cost_per_query_(cost_per_query),
      cycle_(cycle) {}

std::vector<std::string> ScriptedClient::ReadDirectory(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) throw ClientError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  std::vector<std::string> responses;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    responses.push_back(buffer.str());
  }
  return responses;
}

std::string ScriptedClient::Complete(const std::string& prompt, double) {
  std::lock_guard<std::mutex> lock(mu_);
  prompts_.push_back(prompt);
  const uint64_t index = queries_++;
  cost_ += cost_per_query_;
  if (responses_.empty()) return "";
  if (index < responses_.size()) return responses_[index];
  return cycle_ ? responses_[index % responses_.size()] : "";
}

double ScriptedClient::accumulated_cost() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cost_;
}

uint64_t ScriptedClient::queries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return queries_;
}

std::vector<std::string> ScriptedClient::prompts() const {
  std::lock_guard<std::mutex> lock(mu_);
  return prompts_;
}

nlohmann::json ScriptedClient::SaveState() const {
  std::lock_guard<std::mutex> lock(mu_);
  return {{"kind", "scripted"}, {"queries", queries_}, {"cost", cost_}};
}

void ScriptedClient::LoadState(const nlohmann::json& state) {
  std::lock_guard<std::mutex> lock(mu_);
  queries_ = state.at("queries").get<uint64_t>();
  cost_ = state.at("cost").get<double>();
}

nlohmann::json SimClientConfig::ToJson() const {
  return {{"seed", seed},
          {"base_failure", base_failure},
          {"per_extra_api", per_extra_api},
          {"repair_factor", repair_factor},
          {"cost_per_query", cost_per_query}};
}

SimClientConfig SimClientConfig::FromJson(const nlohmann::json& j) {
  SimClientConfig c;
  c.seed = j.value("seed", c.seed);
  c.base_failure = j.value("base_failure", c.base_failure);
  c.per_extra_api = j.value("per_extra_api", c.per_extra_api);
  c.repair_factor = j.value("repair_factor", c.repair_factor);
  c.cost_per_query = j.value("cost_per_query", c.cost_per_query);
  return c;
}

SimulatedClient::SimulatedClient(SimClientConfig config) : config_(config) {}

namespace {

std::vector<std::string> ParseGroupLine(const std::string& prompt) {
  static const std::regex kGroupLine(R"(API group:[ \t]*([^\r\n]*))");
  std::smatch m;
  if (!std::regex_search(prompt, m, kGroupLine)) return {};
  std::vector<std::string> names;
  std::stringstream list(m[1].str());
  std::string name;
  while (std::getline(list, name, ',')) {
    const size_t b = name.find_first_not_of(" \t");
    const size_t e = name.find_last_not_of(" \t");
    if (b != std::string::npos) names.push_back(name.substr(b, e - b + 1));
  }
  return names;
}

}  // namespace

std::string SimulatedClient::Complete(const std::string& prompt, double) {
  uint64_t index;
  {
    std::lock_guard<std::mutex> lock(mu_);
    index = queries_++;
    cost_ += config_.cost_per_query;
  }
  std::vector<std::string> group = ParseGroupLine(prompt);
  if (group.empty()) return "I could not find an API group in the request.";

  Rng rng(MixSeed(MixSeed(config_.seed, StableHash(prompt)), index));
  const bool repair = prompt.find("## Error") != std::string::npos;
  double p = config_.base_failure +
             config_.per_extra_api *
                 static_cast<double>(group.size() > 2 ? group.size() - 2 : 0);
  if (repair) p *= config_.repair_factor;
  p = std::clamp(p, 0.0, 1.0);

  Shuffle(group, rng);
  std::vector<std::string> lines;
  for (const auto& name : group) lines.push_back("call " + name + " $input");
  if (rng.Bernoulli(p)) {
    const size_t victim = rng.Uniform(lines.size());
    switch (rng.Uniform(3)) {
      case 0:  // forgets an API
        lines.erase(lines.begin() + victim);
        break;
      case 1:  // invents a helper
        lines.insert(lines.begin() + victim,
                     "call " + group[victim] + "_ex $input");
        break;
      default:  // malformed statement
        lines[victim] += ")";
        break;
    }
  }
  std::string out = "```\n# driver for " + group.front() + "\n";
  for (const auto& line : lines) out += line + "\n";
  out += "```\n";
  return out;
}

double SimulatedClient::accumulated_cost() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cost_;
}

uint64_t SimulatedClient::queries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return queries_;
}

nlohmann::json SimulatedClient::SaveState() const {
  std::lock_guard<std::mutex> lock(mu_);
  return {{"kind", "sim"}, {"queries", queries_}, {"cost", cost_}};
}

void SimulatedClient::LoadState(const nlohmann::json& state) {
  std::lock_guard<std::mutex> lock(mu_);
  queries_ = state.at("queries").get<uint64_t>();
  cost_ = state.at("cost").get<double>();
}

nlohmann::json HttpClientConfig::ToJson() const {
  return {{"endpoint", endpoint},
          {"model", model},
          {"api_key_env", api_key_env},
          {"input_price_per_1k", input_price_per_1k},
          {"output_price_per_1k", output_price_per_1k},
          {"max_tokens", max_tokens},
          {"timeout_seconds", timeout_seconds}};
}

HttpClientConfig HttpClientConfig::FromJson(const nlohmann::json& j) {
  HttpClientConfig c;
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.input_price_per_1k = j.value("input_price_per_1k", c.input_price_per_1k);
  c.output_price_per_1k =
      j.value("output_price_per_1k", c.output_price_per_1k);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  return c;
}

HttpChatClient::HttpChatClient(HttpClientConfig config)
    : config_(std::move(config)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, kUrl)) {
    throw ClientError("malformed endpoint: '" + config_.endpoint + "'");
  }
  scheme_host_port_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ClientError("environment variable " + config_.api_key_env +
                      " is not set");
  }
  api_key_ = key;
}

double HttpChatClient::MaxQueryCost(const std::string& prompt) const {
  const double prompt_tokens = static_cast<double>(prompt.size()) / 3.0 + 16;
  return prompt_tokens * config_.input_price_per_1k / 1000.0 +
         config_.max_tokens * config_.output_price_per_1k / 1000.0;
}

std::string HttpChatClient::Complete(const std::string& prompt,
                                     double temperature) {
  nlohmann::json body = {
      {"model", config_.model},
      {"temperature", temperature},
      {"max_tokens", config_.max_tokens},
      {"messages", {{{"role", "user"}, {"content", prompt}}}}};
  httplib::Client http(scheme_host_port_);
  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  http.set_connection_timeout(secs);
  http.set_read_timeout(secs);
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
  auto response = http.Post(path_, headers, body.dump(), "application/json");
  if (!response) {
    throw ClientError("request failed: " + httplib::to_string(response.error()));
  }
  if (response->status != 200) {
    throw ClientError("HTTP " + std::to_string(response->status) + ": " +
                      response->body.substr(0, 512));
  }
  nlohmann::json reply = nlohmann::json::parse(response->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") ||
      reply["choices"].empty()) {
    throw ClientError("unexpected response: " + response->body.substr(0, 512));
  }
  const std::string text =
      reply["choices"][0]["message"].value("content", std::string());

  double in_tokens = static_cast<double>(prompt.size()) / 3.0 + 16;
  double out_tokens = static_cast<double>(config_.max_tokens);
  if (reply.contains("usage")) {
    in_tokens = reply["usage"].value("prompt_tokens", in_tokens);
    out_tokens = reply["usage"].value("completion_tokens", out_tokens);
  }
  std::lock_guard<std::mutex> lock(mu_);
  ++queries_;
  cost_ += in_tokens * config_.input_price_per_1k / 1000.0 +
           out_tokens * config_.output_price_per_1k / 1000.0;
  return text;
}

double HttpChatClient::accumulated_cost() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cost_;
}

uint64_t HttpChatClient::queries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return queries_;
}

nlohmann::json HttpChatClient::SaveState() const {
  std::lock_guard<std::mutex> lock(mu_);
  return {{"kind", "http"}, {"queries", queries_}, {"cost", cost_}};
}

void HttpChatClient::LoadState(const nlohmann::json& state) {
  std::lock_guard<std::mutex> lock(mu_);
  queries_ = state.at("queries").get<uint64_t>();
  cost_ = state.at("cost").get<double>();
}

std::string StripCodeFences(std::string_view text) {
  const size_t open = text.find("```");
  if (open != std::string_view::npos) {
    const size_t body = text.find('\n', open);
    if (body != std::string_view::npos) {
      const size_t close = text.find("```", body + 1);
      return std::string(text.substr(
          body + 1,
          (close == std::string_view::npos ? text.size() : close) - body - 1));
    }
  }
  const size_t b = text.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const size_t e = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(b, e - b + 1)) + "\n";
}

}  // namespace duofuzz
