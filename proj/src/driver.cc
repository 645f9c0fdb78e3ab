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

#include "duofuzz/driver.h"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace duofuzz {

std::string_view DriverLanguageName(DriverLanguage language) {
  switch (language) {
    case DriverLanguage::kC:
      return "c";
    case DriverLanguage::kCpp:
      return "cpp";
    case DriverLanguage::kToy:
      return "toy";
  }
  return "c";
}

DriverLanguage ParseDriverLanguage(std::string_view name) {
  if (name == "c") return DriverLanguage::kC;
  if (name == "cpp") return DriverLanguage::kCpp;
  if (name == "toy") return DriverLanguage::kToy;
  throw std::invalid_argument("unknown driver language: " + std::string(name));
}

std::string_view DriverExtension(DriverLanguage language) {
  switch (language) {
    case DriverLanguage::kC:
      return ".c";
    case DriverLanguage::kCpp:
      return ".cc";
    case DriverLanguage::kToy:
      return ".toy";
  }
  return ".c";
}

nlohmann::json DriverSource::ToJson() const {
  return {{"id", id},
          {"group", group.members()},
          {"language", std::string(DriverLanguageName(language))},
          {"text", text},
          {"generation", generation}};
}

DriverSource DriverSource::FromJson(const nlohmann::json& j) {
  DriverSource d;
  d.id = j.at("id").get<std::string>();
  d.group = ApiGroup(j.at("group").get<std::vector<std::string>>());
  d.language = ParseDriverLanguage(j.at("language").get<std::string>());
  d.text = j.at("text").get<std::string>();
  d.generation = j.at("generation").get<int>();
  return d;
}

namespace {

bool IsIdentStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string LastComponent(const std::string& name) {
  const size_t colon = name.rfind("::");
  return colon == std::string::npos ? name : name.substr(colon + 2);
}

std::set<std::string> CCallSites(std::string_view source) {
  const std::string text = StripCommentsAndLiterals(source);
  std::set<std::string> calls;
  size_t i = 0;
  while (i < text.size()) {
    if (!IsIdentStart(text[i]) ||
        (i > 0 && (IsIdentChar(text[i - 1])))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < text.size() && IsIdentChar(text[j])) ++j;
    size_t k = j;
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) {
      ++k;
    }
    if (k < text.size() && text[k] == '(') calls.insert(text.substr(i, j - i));
    i = j;
  }
  return calls;
}

}  // namespace

std::variant<std::vector<ToyCall>, ToySyntaxError> ParseToyScript(
    std::string_view text) {
  static const std::regex kIdent(R"([A-Za-z_][A-Za-z0-9_:~]*)");
  static const std::regex kArg(
      R"(\$input|-?[0-9]+(\.[0-9]+)?|"[^"]*"|[A-Za-z_][A-Za-z0-9_]*)");
  std::vector<ToyCall> calls;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream words(line.substr(start));
    std::string keyword;
    words >> keyword;
    if (keyword != "call") {
      return ToySyntaxError{number, start + 1, "expected 'call' statement"};
    }
    ToyCall call;
    call.line = number;
    if (!(words >> call.callee) || !std::regex_match(call.callee, kIdent)) {
      return ToySyntaxError{number, start + 6, "expected api name after 'call'"};
    }
    std::string arg;
    while (words >> arg) {
      if (!std::regex_match(arg, kArg)) {
        return ToySyntaxError{number, line.find(arg) + 1,
                              "invalid argument '" + arg + "'"};
      }
      call.args.push_back(arg);
    }
    calls.push_back(std::move(call));
  }
  return calls;
}

std::vector<std::string> ToyCallees(std::string_view text) {
  auto parsed = ParseToyScript(text);
  std::set<std::string> callees;
  if (auto* calls = std::get_if<std::vector<ToyCall>>(&parsed)) {
    for (const auto& c : *calls) callees.insert(c.callee);
  }
  return {callees.begin(), callees.end()};
}

std::string StripCommentsAndLiterals(std::string_view source) {
  enum class State { kCode, kLineComment, kBlockComment, kString, kChar };
  State state = State::kCode;
  std::string out(source);
  for (size_t i = 0; i < source.size(); ++i) {
    const char c = source[i];
    const char next = i + 1 < source.size() ? source[i + 1] : '\0';
    switch (state) {
      case State::kCode:
        if (c == '/' && next == '/') {
          state = State::kLineComment;
          out[i] = ' ';
        } else if (c == '/' && next == '*') {
          state = State::kBlockComment;
          out[i] = out[i + 1] = ' ';
          ++i;
        } else if (c == '"') {
          state = State::kString;
          out[i] = ' ';
        } else if (c == '\'') {
          state = State::kChar;
          out[i] = ' ';
        }
        break;
      case State::kLineComment:
        if (c == '\n') {
          state = State::kCode;
        } else {
          out[i] = ' ';
        }
        break;
      case State::kBlockComment:
        if (c == '*' && next == '/') {
          out[i] = out[i + 1] = ' ';
          ++i;
          state = State::kCode;
        } else if (c != '\n') {
          out[i] = ' ';
        }
        break;
      case State::kString:
      case State::kChar: {
        const char quote = state == State::kString ? '"' : '\'';
        if (c == '\\' && next != '\0') {
          out[i] = ' ';
          if (next != '\n') out[i + 1] = ' ';
          ++i;
        } else if (c == quote) {
          out[i] = ' ';
          state = State::kCode;
        } else if (c != '\n') {
          out[i] = ' ';
        }
        break;
      }
    }
  }
  return out;
}

std::vector<std::string> MissingApis(const DriverSource& driver,
                                     const ApiGroup& group) {
  std::set<std::string> sites;
  if (driver.language == DriverLanguage::kToy) {
    // Lenient: a syntax error elsewhere is the compiler's business.
    static const std::regex kCallLine(R"(^\s*call\s+([A-Za-z_][A-Za-z0-9_:~]*))");
    std::istringstream in(driver.text);
    std::string line;
    std::smatch m;
    while (std::getline(in, line)) {
      if (std::regex_search(line, m, kCallLine)) sites.insert(m[1]);
    }
  } else {
    sites = CCallSites(driver.text);
  }
  std::vector<std::string> missing;
  for (const auto& name : group.members()) {
    const bool present = driver.language == DriverLanguage::kToy
                             ? sites.count(name) > 0
                             : sites.count(LastComponent(name)) > 0;
    if (!present) missing.push_back(name);
  }
  return missing;
}

bool StaticApiCheck(const DriverSource& driver, const ApiGroup& group) {
  return MissingApis(driver, group).empty();
}

}  // namespace duofuzz
