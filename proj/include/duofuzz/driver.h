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

// Fuzz driver sources and the line-oriented "toy" call language used by the
// simulator.
//
// Toy grammar, one statement per line:
//   # comment
//   call <api> [<arg> ...]      where <arg> is $input, a number, a quoted
//                               string or an identifier
#ifndef DUOFUZZ_DRIVER_H_
#define DUOFUZZ_DRIVER_H_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "duofuzz/api_model.h"
#include "json.hpp"

namespace duofuzz {

enum class DriverLanguage { kC, kCpp, kToy };

std::string_view DriverLanguageName(DriverLanguage language);
DriverLanguage ParseDriverLanguage(std::string_view name);
// ".c", ".cc" or ".toy".
std::string_view DriverExtension(DriverLanguage language);

struct DriverSource {
  std::string id;
  ApiGroup group;
  DriverLanguage language = DriverLanguage::kToy;
  std::string text;
  int generation = 0;  // attempt index that produced the text

  nlohmann::json ToJson() const;
  static DriverSource FromJson(const nlohmann::json& j);
  bool operator==(const DriverSource&) const = default;
};

struct ToyCall {
  size_t line = 0;  // 1-based
  std::string callee;
  std::vector<std::string> args;
};

struct ToySyntaxError {
  size_t line = 0;
  size_t column = 0;  // 1-based
  std::string message;
};

// Either the parsed statements or the first syntax error.
std::variant<std::vector<ToyCall>, ToySyntaxError> ParseToyScript(
    std::string_view text);

// Distinct callees of a well-formed script, sorted; empty on syntax errors.
std::vector<std::string> ToyCallees(std::string_view text);

// Replaces comments, string literals and character literals with spaces,
// preserving line structure.
std::string StripCommentsAndLiterals(std::string_view source);

// Every member of group appears as a call site: `name(` in C/C++ (comments
// and literals ignored; qualified names match on their last component), or a
// `call name` statement in toy scripts.
bool StaticApiCheck(const DriverSource& driver, const ApiGroup& group);

// Members of group without a call site in driver.
std::vector<std::string> MissingApis(const DriverSource& driver,
                                     const ApiGroup& group);

}  // namespace duofuzz

#endif  // DUOFUZZ_DRIVER_H_
