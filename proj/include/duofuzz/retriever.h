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

// Pulls identifiers out of compiler diagnostics and looks up their
// definitions in the library sources, to give the repair prompt context.
#ifndef DUOFUZZ_RETRIEVER_H_
#define DUOFUZZ_RETRIEVER_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace duofuzz {

inline constexpr size_t kDefaultMaxSnippets = 8;

// The diagnostic patterns, in application order.
std::span<const std::string_view> RetrieverPatterns();

// Every capture of every pattern over every line, in order of discovery,
// deduplicated.
std::vector<std::string> ExtractFocusIdentifiers(std::string_view diagnostics);

// Reduces a captured type or name spelling to the identifier to search for:
// drops elaborated keywords, qualifiers, pointer/reference sigils, template
// arguments and namespace qualification.
std::string SearchableIdentifier(std::string_view captured);

struct Snippet {
  std::string identifier;
  std::string file;  // relative to the source root
  size_t line = 0;   // 1-based
  std::string text;

  // "// <file>:<line>\n<text>"
  std::string Render() const;
};

// First definition of identifier across the C/C++ files under root (sorted
// path order): a struct/class/union/enum body, a typedef or alias, a function
// definition or prototype, or a macro/constant. Exact identifier match only.
std::optional<Snippet> FindDefinition(std::string_view identifier,
                                      const std::filesystem::path& root);

// Unreadable or missing roots yield no snippets.
std::vector<Snippet> RetrieveContext(
    std::string_view diagnostics,
    const std::optional<std::filesystem::path>& source_root,
    size_t max_snippets = kDefaultMaxSnippets);

}  // namespace duofuzz

#endif  // DUOFUZZ_RETRIEVER_H_
