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

#include "duofuzz/retriever.h"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace duofuzz {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kPatterns[] = {
    R"(error: no matching function for call to '([^']*)')",
    R"(error: use of undeclared identifier '([^']*)')",
    R"(error: use of undeclared identifier ([^']*); did you mean '([^']*)'\?)",
    R"(error: assigning to '([^']*)'(?: \(aka '[^']*'\))? from incompatible type '[^']*'(?: \(aka '[^']*'\))?)",
    R"(error: unknown type name '([^']*)')",
    R"(error: no member named '[^']*' in '([^']*)')",
    R"(error: field designator '[^']*' does not refer to any field in type '([^']*)'(?: \(aka '[^']*'\))?)",
};

const std::vector<std::regex>& CompiledPatterns() {
  static const std::vector<std::regex> compiled = [] {
    std::vector<std::regex> out;
    for (auto p : kPatterns) out.emplace_back(std::string(p));
    return out;
  }();
  return compiled;
}

bool IsSourceFile(const fs::path& path) {
  const std::string ext = path.extension().string();
  return ext == ".h" || ext == ".hpp" || ext == ".c" || ext == ".cpp" ||
         ext == ".cc";
}

std::vector<std::string> ReadLines(const fs::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string EscapeRegex(std::string_view text) {
  static const std::string kSpecial = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : text) {
    if (kSpecial.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

// Lines from `start` through the end of the declaration: the matching close
// brace of the first '{' (plus a trailing "name;" for typedef'd bodies), or
// the first ';' at brace depth zero.
std::string ExtractBlock(const std::vector<std::string>& lines, size_t start,
                         size_t max_lines = 80) {
  std::string out;
  int depth = 0;
  bool opened = false;
  for (size_t i = start; i < lines.size() && i < start + max_lines; ++i) {
    out += lines[i] + "\n";
    bool done = false;
    for (char c : lines[i]) {
      if (c == '{') {
        ++depth;
        opened = true;
      } else if (c == '}') {
        --depth;
      } else if (c == ';' && depth == 0) {
        done = true;
        break;
      }
    }
    if (opened && depth <= 0) {
      // Function bodies end at the brace; type bodies end at the ';'.
      const std::string& l = lines[i];
      const size_t brace = l.rfind('}');
      if (l.find(';', brace) != std::string::npos ||
          l.find_first_not_of(" \t}", brace) == std::string::npos) {
        done = true;
      }
    }
    if (done) break;
  }
  return out;
}

std::optional<std::pair<size_t, std::string>> FindInLines(
    const std::vector<std::string>& lines, std::string_view identifier) {
  const std::string id = EscapeRegex(identifier);
  const std::regex type_def(R"(\b(struct|class|union|enum)\s+)" + id +
                            R"(\b[^;()]*(\{|$))");
  const std::regex typedef_line(R"(\btypedef\b.*\b)" + id + R"(\s*;)");
  const std::regex typedef_close(R"(^\s*\}\s*)" + id + R"(\s*;)");
  const std::regex alias(R"(\busing\s+)" + id + R"(\s*=)");
  const std::regex function(R"(^[A-Za-z_][^;(){}=]*\b)" + id + R"(\s*\()");
  const std::regex macro(R"(^\s*#\s*define\s+)" + id + R"(\b)");
  const std::regex constant(R"(\b(const|constexpr)\b[^;(]*\b)" + id +
                            R"(\s*=)");
  const std::regex enumerator(R"(^\s*)" + id + R"(\s*(=[^,]*)?,?\s*(//.*)?$)");

  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& l = lines[i];
    if (std::regex_search(l, type_def)) {
      // Forward declarations ("struct X;") are not definitions.
      if (l.find('{') != std::string::npos ||
          (i + 1 < lines.size() &&
           lines[i + 1].find_first_not_of(" \t") != std::string::npos &&
           lines[i + 1][lines[i + 1].find_first_not_of(" \t")] == '{')) {
        return std::make_pair(i, ExtractBlock(lines, i));
      }
    }
    if (std::regex_search(l, typedef_line) || std::regex_search(l, alias) ||
        std::regex_search(l, macro) || std::regex_search(l, constant)) {
      return std::make_pair(i, l + "\n");
    }
    if (std::regex_search(l, typedef_close)) {
      size_t begin = i;
      while (begin > 0 && lines[begin].find("typedef") == std::string::npos) {
        --begin;
      }
      std::string text;
      for (size_t k = begin; k <= i; ++k) text += lines[k] + "\n";
      return std::make_pair(begin, text);
    }
    if (std::regex_search(l, function)) {
      return std::make_pair(i, ExtractBlock(lines, i));
    }
    if (std::regex_search(l, enumerator)) {
      size_t begin = i;
      while (begin > 0 && lines[begin].find("enum") == std::string::npos) {
        --begin;
      }
      if (lines[begin].find("enum") != std::string::npos) {
        return std::make_pair(begin, ExtractBlock(lines, begin));
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::span<const std::string_view> RetrieverPatterns() { return kPatterns; }

std::vector<std::string> ExtractFocusIdentifiers(
    std::string_view diagnostics) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::istringstream in{std::string(diagnostics)};
  std::string line;
  while (std::getline(in, line)) {
    for (const auto& pattern : CompiledPatterns()) {
      std::smatch m;
      if (!std::regex_search(line, m, pattern)) continue;
      for (size_t g = 1; g < m.size(); ++g) {
        if (!m[g].matched || m[g].length() == 0) continue;
        std::string capture = m[g];
        if (seen.insert(capture).second) out.push_back(std::move(capture));
      }
    }
  }
  return out;
}

std::string SearchableIdentifier(std::string_view captured) {
  std::string s(captured);
  // Template arguments.
  if (auto lt = s.find('<'); lt != std::string::npos) s.erase(lt);
  // Function parameter lists.
  if (auto lp = s.find('('); lp != std::string::npos) s.erase(lp);
  std::istringstream in(s);
  std::string token;
  std::string last;
  while (in >> token) {
    token.erase(std::remove_if(token.begin(), token.end(),
                               [](char c) { return c == '*' || c == '&'; }),
                token.end());
    if (token.empty() || token == "struct" || token == "class" ||
        token == "union" || token == "enum" || token == "const" ||
        token == "volatile") {
      continue;
    }
    last = token;
  }
  if (auto colon = last.rfind("::"); colon != std::string::npos) {
    last = last.substr(colon + 2);
  }
  return last;
}

std::string Snippet::Render() const {
  return "// " + file + ":" + std::to_string(line) + "\n" + text;
}

std::optional<Snippet> FindDefinition(std::string_view identifier,
                                      const fs::path& root) {
  if (identifier.empty()) return std::nullopt;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) return std::nullopt;
  std::vector<fs::path> files;
  for (fs::recursive_directory_iterator it(
           root, fs::directory_options::skip_permission_denied, ec),
       end;
       it != end; it.increment(ec)) {
    if (ec) break;
    if (it->is_regular_file(ec) && IsSourceFile(it->path())) {
      files.push_back(it->path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    const auto lines = ReadLines(file);
    if (auto hit = FindInLines(lines, identifier)) {
      return Snippet{std::string(identifier),
                     fs::relative(file, root, ec).generic_string(),
                     hit->first + 1, hit->second};
    }
  }
  return std::nullopt;
}

std::vector<Snippet> RetrieveContext(
    std::string_view diagnostics,
    const std::optional<fs::path>& source_root, size_t max_snippets) {
  std::vector<Snippet> snippets;
  if (!source_root) return snippets;
  std::set<std::string> searched;
  for (const auto& captured : ExtractFocusIdentifiers(diagnostics)) {
    if (snippets.size() >= max_snippets) break;
    const std::string id = SearchableIdentifier(captured);
    if (id.empty() || !searched.insert(id).second) continue;
    if (auto snippet = FindDefinition(id, *source_root)) {
      bool duplicate = false;
      for (const auto& s : snippets) {
        duplicate |= s.file == snippet->file && s.line == snippet->line;
      }
      if (!duplicate) snippets.push_back(std::move(*snippet));
    }
  }
  return snippets;
}

}  // namespace duofuzz
