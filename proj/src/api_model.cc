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

#include "duofuzz/api_model.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace duofuzz {

using nlohmann::json;

namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

bool IsDroppedKeyword(const std::string& token) {
  return token == "const" || token == "volatile" || token == "struct" ||
         token == "union" || token == "enum" || token == "class";
}

std::string JoinStrings(const std::vector<std::string>& parts,
                        std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

SpecValidationError::SpecValidationError(std::vector<std::string> violations)
    : SpecError("invalid library spec: " + JoinStrings(violations, "; ")),
      violations_(std::move(violations)) {}

std::string TypeName::ToString() const {
  return base + std::string(static_cast<size_t>(pointer_depth), '*');
}

TypeName NormalizeType(std::string_view raw) {
  TypeName out;
  std::vector<std::string> tokens;
  std::string current;
  int nesting = 0;       // depth inside <...> or (...)
  int extent = 0;        // depth inside a top-level [...]
  bool pending_space = false;

  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };

  for (char c : raw) {
    if (extent > 0) {
      if (c == '[') ++extent;
      if (c == ']') --extent;
      continue;
    }
    if (nesting == 0) {
      if (c == '*') {
        ++out.pointer_depth;
        flush();
      } else if (c == '[') {
        // Array extents decay to a pointer.
        ++out.pointer_depth;
        ++extent;
        flush();
      } else if (c == '&' || IsSpace(c)) {
        flush();
      } else {
        if (c == '<' || c == '(') ++nesting;
        current += c;
      }
      continue;
    }
    if (IsSpace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) current += ' ';
    pending_space = false;
    if (c == '<' || c == '(') {
      ++nesting;
    } else if (c == '>' || c == ')') {
      --nesting;
    }
    current += c;
  }
  flush();

  std::vector<std::string> kept;
  for (auto& token : tokens) {
    if (!IsDroppedKeyword(token)) kept.push_back(std::move(token));
  }
  out.base = JoinStrings(kept, " ");
  if (out.base.empty()) {
    throw MalformedTypeError("malformed type: '" + std::string(raw) + "'");
  }
  return out;
}

bool TypesMatch(const TypeName& a, const TypeName& b,
                bool loose_pointer_match) {
  if (a.IsVoid() || b.IsVoid()) return false;
  if (a.base != b.base) return false;
  return loose_pointer_match || a.pointer_depth == b.pointer_depth;
}

std::string_view ConstraintKindName(ConstraintKind kind) {
  return kind == ConstraintKind::kImply ? "imply" : "conflict";
}

std::string ImplicitConstraint::ToString() const {
  return std::string(ConstraintKindName(kind)) + "(" + first + "," + second +
         ")";
}

const ApiFunction* LibrarySpec::Find(std::string_view name) const {
  for (const auto& api : apis) {
    if (api.name == name) return &api;
  }
  return nullptr;
}

std::vector<std::string> LibrarySpec::ApiNames() const {
  std::vector<std::string> names;
  names.reserve(apis.size());
  for (const auto& api : apis) names.push_back(api.name);
  return names;
}

ApiGroup::ApiGroup(std::vector<std::string> members)
    : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  for (size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].empty()) {
      throw std::invalid_argument("api group member with empty name");
    }
    if (i > 0 && members_[i] == members_[i - 1]) {
      throw std::invalid_argument("duplicate api group member: " +
                                  members_[i]);
    }
  }
}

bool ApiGroup::Contains(std::string_view name) const {
  return std::binary_search(members_.begin(), members_.end(), name);
}

std::string ApiGroup::Key() const { return JoinStrings(members_, ","); }

namespace {

[[noreturn]] void SchemaError(const std::string& path,
                              const std::string& what) {
  throw SpecError("schema error at " + path + ": " + what);
}

const json& Field(const json& obj, const std::string& path,
                  const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) SchemaError(path, std::string("missing field '") + key + "'");
  return *it;
}

std::string StringField(const json& obj, const std::string& path,
                        const char* key) {
  const json& value = Field(obj, path, key);
  if (!value.is_string()) {
    SchemaError(path + "." + key, "expected string");
  }
  return value.get<std::string>();
}

TypeName NormalizeAt(const std::string& raw, const std::string& path) {
  try {
    return NormalizeType(raw);
  } catch (const MalformedTypeError& e) {
    SchemaError(path, e.what());
  }
}

}  // namespace

LibrarySpec LoadLibrarySpec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("library spec is not valid JSON: ") +
                    e.what());
  }
  if (!doc.is_object()) SchemaError("$", "expected object");

  LibrarySpec spec;
  spec.library_name = StringField(doc, "$", "library");

  const json& apis = Field(doc, "$", "apis");
  if (!apis.is_array()) SchemaError("$.apis", "expected array");
  for (size_t i = 0; i < apis.size(); ++i) {
    const std::string path = "$.apis[" + std::to_string(i) + "]";
    const json& entry = apis[i];
    if (!entry.is_object()) SchemaError(path, "expected object");
    ApiFunction api;
    api.name = StringField(entry, path, "name");
    api.signature = StringField(entry, path, "signature");
    api.raw_return_type = StringField(entry, path, "return_type");
    api.return_type = NormalizeAt(api.raw_return_type, path + ".return_type");
    const json& params = Field(entry, path, "params");
    if (!params.is_array()) SchemaError(path + ".params", "expected array");
    for (size_t j = 0; j < params.size(); ++j) {
      const std::string ppath = path + ".params[" + std::to_string(j) + "]";
      const json& p = params[j];
      if (!p.is_object()) SchemaError(ppath, "expected object");
      Parameter param;
      auto name_it = p.find("name");
      if (name_it != p.end() && !name_it->is_null()) {
        if (!name_it->is_string()) SchemaError(ppath + ".name", "expected string");
        param.name = name_it->get<std::string>();
      }
      if (param.name.empty()) param.name = "arg" + std::to_string(j);
      param.raw_type = StringField(p, ppath, "type");
      param.type = NormalizeAt(param.raw_type, ppath + ".type");
      api.parameters.push_back(std::move(param));
    }
    spec.apis.push_back(std::move(api));
  }

  auto implicit_it = doc.find("implicit");
  if (implicit_it != doc.end() && !implicit_it->is_null()) {
    if (!implicit_it->is_array()) SchemaError("$.implicit", "expected array");
    for (size_t i = 0; i < implicit_it->size(); ++i) {
      const std::string path = "$.implicit[" + std::to_string(i) + "]";
      const json& c = (*implicit_it)[i];
      if (!c.is_object()) SchemaError(path, "expected object");
      ImplicitConstraint constraint;
      const std::string kind = StringField(c, path, "kind");
      if (kind == "imply") {
        constraint.kind = ConstraintKind::kImply;
      } else if (kind == "conflict") {
        constraint.kind = ConstraintKind::kConflict;
      } else {
        SchemaError(path + ".kind", "expected \"imply\" or \"conflict\", got \"" +
                                        kind + "\"");
      }
      constraint.first = StringField(c, path, "first");
      constraint.second = StringField(c, path, "second");
      spec.implicit.push_back(std::move(constraint));
    }
  }

  auto root_it = doc.find("source_root");
  if (root_it != doc.end() && !root_it->is_null()) {
    if (!root_it->is_string()) SchemaError("$.source_root", "expected string or null");
    spec.source_root = root_it->get<std::string>();
  }

  auto violations = ValidateSpec(spec);
  if (!violations.empty()) throw SpecValidationError(std::move(violations));
  return spec;
}

LibrarySpec LoadLibrarySpecFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot read library spec: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  LibrarySpec spec = LoadLibrarySpec(buffer.str());
  if (spec.source_root && !spec.source_root->empty()) {
    const std::filesystem::path root(*spec.source_root);
    if (root.is_relative()) {
      spec.source_root =
          (std::filesystem::absolute(path).parent_path() / root).string();
    }
  }
  return spec;
}

std::string SaveLibrarySpec(const LibrarySpec& spec) {
  json doc;
  doc["library"] = spec.library_name;
  doc["apis"] = json::array();
  for (const auto& api : spec.apis) {
    json params = json::array();
    for (const auto& p : api.parameters) {
      params.push_back({{"name", p.name}, {"type", p.raw_type}});
    }
    doc["apis"].push_back({{"name", api.name},
                           {"signature", api.signature},
                           {"return_type", api.raw_return_type},
                           {"params", std::move(params)}});
  }
  doc["implicit"] = json::array();
  for (const auto& c : spec.implicit) {
    doc["implicit"].push_back({{"kind", std::string(ConstraintKindName(c.kind))},
                               {"first", c.first},
                               {"second", c.second}});
  }
  doc["source_root"] =
      spec.source_root ? json(*spec.source_root) : json(nullptr);
  return doc.dump(2) + "\n";
}

std::vector<std::string> ValidateSpec(const LibrarySpec& spec) {
  std::vector<std::string> violations;
  std::set<std::string> names;
  for (const auto& api : spec.apis) {
    if (api.name.empty()) {
      violations.push_back("api with empty name");
      continue;
    }
    if (!names.insert(api.name).second) {
      violations.push_back("duplicate api: " + api.name);
    }
    auto check_type = [&](const TypeName& t, const std::string& where) {
      if (t.base.empty()) {
        violations.push_back("empty type in " + where);
      } else if (IsSpace(t.base.front()) || IsSpace(t.base.back())) {
        violations.push_back("unnormalized type in " + where);
      } else if (t.pointer_depth < 0) {
        violations.push_back("negative pointer depth in " + where);
      }
    };
    check_type(api.return_type, "return type of " + api.name);
    std::set<std::string> param_names;
    for (const auto& p : api.parameters) {
      if (p.name.empty()) {
        violations.push_back("unnamed parameter in " + api.name);
      } else if (!param_names.insert(p.name).second) {
        violations.push_back("duplicate parameter '" + p.name + "' in " +
                             api.name);
      }
      check_type(p.type, "parameter '" + p.name + "' of " + api.name);
    }
  }
  for (const auto& c : spec.implicit) {
    if (c.first == c.second) {
      violations.push_back("constraint with identical endpoints: " +
                           c.ToString());
    }
    for (const auto* name : {&c.first, &c.second}) {
      if (!names.count(*name)) {
        violations.push_back("constraint " + c.ToString() +
                             " references unknown api: " + *name);
      }
    }
  }
  return violations;
}

std::vector<std::string> ValidateGroup(const ApiGroup& group,
                                       const LibrarySpec& spec,
                                       size_t max_len) {
  std::vector<std::string> violations;
  if (group.size() < 2) {
    violations.push_back("group smaller than 2: " + group.Key());
  }
  if (group.size() > max_len) {
    violations.push_back("group longer than " + std::to_string(max_len) +
                         ": " + group.Key());
  }
  for (const auto& name : group.members()) {
    if (!spec.Find(name)) violations.push_back("unknown api in group: " + name);
  }
  return violations;
}

}  // namespace duofuzz
