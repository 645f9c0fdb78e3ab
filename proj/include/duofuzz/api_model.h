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

// Data model for a library under test: API functions with normalized types,
// implicit usage constraints between pairs of APIs, and API groups.
#ifndef DUOFUZZ_API_MODEL_H_
#define DUOFUZZ_API_MODEL_H_

#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace duofuzz {

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedTypeError : public SpecError {
 public:
  using SpecError::SpecError;
};

// Raised by LoadLibrarySpec when the document parses but breaks an invariant.
class SpecValidationError : public SpecError {
 public:
  explicit SpecValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// A type spelling with cv-qualifiers, references and top-level pointers
// stripped. Two types match when base and pointer_depth are both equal.
struct TypeName {
  std::string base;
  int pointer_depth = 0;

  bool IsVoid() const { return base == "void" && pointer_depth == 0; }
  // Canonical spelling, e.g. "Handle**". Feeding it back into NormalizeType
  // yields the same TypeName.
  std::string ToString() const;

  auto operator<=>(const TypeName&) const = default;
};

// Throws MalformedTypeError on empty input or input made only of qualifiers.
TypeName NormalizeType(std::string_view raw);

// Strict matching compares base and pointer depth; loose matching ignores the
// depth. void never matches anything.
bool TypesMatch(const TypeName& a, const TypeName& b, bool loose_pointer_match);

struct Parameter {
  std::string name;
  std::string raw_type;
  TypeName type;

  bool operator==(const Parameter&) const = default;
};

struct ApiFunction {
  std::string name;
  std::string signature;
  std::string raw_return_type;
  TypeName return_type;
  std::vector<Parameter> parameters;

  bool operator==(const ApiFunction&) const = default;
};

enum class ConstraintKind { kImply, kConflict };

std::string_view ConstraintKindName(ConstraintKind kind);

// imply(first, second): a group holding `first` must hold `second`.
// conflict(first, second): a group may not hold both (checked symmetrically).
struct ImplicitConstraint {
  ConstraintKind kind = ConstraintKind::kImply;
  std::string first;
  std::string second;

  std::string ToString() const;
  auto operator<=>(const ImplicitConstraint&) const = default;
};

struct LibrarySpec {
  std::string library_name;
  std::vector<ApiFunction> apis;
  std::vector<ImplicitConstraint> implicit;
  std::optional<std::string> source_root;

  // Linear lookup; nullptr when absent.
  const ApiFunction* Find(std::string_view name) const;
  std::vector<std::string> ApiNames() const;

  bool operator==(const LibrarySpec&) const = default;
};

constexpr size_t kDefaultMaxGroupLen = 5;

// A set of API names. Members are kept sorted so that two groups with the
// same members compare equal regardless of construction order.
class ApiGroup {
 public:
  ApiGroup() = default;
  // Throws std::invalid_argument on duplicate or empty names.
  explicit ApiGroup(std::vector<std::string> members);

  const std::vector<std::string>& members() const { return members_; }
  size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool Contains(std::string_view name) const;
  // Comma-joined members; unique per member set.
  std::string Key() const;

  auto operator<=>(const ApiGroup&) const = default;

 private:
  std::vector<std::string> members_;
};

// Parses the LibrarySpec JSON document. Throws SpecError with a
// path-qualified message on schema problems and SpecValidationError when
// invariants do not hold.
LibrarySpec LoadLibrarySpec(std::string_view json_text);
// A relative source_root is resolved against the directory of `path`.
LibrarySpec LoadLibrarySpecFile(const std::string& path);
std::string SaveLibrarySpec(const LibrarySpec& spec);

// Empty iff every LibrarySpec invariant holds.
std::vector<std::string> ValidateSpec(const LibrarySpec& spec);

// Checks group size bounds and that every member names an API of `spec`.
std::vector<std::string> ValidateGroup(const ApiGroup& group,
                                       const LibrarySpec& spec,
                                       size_t max_len = kDefaultMaxGroupLen);

}  // namespace duofuzz

#endif  // DUOFUZZ_API_MODEL_H_
