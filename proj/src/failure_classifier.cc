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

#include "duofuzz/failure_classifier.h"

#include <stdexcept>
#include <string>

namespace duofuzz {

namespace {

// Clang diagnostic fragments. Truncated entries ("pointe", "objec", "typ")
// are kept as-is; a prefix still matches the full message.
constexpr std::string_view kCorruptedCode[] = {
    "is an abstract class",
    "error: no viable conversion from",
    "error: variable has incomplete type",
    "error: expected '}'",
    "error: expected ')'",
    "error: expected ';' after expression",
    "error: expected expression",
    "error: expected '>'",
    "error: extraneous closing brace",
    "named in nested name specifier",
    "error: a type specifier is required for all declarations",
    "error: C++ requires a type specifier",
    "error: expected unqualified-id",
    "error: extraneous ')' before ';'",
    "error: variable declaration in condition cannot have a parenthesized "
    "initializer",
    "does not name a template but is followed by template arguments",
    "error: templates must have C++ linkage",
    "tag to refer to type",
    "does not refer to a value",
};

constexpr std::string_view kLanguageBasics[] = {
    "multiple definition of",
    "error: calling a protected constructor",
    "error: attempt to use a deleted function",
    "error: overload resolution selected deleted operator",
    "cannot be implicitly captured in a lambda with no capture-default "
    "specified",
    "error: redefinition of",
    "discards qualifiers",
    "error: invalid application of",
    "error: cannot jump from this goto statement to its label",
    "is ambiguous",
    "error: function definition is not allowed here",
    "has a different language linkage",
    "error: typedef redefinition with different types",
    "error: illegal initializer",
    "error: excess elements in scalar initializer",
    "error: call to non-static member function",
    "is a private member of",
    "error: multiple overloads of",
    "is a protected member of",
    "error: call to implicitly-deleted default constructor of",
    "error: reference to non-static member function",
    "error: expression is not assignable",
    "error: call to implicitly-deleted",
    "could not bind to an rvalue of type",
    "is neither visible in the template definition nor found by "
    "argument-dependent lookup",
    "error: ambiguous conversion",
    "error: no viable overloaded",
    "error: calling a private",
    "error: allocating an object of abstract class type",
    "is a pointer; did you mean to use",
    "error: only virtual member functions",
    "error: cannot jump from",
    "error: cannot delete",
    "does not provide a call operator",
    "error: excess elements in struct initializer",
    "error: taking the address of a temporary objec",
    "used in function with fixed args",
    "error: reference to overloaded function could not be resolved",
    "variables must have global storage",
    "conflicts with typedef of the same name",
    "error: call to deleted",
    "error: cannot create a non-constant pointer to member function",
};

constexpr std::string_view kNonexistingIdentifier[] = {
    "no matching function for call to",
    "error: use of undeclared identifier",
    "undefined reference to",
    "error: no member named",
    "no matching constructor for initialization",
    "error: no matching member",
    "error: field designator",
};

constexpr std::string_view kTypeError[] = {
    "error: no type named",
    "error: unknown type name",
    "invalid operands to binary expression",
    "error: unexpected type name",
    "error: member reference base type",
    "error: cannot initialize a",
    "error: reinterpret_cast from",
    "error: member access into",
    "error: incompatible integer to pointer conversion",
    "from incompatible type",
    "error: cast from pointer to smaller type",
    "error: incompatible pointer types",
    "is not a function or function pointe",
    "error: non-constant-expression cannot be narrowed from type",
    "error: invalid use of incomplete type",
    "error: cannot cast from type",
    "has incompatible initializer of type",
    "error: const_cast from",
    "error: static_cast from",
    "cannot be narrowed to",
    "error: invalid argument type",
    "error: incompatible pointer to integer conversion",
    "error: too few arguments to function call",
    "error: invalid range expression of type",
    "s not a pointer; did you mean to use",
    "error: conflicting types",
    "error: non-const lvalue reference to typ",
    "error: no matching conversion for",
    "error: too many arguments to function call",
    "error: arithmetic on a pointer",
    "error: comparison between",
    "error: C-style cast from",
    "error: incompatible operand types",
    "could not bind to an lvalue of type",
    "error: cannot take the address of an rvalue of type",
    "error: too many arguments provided",
    "error: cannot initialize an",
    "is not assignable",
    "error: functional-style cast",
    "must match previous return type",
    "error: cannot compile this lambda conversion to variadic function yet",
    "is not contextually convertible",
    "cannot be referenced with a struct specifier",
    "error: cannot convert",
    "error: indirection requires pointer operand",
    "error: functions that differ only in their return type cannot be "
    "overloaded",
};

// Signals from the text-generation client that a prompt did not fit.
constexpr std::string_view kTokenLimit[] = {
    "context_length_exceeded",
    "maximum context length",
    "exceeds the token limit",
    "too many errors emitted",
};

// Signals from the execution environment.
constexpr std::string_view kOutOfSpace[] = {
    "No space left on device",
    "ENOSPC",
    "Disk quota exceeded",
    "workdir quota exceeded",
};

}  // namespace

std::string_view FailureCategoryTag(FailureCategory category) {
  switch (category) {
    case FailureCategory::kCorruptedCode:
      return "G1_corrupted";
    case FailureCategory::kLanguageBasics:
      return "G2_language_basics";
    case FailureCategory::kNonexistingIdentifier:
      return "G3_nonexisting_identifier";
    case FailureCategory::kTypeError:
      return "G4_type_error";
    case FailureCategory::kTokenLimit:
      return "G5_token_limit";
    case FailureCategory::kOutOfSpace:
      return "G6_out_of_space";
    case FailureCategory::kUnknown:
      return "unknown";
  }
  return "unknown";
}

FailureCategory ParseFailureCategory(std::string_view tag) {
  for (auto category : kAllFailureCategories) {
    if (FailureCategoryTag(category) == tag) return category;
  }
  throw std::invalid_argument("unknown failure category: " + std::string(tag));
}

std::span<const std::string_view> FailurePatterns(FailureCategory category) {
  switch (category) {
    case FailureCategory::kCorruptedCode:
      return kCorruptedCode;
    case FailureCategory::kLanguageBasics:
      return kLanguageBasics;
    case FailureCategory::kNonexistingIdentifier:
      return kNonexistingIdentifier;
    case FailureCategory::kTypeError:
      return kTypeError;
    case FailureCategory::kTokenLimit:
      return kTokenLimit;
    case FailureCategory::kOutOfSpace:
      return kOutOfSpace;
    case FailureCategory::kUnknown:
      break;
  }
  return {};
}

FailureCategory ClassifyFailure(std::string_view diagnostics,
                                size_t char_budget) {
  for (auto category : kAllFailureCategories) {
    if (category == FailureCategory::kUnknown) break;
    if (category == FailureCategory::kTokenLimit &&
        diagnostics.size() > char_budget) {
      return category;
    }
    for (std::string_view pattern : FailurePatterns(category)) {
      if (diagnostics.find(pattern) != std::string_view::npos) return category;
    }
  }
  return FailureCategory::kUnknown;
}

}  // namespace duofuzz
