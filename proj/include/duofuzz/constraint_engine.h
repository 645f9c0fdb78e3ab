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

// Explicit (type-level) and implicit (imply/conflict) constraint checking for
// API groups, and a streaming enumerator of groups that satisfy both.
//
// An API f depends on a set of other APIs when one of its parameter types
// equals a return type or a parameter type somewhere in the set, or when its
// return type equals a parameter type in the set. A group is valid when
// every member depends on the rest of the group, and rational when it is
// valid and satisfies every implicit constraint.
#ifndef DUOFUZZ_CONSTRAINT_ENGINE_H_
#define DUOFUZZ_CONSTRAINT_ENGINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "duofuzz/api_model.h"

namespace duofuzz {

class UnknownApiError : public std::out_of_range {
 public:
  explicit UnknownApiError(std::string_view name)
      : std::out_of_range("unknown api: " + std::string(name)) {}
};

// Type-keyed lookup tables over a LibrarySpec. Immutable after construction.
class DependencyIndex {
 public:
  using TypeTable = std::map<TypeName, std::set<std::string>>;

  explicit DependencyIndex(const LibrarySpec& spec,
                           bool loose_pointer_match = false);

  const TypeTable& by_param_type() const { return by_param_type_; }
  const TypeTable& by_return_type() const { return by_return_type_; }
  bool loose_pointer_match() const { return loose_; }

  bool Contains(std::string_view name) const;
  // Parameter type keys of `name` (deduplicated, void excluded).
  const std::vector<TypeName>& ParamKeys(std::string_view name) const;
  // Return type key of `name`; nullopt for void.
  const std::optional<TypeName>& ReturnKey(std::string_view name) const;

  // depends(a, {b}). The relation is symmetric by construction of the
  // three clauses.
  bool Linked(std::string_view a, std::string_view b) const;

  friend bool operator==(const DependencyIndex& a, const DependencyIndex& b) {
    return a.by_param_type_ == b.by_param_type_ &&
           a.by_return_type_ == b.by_return_type_;
  }

 private:
  struct Entry {
    std::vector<TypeName> params;
    std::optional<TypeName> ret;
  };
  const Entry& Lookup(std::string_view name) const;
  TypeName Key(const TypeName& type) const;

  bool loose_;
  TypeTable by_param_type_;
  TypeTable by_return_type_;
  std::unordered_map<std::string, Entry> entries_;
};

// Throws UnknownApiError when f or a member of rest is not indexed.
bool Depends(std::string_view f, std::span<const std::string> rest,
             const DependencyIndex& index);

bool SatExplicit(const ApiGroup& group, const DependencyIndex& index);

// Material implication for imply; conflicts are checked in both directions.
bool SatImplicit(const ApiGroup& group,
                 std::span<const ImplicitConstraint> constraints);

struct EnumerateOptions {
  size_t min_size = 2;
  size_t max_size = kDefaultMaxGroupLen;
  // Configured upper limit on max_size.
  size_t max_group_len = kDefaultMaxGroupLen;
  // Stream bound; 0 means unbounded.
  uint64_t cap = 0;
  // 0 keeps the sorted name order; other values shuffle it.
  uint64_t order_seed = 0;
  bool check_explicit = true;
  bool check_implicit = true;
};

// Streams groups of increasing size. Within one size, groups come out in
// depth-first order over the (possibly shuffled) API order, with subtrees
// pruned as soon as a member can no longer find a dependency partner or two
// conflicting APIs are both present.
//
// With check_explicit disabled every subset in the size range is produced,
// including sizes 0 and 1.
class GroupEnumerator {
 public:
  // Throws std::invalid_argument when the size range is out of bounds.
  GroupEnumerator(const LibrarySpec& spec, const DependencyIndex& index,
                  EnumerateOptions options);

  std::optional<ApiGroup> Next();
  // Discards up to n groups; returns the number actually skipped.
  uint64_t Skip(uint64_t n);

  uint64_t produced() const { return produced_; }
  bool exhausted() const { return exhausted_; }

 private:
  bool Linked(size_t a, size_t b) const {
    return adjacency_[a * order_.size() + b];
  }
  bool TryPush(size_t pos);
  void Pop();
  bool Complete() const;

  EnumerateOptions options_;
  std::vector<std::string> order_;
  std::vector<bool> adjacency_;
  std::vector<int> max_neighbor_pos_;
  std::vector<std::vector<size_t>> conflicts_;  // by position
  std::vector<ImplicitConstraint> implicit_;

  size_t layer_size_;
  std::vector<size_t> stack_;
  std::vector<int> degree_;  // parallel to stack_
  size_t next_ = 0;
  uint64_t produced_ = 0;
  bool exhausted_ = false;
};

// Convenience: drains an enumerator into a vector.
std::vector<ApiGroup> EnumerateGroups(const LibrarySpec& spec,
                                      const DependencyIndex& index,
                                      const EnumerateOptions& options);

}  // namespace duofuzz

#endif  // DUOFUZZ_CONSTRAINT_ENGINE_H_
