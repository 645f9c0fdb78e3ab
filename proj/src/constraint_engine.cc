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

#include "duofuzz/constraint_engine.h"

#include <algorithm>
#include <utility>

#include "duofuzz/rng.h"

namespace duofuzz {

DependencyIndex::DependencyIndex(const LibrarySpec& spec,
                                 bool loose_pointer_match)
    : loose_(loose_pointer_match) {
  for (const auto& api : spec.apis) {
    Entry entry;
    for (const auto& p : api.parameters) {
      if (p.type.IsVoid()) continue;
      TypeName key = Key(p.type);
      if (std::find(entry.params.begin(), entry.params.end(), key) ==
          entry.params.end()) {
        entry.params.push_back(key);
      }
      by_param_type_[key].insert(api.name);
    }
    if (!api.return_type.IsVoid()) {
      entry.ret = Key(api.return_type);
      by_return_type_[*entry.ret].insert(api.name);
    }
    entries_.emplace(api.name, std::move(entry));
  }
}

TypeName DependencyIndex::Key(const TypeName& type) const {
  if (!loose_) return type;
  return TypeName{type.base, 0};
}

const DependencyIndex::Entry& DependencyIndex::Lookup(
    std::string_view name) const {
  auto it = entries_.find(std::string(name));
  if (it == entries_.end()) throw UnknownApiError(name);
  return it->second;
}

bool DependencyIndex::Contains(std::string_view name) const {
  return entries_.count(std::string(name)) > 0;
}

const std::vector<TypeName>& DependencyIndex::ParamKeys(
    std::string_view name) const {
  return Lookup(name).params;
}

const std::optional<TypeName>& DependencyIndex::ReturnKey(
    std::string_view name) const {
  return Lookup(name).ret;
}

bool DependencyIndex::Linked(std::string_view a, std::string_view b) const {
  const Entry& ea = Lookup(a);
  const Entry& eb = Lookup(b);
  for (const auto& t : ea.params) {
    if (eb.ret && *eb.ret == t) return true;
    if (std::find(eb.params.begin(), eb.params.end(), t) != eb.params.end()) {
      return true;
    }
  }
  if (ea.ret) {
    return std::find(eb.params.begin(), eb.params.end(), *ea.ret) !=
           eb.params.end();
  }
  return false;
}

namespace {

bool AnyIn(const std::set<std::string>& names,
           std::span<const std::string> rest) {
  for (const auto& r : rest) {
    if (names.count(r)) return true;
  }
  return false;
}

}  // namespace

bool Depends(std::string_view f, std::span<const std::string> rest,
             const DependencyIndex& index) {
  for (const auto& r : rest) {
    if (!index.Contains(r)) throw UnknownApiError(r);
  }
  for (const auto& t : index.ParamKeys(f)) {
    auto ret_it = index.by_return_type().find(t);
    if (ret_it != index.by_return_type().end() && AnyIn(ret_it->second, rest)) {
      return true;
    }
    auto par_it = index.by_param_type().find(t);
    if (par_it != index.by_param_type().end() && AnyIn(par_it->second, rest)) {
      return true;
    }
  }
  if (const auto& ret = index.ReturnKey(f)) {
    auto par_it = index.by_param_type().find(*ret);
    if (par_it != index.by_param_type().end() && AnyIn(par_it->second, rest)) {
      return true;
    }
  }
  return false;
}

bool SatExplicit(const ApiGroup& group, const DependencyIndex& index) {
  if (group.empty()) return true;  // solve_explicit([], g) holds
  const auto& members = group.members();
  std::vector<std::string> rest;
  for (size_t i = 0; i < members.size(); ++i) {
    rest.clear();
    for (size_t j = 0; j < members.size(); ++j) {
      if (j != i) rest.push_back(members[j]);
    }
    if (!Depends(members[i], rest, index)) return false;
  }
  return true;
}

bool SatImplicit(const ApiGroup& group,
                 std::span<const ImplicitConstraint> constraints) {
  for (const auto& c : constraints) {
    const bool has_first = group.Contains(c.first);
    const bool has_second = group.Contains(c.second);
    if (c.kind == ConstraintKind::kImply) {
      if (has_first && !has_second) return false;
    } else if (has_first && has_second) {
      return false;
    }
  }
  return true;
}

GroupEnumerator::GroupEnumerator(const LibrarySpec& spec,
                                 const DependencyIndex& index,
                                 EnumerateOptions options)
    : options_(options), layer_size_(options.min_size) {
  if (options_.min_size > options_.max_size) {
    throw std::invalid_argument("enumerate: min size exceeds max size");
  }
  if (options_.check_explicit) {
    if (options_.min_size < 2) {
      throw std::invalid_argument(
          "enumerate: min size must be at least 2 when explicit constraints "
          "are checked");
    }
    if (options_.max_size > options_.max_group_len) {
      throw std::invalid_argument("enumerate: max size exceeds group limit " +
                                  std::to_string(options_.max_group_len));
    }
  }

  order_ = spec.ApiNames();
  std::sort(order_.begin(), order_.end());
  if (options_.order_seed != 0) {
    Rng rng(options_.order_seed);
    Shuffle(order_, rng);
  }
  const size_t n = order_.size();
  std::unordered_map<std::string, size_t> pos;
  for (size_t i = 0; i < n; ++i) pos[order_[i]] = i;

  adjacency_.assign(n * n, false);
  auto link = [&](size_t a, size_t b) {
    if (a == b) return;
    adjacency_[a * n + b] = true;
    adjacency_[b * n + a] = true;
  };
  for (const auto& [type, params] : index.by_param_type()) {
    std::vector<size_t> p;
    for (const auto& name : params) p.push_back(pos.at(name));
    for (size_t i = 0; i < p.size(); ++i) {
      for (size_t j = i + 1; j < p.size(); ++j) link(p[i], p[j]);
    }
    auto ret_it = index.by_return_type().find(type);
    if (ret_it == index.by_return_type().end()) continue;
    for (const auto& name : ret_it->second) {
      for (size_t a : p) link(a, pos.at(name));
    }
  }
  max_neighbor_pos_.assign(n, -1);
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = n; b-- > 0;) {
      if (adjacency_[a * n + b]) {
        max_neighbor_pos_[a] = static_cast<int>(b);
        break;
      }
    }
  }

  if (options_.check_implicit) {
    implicit_ = spec.implicit;
    conflicts_.resize(n);
    for (const auto& c : spec.implicit) {
      if (c.kind != ConstraintKind::kConflict) continue;
      auto a = pos.find(c.first);
      auto b = pos.find(c.second);
      if (a == pos.end() || b == pos.end()) continue;
      conflicts_[a->second].push_back(b->second);
      conflicts_[b->second].push_back(a->second);
    }
  }
}

bool GroupEnumerator::TryPush(size_t pos) {
  if (options_.check_implicit) {
    for (size_t other : conflicts_[pos]) {
      if (std::find(stack_.begin(), stack_.end(), other) != stack_.end()) {
        return false;
      }
    }
  }
  if (!options_.check_explicit) {
    stack_.push_back(pos);
    degree_.push_back(0);
    return true;
  }
  int own_degree = 0;
  for (size_t i = 0; i < stack_.size(); ++i) {
    if (Linked(stack_[i], pos)) {
      ++degree_[i];
      ++own_degree;
    }
  }
  stack_.push_back(pos);
  degree_.push_back(own_degree);

  // Every member without a partner yet must still be able to find one among
  // the positions after `pos`, in the slots that remain.
  const size_t remaining = layer_size_ - stack_.size();
  for (size_t i = 0; i < stack_.size(); ++i) {
    if (degree_[i] > 0) continue;
    if (remaining == 0 ||
        max_neighbor_pos_[stack_[i]] <= static_cast<int>(pos)) {
      Pop();
      return false;
    }
  }
  return true;
}

void GroupEnumerator::Pop() {
  const size_t pos = stack_.back();
  stack_.pop_back();
  degree_.pop_back();
  if (!options_.check_explicit) return;
  for (size_t i = 0; i < stack_.size(); ++i) {
    if (Linked(stack_[i], pos)) --degree_[i];
  }
}

bool GroupEnumerator::Complete() const {
  if (options_.check_explicit) {
    for (int d : degree_) {
      if (d == 0) return false;
    }
  }
  return true;
}

std::optional<ApiGroup> GroupEnumerator::Next() {
  if (exhausted_) return std::nullopt;
  if (options_.cap != 0 && produced_ >= options_.cap) {
    exhausted_ = true;
    return std::nullopt;
  }
  const size_t n = order_.size();
  while (true) {
    if (layer_size_ > options_.max_size || layer_size_ > n) {
      exhausted_ = true;
      return std::nullopt;
    }
    if (stack_.size() == layer_size_) {
      std::optional<ApiGroup> out;
      if (Complete()) {
        std::vector<std::string> members;
        members.reserve(stack_.size());
        for (size_t p : stack_) members.push_back(order_[p]);
        ApiGroup group(std::move(members));
        if (!options_.check_implicit || SatImplicit(group, implicit_)) {
          out = std::move(group);
        }
      }
      if (stack_.empty()) {
        ++layer_size_;
        next_ = 0;
      } else {
        next_ = stack_.back() + 1;
        Pop();
      }
      if (out) {
        ++produced_;
        return out;
      }
      continue;
    }
    const size_t needed = layer_size_ - stack_.size();
    if (next_ + needed > n) {
      if (stack_.empty()) {
        ++layer_size_;
        next_ = 0;
      } else {
        next_ = stack_.back() + 1;
        Pop();
      }
      continue;
    }
    TryPush(next_++);
  }
}

uint64_t GroupEnumerator::Skip(uint64_t n) {
  uint64_t skipped = 0;
  while (skipped < n && Next()) ++skipped;
  return skipped;
}

std::vector<ApiGroup> EnumerateGroups(const LibrarySpec& spec,
                                      const DependencyIndex& index,
                                      const EnumerateOptions& options) {
  GroupEnumerator enumerator(spec, index, options);
  std::vector<ApiGroup> out;
  while (auto group = enumerator.Next()) out.push_back(std::move(*group));
  return out;
}

}  // namespace duofuzz
