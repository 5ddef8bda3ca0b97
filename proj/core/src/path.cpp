// Copyright 2026 The pathfair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pathfair/path.hpp"

#include <algorithm>

#include "pathfair/error.hpp"

namespace pathfair {

PathPattern pattern_of(const Path& path) { return path.steps; }

std::string pattern_to_string(const KnowledgeGraph& g, const PathPattern& pattern) {
  std::string out;
  for (const auto& step : pattern) {
    if (!out.empty()) out += '.';
    if (step.direction == Direction::Reverse) out += '~';
    out += g.relation_name(step.relation);
  }
  return out;
}

bool is_valid_path(const KnowledgeGraph& g, const Path& path) {
  if (path.nodes.size() != path.steps.size() + 1) return false;
  if (path.steps.empty() || path.steps.size() > kMaxPatternLength) return false;
  for (const auto node : path.nodes) {
    if (node >= g.entity_count()) return false;
  }
  if (g.entity_class(path.nodes.front()) != EntityClass::User) return false;
  if (g.entity_class(path.nodes.back()) != EntityClass::Item) return false;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < path.nodes.size(); ++j) {
      if (path.nodes[i] == path.nodes[j]) return false;
    }
  }
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    const auto& step = path.steps[i];
    if (step.relation >= g.relation_count()) return false;
    const EntityId from = path.nodes[i];
    const EntityId to = path.nodes[i + 1];
    const bool ok = step.direction == Direction::Forward
                        ? g.has_triple(from, step.relation, to)
                        : g.has_triple(to, step.relation, from);
    if (!ok) return false;
  }
  return true;
}

namespace {

// Shared DFS. Adjacency is already sorted, so extending the shortest prefix
// first yields lexicographic prefix-first order.
void walk(const KnowledgeGraph& g, std::size_t max_len, Path& cur,
          const std::function<void(const Path&)>& sink) {
  const EntityId here = cur.nodes.back();
  if (cur.steps.size() >= max_len) return;
  for (const auto& edge : g.neighbors(here)) {
    if (std::find(cur.nodes.begin(), cur.nodes.end(), edge.neighbor) != cur.nodes.end()) {
      continue;
    }
    cur.nodes.push_back(edge.neighbor);
    cur.steps.push_back({edge.relation,
                         edge.reversed ? Direction::Reverse : Direction::Forward});
    if (g.entity_class(edge.neighbor) == EntityClass::Item) sink(cur);
    walk(g, max_len, cur, sink);
    cur.nodes.pop_back();
    cur.steps.pop_back();
  }
}

}  // namespace

void for_each_user_item_path(const KnowledgeGraph& g, EntityId user, std::size_t max_len,
                             const std::function<void(const Path&)>& sink) {
  if (user >= g.entity_count() || g.entity_class(user) != EntityClass::User) {
    throw Error("path enumeration requires a user entity");
  }
  max_len = std::min(max_len, kMaxPatternLength);
  Path cur;
  cur.nodes.push_back(user);
  walk(g, max_len, cur, sink);
}

std::vector<Path> enumerate_user_item_paths(const KnowledgeGraph& g, EntityId user,
                                            std::size_t max_len) {
  std::vector<Path> out;
  for_each_user_item_path(g, user, max_len, [&](const Path& p) { out.push_back(p); });
  return out;
}

std::map<PathPattern, std::uint64_t> count_user_item_patterns(const KnowledgeGraph& g,
                                                              EntityId user,
                                                              std::size_t max_len) {
  std::map<PathPattern, std::uint64_t> counts;
  for_each_user_item_path(g, user, max_len,
                          [&](const Path& p) { ++counts[p.steps]; });
  return counts;
}

PatternDistribution::PatternDistribution(std::map<PathPattern, std::uint64_t> counts,
                                         double pseudo_count, std::size_t vocabulary_size)
    : counts_(std::move(counts)),
      pseudo_count_(pseudo_count),
      vocabulary_size_(vocabulary_size) {
  if (pseudo_count_ < 0.0) throw Error("pseudo count must be non-negative");
  for (const auto& [pattern, n] : counts_) total_ += n;
  if (pseudo_count_ == 0.0 && total_ == 0) {
    throw Error("pattern distribution needs observations or smoothing");
  }
}

double PatternDistribution::mass(const PathPattern& pattern) const {
  const auto it = counts_.find(pattern);
  const double n = it == counts_.end() ? 0.0 : static_cast<double>(it->second);
  const double denom =
      static_cast<double>(total_) + pseudo_count_ * static_cast<double>(vocabulary_size_);
  return (n + pseudo_count_) / denom;
}

std::uint64_t PatternDistribution::observed(const PathPattern& pattern) const {
  const auto it = counts_.find(pattern);
  return it == counts_.end() ? 0 : it->second;
}

PatternDistribution path_distribution(std::span<const Path> paths, double pseudo_count,
                                      std::size_t vocabulary_size) {
  std::map<PathPattern, std::uint64_t> counts;
  for (const auto& p : paths) ++counts[p.steps];
  return PatternDistribution(std::move(counts), pseudo_count, vocabulary_size);
}

}  // namespace pathfair
