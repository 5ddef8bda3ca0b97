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

#ifndef PATHFAIR_PATH_HPP_
#define PATHFAIR_PATH_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pathfair/kg.hpp"

namespace pathfair {

// Longest pattern considered anywhere in the library. Longer walks add noise
// and blow up enumeration, so this is a hard cap, not a tunable.
inline constexpr std::size_t kMaxPatternLength = 3;

enum class Direction : std::uint8_t { Forward, Reverse };

struct PatternStep {
  RelationId relation = 0;
  Direction direction = Direction::Forward;

  friend auto operator<=>(const PatternStep&, const PatternStep&) = default;
};

// A pattern is the relation/direction sequence of a walk, entities erased.
using PathPattern = std::vector<PatternStep>;

// A concrete walk: entities visited plus the steps between them.
// nodes.size() == steps.size() + 1, nodes.front() is the user,
// nodes.back() is the item.
struct Path {
  std::vector<EntityId> nodes;
  PathPattern steps;

  friend bool operator==(const Path&, const Path&) = default;
};

PathPattern pattern_of(const Path& path);

// `user:0 -purchase-> item:1 <-produced_by- brand:2` rendering of a pattern,
// names resolved against the graph. Used in traces and reports.
std::string pattern_to_string(const KnowledgeGraph& g, const PathPattern& pattern);

// Checks a walk against a graph: consecutive nodes must be connected by the
// claimed relation in the claimed direction, endpoints must be user and item,
// no entity may repeat, and the length cap must hold.
bool is_valid_path(const KnowledgeGraph& g, const Path& path);

// All simple user-to-item walks of length 1..max_len, in lexicographic
// prefix-first order (shorter walks before their extensions, edges scanned
// in adjacency order). Every returned path satisfies is_valid_path.
std::vector<Path> enumerate_user_item_paths(const KnowledgeGraph& g, EntityId user,
                                            std::size_t max_len = kMaxPatternLength);

// Same traversal without materializing walks: pattern -> walk count.
// Optionally restricted to walks ending at `item`.
std::map<PathPattern, std::uint64_t> count_user_item_patterns(
    const KnowledgeGraph& g, EntityId user, std::size_t max_len = kMaxPatternLength);

// Streaming variant: invokes `sink` once per walk with the terminal item and
// the pattern of the walk. Traversal order matches enumerate_user_item_paths.
void for_each_user_item_path(const KnowledgeGraph& g, EntityId user, std::size_t max_len,
                             const std::function<void(const Path&)>& sink);

// Smoothed relative frequency of patterns for one user against a fixed
// vocabulary. Patterns outside the vocabulary are ignored by mass() lookups
// but still count toward the observed total.
class PatternDistribution {
 public:
  PatternDistribution() = default;
  PatternDistribution(std::map<PathPattern, std::uint64_t> counts, double pseudo_count,
                      std::size_t vocabulary_size);

  // Smoothed probability of one pattern: (n + s) / (N + s * |vocab|).
  // Patterns never observed for this user still get the floor s / (N + s*|vocab|).
  double mass(const PathPattern& pattern) const;

  std::uint64_t observed(const PathPattern& pattern) const;
  std::uint64_t total_observed() const { return total_; }
  double pseudo_count() const { return pseudo_count_; }
  std::size_t vocabulary_size() const { return vocabulary_size_; }
  const std::map<PathPattern, std::uint64_t>& counts() const { return counts_; }

 private:
  std::map<PathPattern, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  double pseudo_count_ = 1.0;
  std::size_t vocabulary_size_ = 0;
};

// Distribution over the patterns of an explicit path set.
PatternDistribution path_distribution(std::span<const Path> paths, double pseudo_count,
                                      std::size_t vocabulary_size);

}  // namespace pathfair

#endif  // PATHFAIR_PATH_HPP_
