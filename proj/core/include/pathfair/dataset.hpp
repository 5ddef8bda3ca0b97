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

#ifndef PATHFAIR_DATASET_HPP_
#define PATHFAIR_DATASET_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pathfair/kg.hpp"

namespace pathfair {

// Training graph plus held-out purchases. Test purchases never overlap the
// training purchase triples and always name entities known to the graph.
struct Dataset {
  KnowledgeGraph graph;
  RelationId purchase = 0;
  std::map<EntityId, std::set<EntityId>> test_purchases;
  std::map<EntityId, std::uint64_t> purchase_counts;  // training counts per user
};

// Loads training triples and an optional `user<TAB>item` test file. Errors on
// unknown test entities, on test pairs that are also training purchases, and
// on a missing purchase relation.
Dataset load_dataset(const std::filesystem::path& triples_file,
                     const std::filesystem::path& test_file,
                     const std::string& purchase_relation = "purchase");
Dataset load_dataset_from_graph(KnowledgeGraph graph,
                                const std::string& purchase_relation = "purchase");

void write_test_purchases(const KnowledgeGraph& g,
                          const std::map<EntityId, std::set<EntityId>>& test,
                          const std::filesystem::path& file);

// Active/inactive split: the top ceil(ratio * m) users by training purchase
// count, ties at the boundary to the smaller user id.
struct GroupSplit {
  std::vector<EntityId> users;  // all users, ascending id
  std::vector<bool> active;     // aligned with users
  std::size_t active_count = 0;
};

GroupSplit split_by_activity(const Dataset& data, double active_ratio);

// Users-per-bucket view of the training purchase counts with the fixed
// bucket edges 4, 5, 6, 9, 15, 30: [0,4), [4,5), [5,6), [6,9), [9,15),
// [15,30), [30, inf).
struct PurchaseHistogram {
  static constexpr std::array<std::uint64_t, 6> kEdges{4, 5, 6, 9, 15, 30};
  std::array<std::uint64_t, 7> bucket_users{};
};

PurchaseHistogram purchase_histogram(const Dataset& data);

}  // namespace pathfair

#endif  // PATHFAIR_DATASET_HPP_
