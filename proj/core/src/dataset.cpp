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

#include "pathfair/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pathfair/error.hpp"

namespace pathfair {

Dataset load_dataset_from_graph(KnowledgeGraph graph, const std::string& purchase_relation) {
  Dataset data;
  data.graph = std::move(graph);
  data.purchase = data.graph.relation(purchase_relation);
  for (const auto user : data.graph.users()) {
    std::uint64_t count = 0;
    for (const auto& edge : data.graph.neighbors(user)) {
      if (!edge.reversed && edge.relation == data.purchase &&
          data.graph.entity_class(edge.neighbor) == EntityClass::Item) {
        ++count;
      }
    }
    data.purchase_counts[user] = count;
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& triples_file,
                     const std::filesystem::path& test_file,
                     const std::string& purchase_relation) {
  Dataset data = load_dataset_from_graph(load_graph(read_triples_file(triples_file)),
                                         purchase_relation);
  if (test_file.empty()) return data;

  std::ifstream in(test_file);
  if (!in) throw Error("cannot open test purchase file: " + test_file.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto at = [&](const std::string& msg) {
      return Error(test_file.string() + ":" + std::to_string(line_no) + ": " + msg);
    };
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw at("expected `user<TAB>item`");
    }
    const std::string user_name = line.substr(0, tab);
    const std::string item_name = line.substr(tab + 1);
    const auto user = data.graph.find_entity(user_name);
    if (!user || data.graph.entity_class(*user) != EntityClass::User) {
      throw at("unknown test user `" + user_name + "`");
    }
    const auto item = data.graph.find_entity(item_name);
    if (!item || data.graph.entity_class(*item) != EntityClass::Item) {
      throw at("unknown test item `" + item_name + "`");
    }
    if (data.graph.has_triple(*user, data.purchase, *item)) {
      throw at("test purchase (" + user_name + ", " + item_name +
               ") is already a training purchase");
    }
    data.test_purchases[*user].insert(*item);
  }
  return data;
}

void write_test_purchases(const KnowledgeGraph& g,
                          const std::map<EntityId, std::set<EntityId>>& test,
                          const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write test purchase file: " + file.string());
  for (const auto& [user, items] : test) {
    for (const auto item : items) {
      out << g.entity_name(user) << '\t' << g.entity_name(item) << '\n';
    }
  }
  if (!out) throw Error("failed writing test purchase file: " + file.string());
}

GroupSplit split_by_activity(const Dataset& data, double active_ratio) {
  if (!(active_ratio > 0.0) || !(active_ratio < 1.0)) {
    throw Error("active ratio must lie strictly between 0 and 1");
  }
  const auto users = data.graph.users();
  if (users.empty()) throw Error("activity split needs at least one user");

  GroupSplit split;
  split.users.assign(users.begin(), users.end());
  split.active.assign(users.size(), false);

  std::vector<std::size_t> order(users.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ca = data.purchase_counts.at(users[a]);
    const auto cb = data.purchase_counts.at(users[b]);
    if (ca != cb) return ca > cb;
    return users[a] < users[b];
  });

  auto take = static_cast<std::size_t>(
      std::ceil(active_ratio * static_cast<double>(users.size())));
  if (take > users.size()) take = users.size();
  for (std::size_t i = 0; i < take; ++i) split.active[order[i]] = true;
  split.active_count = take;
  return split;
}

PurchaseHistogram purchase_histogram(const Dataset& data) {
  PurchaseHistogram hist;
  for (const auto& [user, count] : data.purchase_counts) {
    std::size_t bucket = 0;
    while (bucket < hist.kEdges.size() && count >= hist.kEdges[bucket]) ++bucket;
    ++hist.bucket_users[bucket];
  }
  return hist;
}

}  // namespace pathfair
