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

#include "pathfair/kg.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <tuple>

#include "pathfair/error.hpp"

namespace pathfair {

std::string_view to_string(EntityClass c) {
  switch (c) {
    case EntityClass::User: return "user";
    case EntityClass::Item: return "item";
    case EntityClass::Word: return "word";
    case EntityClass::Brand: return "brand";
    case EntityClass::Category: return "category";
    case EntityClass::Other: return "other";
  }
  return "other";
}

EntityClass entity_class_of(std::string_view entity_id) {
  auto has_prefix = [&](std::string_view p) { return entity_id.substr(0, p.size()) == p; };
  if (has_prefix("user:")) return EntityClass::User;
  if (has_prefix("item:")) return EntityClass::Item;
  if (has_prefix("word:")) return EntityClass::Word;
  if (has_prefix("brand:")) return EntityClass::Brand;
  if (has_prefix("category:")) return EntityClass::Category;
  return EntityClass::Other;
}

std::vector<TripleRecord> parse_triples_tsv(std::istream& in, std::string_view source_name) {
  std::vector<TripleRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos ||
        line.find('\t', tab2 + 1) != std::string::npos) {
      throw Error(std::string(source_name) + ":" + std::to_string(line_no) +
                  ": malformed triple, expected `head<TAB>relation<TAB>tail`");
    }
    TripleRecord rec;
    rec.head = line.substr(0, tab1);
    rec.relation = line.substr(tab1 + 1, tab2 - tab1 - 1);
    rec.tail = line.substr(tab2 + 1);
    if (rec.head.empty() || rec.relation.empty() || rec.tail.empty()) {
      throw Error(std::string(source_name) + ":" + std::to_string(line_no) +
                  ": malformed triple, empty field");
    }
    rec.head_class = entity_class_of(rec.head);
    rec.tail_class = entity_class_of(rec.tail);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<TripleRecord> read_triples_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open triple file: " + file.string());
  return parse_triples_tsv(in, file.string());
}

std::optional<EntityId> KnowledgeGraph::find_entity(std::string_view name) const {
  const auto it = std::lower_bound(entity_names_.begin(), entity_names_.end(), name);
  if (it == entity_names_.end() || *it != name) return std::nullopt;
  return static_cast<EntityId>(it - entity_names_.begin());
}

EntityId KnowledgeGraph::entity(std::string_view name) const {
  if (auto id = find_entity(name)) return *id;
  throw Error("unknown entity: " + std::string(name));
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view name) const {
  const auto it = std::lower_bound(relation_names_.begin(), relation_names_.end(), name);
  if (it == relation_names_.end() || *it != name) return std::nullopt;
  return static_cast<RelationId>(it - relation_names_.begin());
}

RelationId KnowledgeGraph::relation(std::string_view name) const {
  if (auto id = find_relation(name)) return *id;
  throw Error("unknown relation: " + std::string(name));
}

bool KnowledgeGraph::has_triple(EntityId head, RelationId rel, EntityId tail) const {
  const std::array<std::uint32_t, 3> key{head, rel, tail};
  return std::binary_search(triples_.begin(), triples_.end(), key);
}

std::span<const AdjacencyEdge> KnowledgeGraph::neighbors(EntityId e) const {
  return {adjacency_.data() + adjacency_offsets_[e],
          adjacency_offsets_[e + 1] - adjacency_offsets_[e]};
}

KnowledgeGraph load_graph(const std::vector<TripleRecord>& records) {
  // Pass 1: collect names so ids can be assigned in sorted order.
  std::map<std::string, EntityClass> entities;
  std::map<std::string, RelationId> relations;
  auto declare = [&](const std::string& name, EntityClass cls) {
    auto [it, inserted] = entities.emplace(name, cls);
    if (!inserted && it->second != cls) {
      throw Error("entity `" + name + "` declared with conflicting classes `" +
                  std::string(to_string(it->second)) + "` and `" +
                  std::string(to_string(cls)) + "`");
    }
  };
  for (const auto& rec : records) {
    declare(rec.head, rec.head_class);
    declare(rec.tail, rec.tail_class);
    relations.emplace(rec.relation, 0);
  }

  KnowledgeGraph g;
  g.entity_names_.reserve(entities.size());
  g.entity_classes_.reserve(entities.size());
  for (const auto& [name, cls] : entities) {
    const auto id = static_cast<EntityId>(g.entity_names_.size());
    g.entity_names_.push_back(name);
    g.entity_classes_.push_back(cls);
    if (cls == EntityClass::User) g.users_.push_back(id);
    if (cls == EntityClass::Item) g.items_.push_back(id);
  }
  g.relation_names_.reserve(relations.size());
  for (auto& [name, id] : relations) {
    id = static_cast<RelationId>(g.relation_names_.size());
    g.relation_names_.push_back(name);
  }

  // Pass 2: intern triples, dropping duplicates.
  g.triples_.reserve(records.size());
  for (const auto& rec : records) {
    g.triples_.push_back({*g.find_entity(rec.head), relations.at(rec.relation),
                          *g.find_entity(rec.tail)});
  }
  std::sort(g.triples_.begin(), g.triples_.end());
  g.triples_.erase(std::unique(g.triples_.begin(), g.triples_.end()), g.triples_.end());

  // Adjacency in both directions, counting-sort by source entity.
  std::vector<std::size_t> counts(g.entity_count() + 1, 0);
  for (const auto& t : g.triples_) {
    ++counts[t[0]];
    ++counts[t[2]];
  }
  g.adjacency_offsets_.assign(g.entity_count() + 1, 0);
  for (std::size_t e = 0; e < g.entity_count(); ++e) {
    g.adjacency_offsets_[e + 1] = g.adjacency_offsets_[e] + counts[e];
  }
  g.adjacency_.resize(g.adjacency_offsets_.back());
  std::vector<std::size_t> cursor(g.adjacency_offsets_.begin(), g.adjacency_offsets_.end() - 1);
  for (const auto& t : g.triples_) {
    g.adjacency_[cursor[t[0]]++] = AdjacencyEdge{t[2], t[1], false};
    g.adjacency_[cursor[t[2]]++] = AdjacencyEdge{t[0], t[1], true};
  }
  for (std::size_t e = 0; e < g.entity_count(); ++e) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.adjacency_offsets_[e]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.adjacency_offsets_[e + 1]),
              [](const AdjacencyEdge& a, const AdjacencyEdge& b) {
                return std::tie(a.neighbor, a.relation, a.reversed) <
                       std::tie(b.neighbor, b.relation, b.reversed);
              });
  }
  return g;
}

void write_triples_tsv(const KnowledgeGraph& g, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write triple file: " + file.string());
  for (const auto& t : g.triples()) {
    out << g.entity_name(t[0]) << '\t' << g.relation_name(t[1]) << '\t'
        << g.entity_name(t[2]) << '\n';
  }
  if (!out) throw Error("failed writing triple file: " + file.string());
}

void write_triples_tsv(std::span<const TripleRecord> records,
                       const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write triple file: " + file.string());
  for (const auto& r : records) {
    out << r.head << '\t' << r.relation << '\t' << r.tail << '\n';
  }
  if (!out) throw Error("failed writing triple file: " + file.string());
}

}  // namespace pathfair
