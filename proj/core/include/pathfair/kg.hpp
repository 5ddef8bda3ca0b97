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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pathfair {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

enum class EntityClass : std::uint8_t { User, Item, Word, Brand, Category, Other };

std::string_view to_string(EntityClass c);

/// Derives the entity class from an id prefix ("user:", "item:", "word:",
/// "brand:", "category:"). Anything else is EntityClass::Other.
EntityClass entity_class_of(std::string_view entity_id);

/// One input triple with explicit class annotations on both endpoints.
struct TripleRecord {
  std::string head;
  EntityClass head_class = EntityClass::Other;
  std::string relation;
  std::string tail;
  EntityClass tail_class = EntityClass::Other;
};

/// Parses the TSV triple format: `head<TAB>relation<TAB>tail`, one triple per
/// line, `#` starting a comment line, entity classes taken from id prefixes.
/// Malformed lines raise Error with the offending line number.
std::vector<TripleRecord> parse_triples_tsv(std::istream& in,
                                            std::string_view source_name = "<stream>");
std::vector<TripleRecord> read_triples_file(const std::filesystem::path& file);

/// An edge as seen from one endpoint. `reversed == false` means the stored
/// triple is (self, relation, neighbor); `reversed == true` means the stored
/// triple is (neighbor, relation, self) and traversal goes against it.
struct AdjacencyEdge {
  EntityId neighbor;
  RelationId relation;
  bool reversed;
};

/// Immutable typed triple store. Entity and relation ids are assigned in
/// lexicographic order of their names, so id comparisons order names too.
/// Safe to share across threads once constructed.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  std::size_t entity_count() const { return entity_names_.size(); }
  std::size_t relation_count() const { return relation_names_.size(); }
  std::size_t triple_count() const { return triples_.size(); }

  std::optional<EntityId> find_entity(std::string_view name) const;
  EntityId entity(std::string_view name) const;  // throws on unknown name
  const std::string& entity_name(EntityId e) const { return entity_names_[e]; }
  EntityClass entity_class(EntityId e) const { return entity_classes_[e]; }

  std::optional<RelationId> find_relation(std::string_view name) const;
  RelationId relation(std::string_view name) const;  // throws on unknown name
  const std::string& relation_name(RelationId r) const { return relation_names_[r]; }

  bool has_triple(EntityId head, RelationId rel, EntityId tail) const;

  /// Forward and reversed edges of `e`, sorted by (neighbor, relation,
  /// direction); forward before reversed on full ties.
  std::span<const AdjacencyEdge> neighbors(EntityId e) const;

  /// All triples as (head, relation, tail) id tuples, sorted.
  std::span<const std::array<std::uint32_t, 3>> triples() const { return triples_; }

  /// Entities of class User / Item, ascending by id (hence by name).
  std::span<const EntityId> users() const { return users_; }
  std::span<const EntityId> items() const { return items_; }

 private:
  friend KnowledgeGraph load_graph(const std::vector<TripleRecord>& records);

  std::vector<std::string> entity_names_;      // sorted
  std::vector<EntityClass> entity_classes_;
  std::vector<std::string> relation_names_;    // sorted
  std::vector<std::array<std::uint32_t, 3>> triples_;
  std::vector<AdjacencyEdge> adjacency_;
  std::vector<std::size_t> adjacency_offsets_;  // entity_count()+1 entries
  std::vector<EntityId> users_;
  std::vector<EntityId> items_;
};

/// Builds a deduplicated immutable graph from records. Throws if one entity
/// name is annotated with two different classes (in particular user vs item).
KnowledgeGraph load_graph(const std::vector<TripleRecord>& records);

void write_triples_tsv(const KnowledgeGraph& g, const std::filesystem::path& file);
void write_triples_tsv(std::span<const TripleRecord> records,
                       const std::filesystem::path& file);

}  // namespace pathfair
