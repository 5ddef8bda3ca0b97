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

#ifndef PATHFAIR_EMBEDDING_HPP_
#define PATHFAIR_EMBEDDING_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "pathfair/kg.hpp"

namespace pathfair {

// Dense entity and relation vectors with the translational dot-product score
//   s(h, r, t) = (e_h + v_r) . e_t.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(std::size_t entity_count, std::size_t relation_count, std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t entity_count() const { return dim_ == 0 ? 0 : entities_.size() / dim_; }
  std::size_t relation_count() const { return dim_ == 0 ? 0 : relations_.size() / dim_; }

  std::span<double> entity(EntityId e) { return {entities_.data() + e * dim_, dim_}; }
  std::span<const double> entity(EntityId e) const {
    return {entities_.data() + e * dim_, dim_};
  }
  std::span<double> relation(RelationId r) { return {relations_.data() + r * dim_, dim_}; }
  std::span<const double> relation(RelationId r) const {
    return {relations_.data() + r * dim_, dim_};
  }

  double score(EntityId head, RelationId rel, EntityId tail) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> entities_;
  std::vector<double> relations_;
};

struct TrainConfig {
  std::size_t dim = 64;
  std::size_t epochs = 30;
  double learning_rate = 0.05;
  double margin = 1.0;
  std::uint64_t seed = 1;
  // Corrupted-triple draws per example before the example is skipped.
  std::size_t negative_retries = 10;
};

struct TripleExample {
  EntityId head;
  RelationId relation;
  EntityId tail;
};

// Sparse per-example gradient buffer keyed by vector id.
struct Gradients {
  std::map<EntityId, std::vector<double>> entity;
  std::map<RelationId, std::vector<double>> relation;

  void add_entity(EntityId e, std::span<const double> g, double scale, std::size_t dim);
  void add_relation(RelationId r, std::span<const double> g, double scale, std::size_t dim);
};

// Margin ranking loss of one positive/corrupted pair,
//   max(0, margin - s(pos) + s(neg)),
// with its gradient with respect to every touched vector accumulated into
// `grads`. Returns the loss. Training and the finite-difference checks both
// go through this function.
double accumulate_margin_gradients(const EmbeddingModel& model, const TripleExample& pos,
                                   const TripleExample& neg, double margin,
                                   Gradients& grads);

struct TrainStats {
  std::vector<double> epoch_loss;  // mean loss over examples, per epoch
};

// SGD over the training triples with same-class corrupted negatives. The
// corrupted side is redrawn while it collides with a true triple, up to
// negative_retries times. Touched entity vectors are L2-normalized after each
// update. `progress`, when set, is invoked after each epoch with (epoch,
// mean loss).
EmbeddingModel train_embeddings(
    const KnowledgeGraph& g, const TrainConfig& cfg, TrainStats* stats = nullptr,
    const std::function<void(std::size_t, double)>& progress = {});

// One vector per line, `name<TAB>v1,v2,...`, entities first then relations,
// both in id order.
void write_embeddings(const EmbeddingModel& model, const KnowledgeGraph& g,
                      const std::filesystem::path& file);

// Names are classified against the graph (entity vs relation). Missing or
// unknown names, dimension mismatches, and names that are both an entity and
// a relation are errors.
EmbeddingModel read_embeddings(const KnowledgeGraph& g, const std::filesystem::path& file);

}  // namespace pathfair

#endif  // PATHFAIR_EMBEDDING_HPP_
