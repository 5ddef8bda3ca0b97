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

#include "pathfair/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "pathfair/error.hpp"
#include "pathfair/rng.hpp"

namespace pathfair {

EmbeddingModel::EmbeddingModel(std::size_t entity_count, std::size_t relation_count,
                               std::size_t dim)
    : dim_(dim), entities_(entity_count * dim, 0.0), relations_(relation_count * dim, 0.0) {
  if (dim == 0) throw Error("embedding dimension must be positive");
}

double EmbeddingModel::score(EntityId head, RelationId rel, EntityId tail) const {
  const auto h = entity(head);
  const auto r = relation(rel);
  const auto t = entity(tail);
  double acc = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) acc += (h[i] + r[i]) * t[i];
  return acc;
}

void Gradients::add_entity(EntityId e, std::span<const double> g, double scale,
                           std::size_t dim) {
  auto& slot = entity[e];
  if (slot.empty()) slot.assign(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) slot[i] += scale * g[i];
}

void Gradients::add_relation(RelationId r, std::span<const double> g, double scale,
                             std::size_t dim) {
  auto& slot = relation[r];
  if (slot.empty()) slot.assign(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) slot[i] += scale * g[i];
}

double accumulate_margin_gradients(const EmbeddingModel& model, const TripleExample& pos,
                                   const TripleExample& neg, double margin,
                                   Gradients& grads) {
  const double loss =
      margin - model.score(pos.head, pos.relation, pos.tail) +
      model.score(neg.head, neg.relation, neg.tail);
  if (loss <= 0.0) return 0.0;

  const std::size_t dim = model.dim();
  // d s(h,r,t) / d e_h = e_t, d s / d v_r = e_t, d s / d e_t = e_h + v_r.
  // The positive score enters with -1, the corrupted score with +1.
  auto side = [&](const TripleExample& ex, double sign) {
    const auto h = model.entity(ex.head);
    const auto r = model.relation(ex.relation);
    const auto t = model.entity(ex.tail);
    grads.add_entity(ex.head, t, sign, dim);
    grads.add_relation(ex.relation, t, sign, dim);
    std::vector<double> hr(dim);
    for (std::size_t i = 0; i < dim; ++i) hr[i] = h[i] + r[i];
    grads.add_entity(ex.tail, hr, sign, dim);
  };
  side(pos, -1.0);
  side(neg, +1.0);
  return loss;
}

namespace {

void normalize(std::span<double> v) {
  double norm = 0.0;
  for (const double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (double& x : v) x /= norm;
}

}  // namespace

EmbeddingModel train_embeddings(const KnowledgeGraph& g, const TrainConfig& cfg,
                                TrainStats* stats,
                                const std::function<void(std::size_t, double)>& progress) {
  if (g.triple_count() == 0) throw Error("cannot train embeddings on an empty graph");
  EmbeddingModel model(g.entity_count(), g.relation_count(), cfg.dim);
  Rng rng(cfg.seed);

  const double bound = 6.0 / std::sqrt(static_cast<double>(cfg.dim));
  for (std::size_t e = 0; e < g.entity_count(); ++e) {
    auto v = model.entity(static_cast<EntityId>(e));
    for (double& x : v) x = rng.uniform(-bound, bound);
    normalize(v);
  }
  for (std::size_t r = 0; r < g.relation_count(); ++r) {
    auto v = model.relation(static_cast<RelationId>(r));
    for (double& x : v) x = rng.uniform(-bound, bound);
  }

  // Same-class candidate pools for corruption.
  std::vector<std::vector<EntityId>> pools(6);
  for (std::size_t e = 0; e < g.entity_count(); ++e) {
    pools[static_cast<std::size_t>(g.entity_class(static_cast<EntityId>(e)))].push_back(
        static_cast<EntityId>(e));
  }
  auto pool_of = [&](EntityId e) -> const std::vector<EntityId>& {
    return pools[static_cast<std::size_t>(g.entity_class(e))];
  };

  std::vector<std::size_t> order(g.triple_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto triples = g.triples();

  if (stats) stats->epoch_loss.clear();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(order, rng);
    double epoch_loss = 0.0;
    std::size_t updates = 0;
    for (const std::size_t idx : order) {
      const auto& t = triples[idx];
      const TripleExample pos{t[0], t[1], t[2]};

      TripleExample neg = pos;
      bool found = false;
      for (std::size_t attempt = 0; attempt < cfg.negative_retries; ++attempt) {
        const bool corrupt_head = rng.coin();
        const auto& pool = pool_of(corrupt_head ? pos.head : pos.tail);
        if (pool.size() < 2) break;
        const EntityId drawn = pool[rng.below(pool.size())];
        neg = pos;
        (corrupt_head ? neg.head : neg.tail) = drawn;
        if ((corrupt_head ? drawn != pos.head : drawn != pos.tail) &&
            !g.has_triple(neg.head, neg.relation, neg.tail)) {
          found = true;
          break;
        }
      }
      if (!found) continue;

      Gradients grads;
      const double loss = accumulate_margin_gradients(model, pos, neg, cfg.margin, grads);
      epoch_loss += loss;
      ++updates;
      if (loss <= 0.0) continue;
      for (const auto& [e, grad] : grads.entity) {
        auto v = model.entity(e);
        for (std::size_t i = 0; i < cfg.dim; ++i) v[i] -= cfg.learning_rate * grad[i];
        normalize(v);
      }
      for (const auto& [r, grad] : grads.relation) {
        auto v = model.relation(r);
        for (std::size_t i = 0; i < cfg.dim; ++i) v[i] -= cfg.learning_rate * grad[i];
      }
    }
    const double mean = updates == 0 ? 0.0 : epoch_loss / static_cast<double>(updates);
    if (stats) stats->epoch_loss.push_back(mean);
    if (progress) progress(epoch, mean);
  }
  return model;
}

namespace {

void write_vector(std::ofstream& out, std::string_view name, std::span<const double> v) {
  out << name << '\t';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    out << buf;
  }
  out << '\n';
}

}  // namespace

void write_embeddings(const EmbeddingModel& model, const KnowledgeGraph& g,
                      const std::filesystem::path& file) {
  if (model.entity_count() != g.entity_count() ||
      model.relation_count() != g.relation_count()) {
    throw Error("embedding model does not match graph shape");
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write embedding file: " + file.string());
  for (std::size_t e = 0; e < g.entity_count(); ++e) {
    write_vector(out, g.entity_name(static_cast<EntityId>(e)),
                 model.entity(static_cast<EntityId>(e)));
  }
  for (std::size_t r = 0; r < g.relation_count(); ++r) {
    write_vector(out, g.relation_name(static_cast<RelationId>(r)),
                 model.relation(static_cast<RelationId>(r)));
  }
  if (!out) throw Error("failed writing embedding file: " + file.string());
}

EmbeddingModel read_embeddings(const KnowledgeGraph& g, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open embedding file: " + file.string());

  EmbeddingModel model;
  std::vector<bool> entity_seen(g.entity_count(), false);
  std::vector<bool> relation_seen(g.relation_count(), false);
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto at = [&](const std::string& msg) {
      return Error(file.string() + ":" + std::to_string(line_no) + ": " + msg);
    };
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw at("expected `name<TAB>v1,v2,...`");
    const std::string name = line.substr(0, tab);

    std::vector<double> values;
    std::size_t start = tab + 1;
    while (start <= line.size()) {
      auto comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      try {
        std::size_t used = 0;
        const std::string field = line.substr(start, comma - start);
        values.push_back(std::stod(field, &used));
        if (used != field.size()) throw at("bad number `" + field + "`");
      } catch (const std::logic_error&) {
        throw at("bad number in vector");
      }
      start = comma + 1;
    }
    if (values.empty()) throw at("empty vector");
    if (dim == 0) {
      dim = values.size();
      model = EmbeddingModel(g.entity_count(), g.relation_count(), dim);
    } else if (values.size() != dim) {
      throw at("vector has " + std::to_string(values.size()) + " components, expected " +
               std::to_string(dim));
    }

    const auto ent = g.find_entity(name);
    const auto rel = g.find_relation(name);
    if (ent && rel) throw at("`" + name + "` names both an entity and a relation");
    if (ent) {
      if (entity_seen[*ent]) throw at("duplicate vector for `" + name + "`");
      entity_seen[*ent] = true;
      std::copy(values.begin(), values.end(), model.entity(*ent).begin());
    } else if (rel) {
      if (relation_seen[*rel]) throw at("duplicate vector for `" + name + "`");
      relation_seen[*rel] = true;
      std::copy(values.begin(), values.end(), model.relation(*rel).begin());
    } else {
      throw at("`" + name + "` is neither an entity nor a relation of the graph");
    }
  }

  const auto missing_entities =
      std::count(entity_seen.begin(), entity_seen.end(), false);
  const auto missing_relations =
      std::count(relation_seen.begin(), relation_seen.end(), false);
  if (dim == 0 || missing_entities > 0 || missing_relations > 0) {
    throw Error(file.string() + ": incomplete embedding file, missing " +
                std::to_string(missing_entities) + " entity and " +
                std::to_string(missing_relations) + " relation vectors");
  }
  return model;
}

}  // namespace pathfair
