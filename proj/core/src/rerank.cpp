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

#include "pathfair/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

#include "pathfair/error.hpp"

namespace pathfair {

double pattern_weight(std::uint64_t pattern_paths, std::uint64_t total_paths) {
  if (total_paths == 0) throw Error("pattern weight over an empty walk set");
  return std::log(2.0 + static_cast<double>(pattern_paths) /
                            static_cast<double>(total_paths));
}

double pattern_preference(double weight, double distribution_mass,
                          double summed_path_scores) {
  if (!(distribution_mass > 0.0)) throw Error("pattern mass must be positive");
  return weight / distribution_mass * summed_path_scores;
}

double debiased_path_score(const Candidate& cand, const PatternDistribution& dist,
                           const std::map<PathPattern, std::uint64_t>& vocabulary) {
  std::uint64_t total = 0;
  for (const auto& t : cand.tallies) total += t.walks;
  if (total == 0) throw Error("candidate without walk tallies");
  double acc = 0.0;
  for (const auto& t : cand.tallies) {
    if (vocabulary.find(t.pattern) == vocabulary.end()) {
      throw Error("candidate walk pattern outside the training vocabulary");
    }
    acc += pattern_preference(pattern_weight(t.walks, total), dist.mass(t.pattern),
                              t.score_sum);
  }
  return acc;
}

namespace {

// Packed pattern key for the counting traversal: per step 20 bits
// (relation << 1 | reversed) in bits 0..59, the length in bits 60..61.
// Keeps the hot loop free of vector keys and allocation.
constexpr std::uint32_t kStepBits = 20;
constexpr std::uint32_t kMaxPackedRelation = 1u << (kStepBits - 1);
static_assert(kMaxPatternLength * kStepBits <= 60);

std::uint64_t pack_steps(const std::uint32_t* codes, std::size_t len) {
  std::uint64_t key = static_cast<std::uint64_t>(len) << 60u;
  for (std::size_t i = 0; i < len; ++i) {
    key |= static_cast<std::uint64_t>(codes[i]) << (i * kStepBits);
  }
  return key;
}

PathPattern unpack_steps(std::uint64_t key) {
  const auto len = static_cast<std::size_t>(key >> 60u);
  PathPattern pattern;
  pattern.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    const auto code =
        static_cast<std::uint32_t>((key >> (i * kStepBits)) & ((1u << kStepBits) - 1));
    pattern.push_back(PatternStep{code >> 1,
                                  (code & 1) ? Direction::Reverse : Direction::Forward});
  }
  return pattern;
}

struct UserPatternCounts {
  std::unordered_map<std::uint64_t, std::uint64_t> all;        // any item terminal
  std::unordered_map<std::uint64_t, std::uint64_t> purchased;  // historical terminals
};

void count_patterns_for_user(const KnowledgeGraph& g, EntityId user, RelationId purchase,
                             std::size_t max_len, std::vector<char>& purchased_flag,
                             UserPatternCounts& out) {
  for (const auto& edge : g.neighbors(user)) {
    if (!edge.reversed && edge.relation == purchase &&
        g.entity_class(edge.neighbor) == EntityClass::Item) {
      purchased_flag[edge.neighbor] = 1;
    }
  }

  EntityId nodes[kMaxPatternLength + 1];
  std::uint32_t codes[kMaxPatternLength];
  nodes[0] = user;

  // Explicit stack of adjacency cursors; depth d extends a walk of d steps.
  struct Frame {
    const AdjacencyEdge* it;
    const AdjacencyEdge* end;
  };
  Frame stack[kMaxPatternLength];
  std::size_t depth = 0;
  {
    const auto adj = g.neighbors(user);
    stack[0] = {adj.data(), adj.data() + adj.size()};
  }
  while (true) {
    Frame& frame = stack[depth];
    if (frame.it == frame.end) {
      if (depth == 0) break;
      --depth;
      continue;
    }
    const AdjacencyEdge edge = *frame.it++;
    bool seen = false;
    for (std::size_t i = 0; i <= depth; ++i) {
      if (nodes[i] == edge.neighbor) {
        seen = true;
        break;
      }
    }
    if (seen) continue;
    nodes[depth + 1] = edge.neighbor;
    codes[depth] = (edge.relation << 1) | (edge.reversed ? 1u : 0u);
    if (g.entity_class(edge.neighbor) == EntityClass::Item) {
      const std::uint64_t key = pack_steps(codes, depth + 1);
      ++out.all[key];
      if (purchased_flag[edge.neighbor]) ++out.purchased[key];
    }
    if (depth + 1 < max_len) {
      ++depth;
      const auto adj = g.neighbors(edge.neighbor);
      stack[depth] = {adj.data(), adj.data() + adj.size()};
    }
  }

  for (const auto& edge : g.neighbors(user)) {
    if (!edge.reversed && edge.relation == purchase) purchased_flag[edge.neighbor] = 0;
  }
}

}  // namespace

PatternStats collect_pattern_stats(const KnowledgeGraph& g, RelationId purchase,
                                   std::size_t max_len, std::size_t workers) {
  if (g.relation_count() >= kMaxPackedRelation) {
    throw Error("too many relations for the packed pattern traversal");
  }
  max_len = std::min(max_len, kMaxPatternLength);
  const auto users = g.users();
  std::vector<UserPatternCounts> per_user(users.size());

  auto run_range = [&](std::size_t worker, std::size_t stride) {
    std::vector<char> purchased_flag(g.entity_count(), 0);
    for (std::size_t i = worker; i < users.size(); i += stride) {
      count_patterns_for_user(g, users[i], purchase, max_len, purchased_flag,
                              per_user[i]);
    }
  };
  if (workers <= 1) {
    run_range(0, 1);
  } else {
    const std::size_t n = std::min(workers, users.size() == 0 ? 1 : users.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(run_range, w, n);
    for (auto& t : pool) t.join();
  }

  PatternStats stats;
  stats.historical.resize(users.size());
  std::unordered_map<std::uint64_t, std::uint64_t> vocab;
  for (std::size_t i = 0; i < users.size(); ++i) {
    for (const auto& [key, n] : per_user[i].all) vocab[key] += n;
    auto& hist = stats.historical[i];
    for (const auto& [key, n] : per_user[i].purchased) hist[unpack_steps(key)] = n;
  }
  for (const auto& [key, n] : vocab) stats.vocabulary[unpack_steps(key)] = n;
  return stats;
}

RerankModel build_rerank_model(const Dataset& data, std::span<const CandidateSet> sets,
                               const RerankConfig& cfg) {
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) throw Error("alpha must lie in [0, 1]");
  if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) throw Error("beta must lie in [0, 1]");
  if (cfg.k == 0) throw Error("k must be positive");

  const auto& g = data.graph;
  const auto stats = collect_pattern_stats(g, data.purchase, cfg.max_len, cfg.workers);

  RerankModel model;
  model.split = split_by_activity(data, cfg.group_ratio);
  model.vocabulary_size = stats.vocabulary.size();

  const auto users = g.users();
  auto user_index = [&](EntityId user) {
    const auto it = std::lower_bound(users.begin(), users.end(), user);
    if (it == users.end() || *it != user) {
      throw Error("candidate user " + g.entity_name(user) + " is not a graph user");
    }
    return static_cast<std::size_t>(it - users.begin());
  };

  model.pools.reserve(sets.size());
  for (const auto& set : sets) {
    if (set.candidates.size() < cfg.k) {
      throw Error("user " + g.entity_name(set.user) + " has " +
                  std::to_string(set.candidates.size()) + " candidates, needs at least " +
                  std::to_string(cfg.k));
    }
    const std::size_t idx = user_index(set.user);
    const PatternDistribution dist(stats.historical[idx], cfg.pseudo_count,
                                   model.vocabulary_size);
    ScoredPool pool;
    pool.user = set.user;
    pool.active = model.split.active[idx];
    pool.cands.reserve(set.candidates.size());
    for (const auto& cand : set.candidates) {
      CandidateScores cs;
      cs.item = cand.item;
      cs.rec = cand.rec_score;
      cs.sid = cand.sid;
      cs.sp = debiased_path_score(cand, dist, stats.vocabulary);
      pool.cands.push_back(cs);
    }
    model.pools.push_back(std::move(pool));
  }

  double sp_abs = 0.0, sid_abs = 0.0, rec_abs = 0.0;
  std::size_t n = 0;
  model.rec_min = std::numeric_limits<double>::infinity();
  model.rec_max = -std::numeric_limits<double>::infinity();
  for (const auto& pool : model.pools) {
    for (const auto& cs : pool.cands) {
      sp_abs += std::abs(cs.sp);
      sid_abs += std::abs(cs.sid);
      rec_abs += std::abs(cs.rec);
      model.rec_min = std::min(model.rec_min, cs.rec);
      model.rec_max = std::max(model.rec_max, cs.rec);
      ++n;
    }
  }
  if (n == 0) throw Error("no candidates to rerank");

  model.lambda = cfg.lambda.value_or(sid_abs > 0.0 ? sp_abs / sid_abs : 1.0);
  double phi_abs = 0.0;
  for (auto& pool : model.pools) {
    for (auto& cs : pool.cands) {
      cs.phi = cfg.alpha * cs.sp + (1.0 - cfg.alpha) * model.lambda * cs.sid;
      phi_abs += std::abs(cs.phi);
    }
  }
  model.gamma = cfg.gamma.value_or(phi_abs > 0.0 ? rec_abs / phi_abs : 1.0);
  return model;
}

SolverInstance make_solver_instance(const RerankModel& model, std::size_t k,
                                    ConstraintMode mode) {
  SolverInstance inst;
  inst.k = k;
  inst.mode = mode;
  const double range = model.rec_max - model.rec_min;
  inst.users.reserve(model.pools.size());
  for (const auto& pool : model.pools) {
    SolverUser u;
    u.active = pool.active;
    u.rec.reserve(pool.cands.size());
    u.phi.reserve(pool.cands.size());
    u.norm_rec.reserve(pool.cands.size());
    for (const auto& cs : pool.cands) {
      u.rec.push_back(cs.rec);
      u.phi.push_back(cs.phi);
      u.norm_rec.push_back(range > 0.0 ? (cs.rec - model.rec_min) / range : 1.0);
    }
    inst.users.push_back(std::move(u));
  }
  return inst;
}

std::vector<RankedItem> rank_selected(const ScoredPool& pool,
                                      std::span<const std::uint32_t> chosen, double beta,
                                      double gamma) {
  std::vector<RankedItem> out;
  out.reserve(chosen.size());
  for (const auto idx : chosen) {
    const auto& cs = pool.cands.at(idx);
    RankedItem item;
    item.item = cs.item;
    item.pool_index = idx;
    item.rec = cs.rec;
    item.phi = cs.phi;
    item.blend = beta * gamma * cs.phi + (1.0 - beta) * cs.rec;
    out.push_back(item);
  }
  std::sort(out.begin(), out.end(), [](const RankedItem& a, const RankedItem& b) {
    if (a.blend != b.blend) return a.blend > b.blend;
    return a.item < b.item;
  });
  return out;
}

}  // namespace pathfair
