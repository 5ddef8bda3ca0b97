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

#include "pathfair/candidates.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include "nlohmann/json.hpp"
#include "pathfair/error.hpp"
#include "pathfair/metrics.hpp"

namespace pathfair {

double path_embedding_score(const EmbeddingModel& model, const Path& path) {
  const auto start = model.entity(path.nodes.front());
  double acc = 0.0;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    const auto rel = model.relation(path.steps[i].relation);
    const auto node = model.entity(path.nodes[i + 1]);
    for (std::size_t d = 0; d < model.dim(); ++d) acc += (start[d] + rel[d]) * node[d];
  }
  return acc;
}

double preference_score(const EmbeddingModel& model, EntityId user, RelationId rel,
                        EntityId item) {
  return model.score(user, rel, item);
}

double path_pattern_diversity(std::span<const ScoredPath> paths) {
  std::map<PathPattern, std::uint64_t> counts;
  for (const auto& p : paths) ++counts[p.path.steps];
  std::vector<std::uint64_t> values;
  values.reserve(counts.size());
  for (const auto& [pattern, n] : counts) values.push_back(n);
  return simpson_diversity(values);
}

double pattern_tally_diversity(std::span<const PatternTally> tallies) {
  std::vector<std::uint64_t> values;
  values.reserve(tallies.size());
  for (const auto& t : tallies) values.push_back(t.walks);
  return simpson_diversity(values);
}

namespace {

struct PathEntry {
  double score;
  std::size_t order;  // enumeration index, stable tie-break
  Path path;
};

// Heap ordering: the element to evict first is the lowest score, then the
// latest enumeration index.
bool worse(const PathEntry& a, const PathEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.order < b.order;
}

}  // namespace

CandidateSet build_candidates(const KnowledgeGraph& g, const EmbeddingModel& model,
                              EntityId user, const CandidateBuildConfig& cfg) {
  if (cfg.top_n == 0 || cfg.max_paths_per_item == 0) {
    throw Error("candidate build requires positive top_n and path cap");
  }
  const RelationId purchase = g.relation(cfg.purchase_relation);

  struct ItemState {
    std::map<PathPattern, std::pair<std::uint64_t, double>> tally;
    std::vector<PathEntry> heap;
  };
  std::map<EntityId, ItemState> by_item;
  std::size_t order = 0;
  for_each_user_item_path(g, user, cfg.max_len, [&](const Path& p) {
    const EntityId item = p.nodes.back();
    if (g.has_triple(user, purchase, item)) return;
    auto& state = by_item[item];
    const double score = path_embedding_score(model, p);
    auto& slot = state.tally[p.steps];
    slot.first += 1;
    slot.second += score;
    auto& heap = state.heap;
    PathEntry entry{score, order++, p};
    if (heap.size() < cfg.max_paths_per_item) {
      heap.push_back(std::move(entry));
      std::push_heap(heap.begin(), heap.end(), worse);
    } else if (entry.score > heap.front().score) {
      std::pop_heap(heap.begin(), heap.end(), worse);
      heap.back() = std::move(entry);
      std::push_heap(heap.begin(), heap.end(), worse);
    }
  });

  CandidateSet set;
  set.user = user;
  set.candidates.reserve(by_item.size());
  for (auto& [item, state] : by_item) {
    auto& heap = state.heap;
    std::sort(heap.begin(), heap.end(), [](const PathEntry& a, const PathEntry& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.order < b.order;
    });
    Candidate cand;
    cand.item = item;
    cand.rec_score = preference_score(model, user, purchase, item);
    cand.tallies.reserve(state.tally.size());
    for (const auto& [pattern, slot] : state.tally) {
      cand.tallies.push_back(PatternTally{pattern, slot.first, slot.second});
    }
    cand.paths.reserve(heap.size());
    for (auto& entry : heap) {
      cand.paths.push_back(ScoredPath{std::move(entry.path), entry.score});
    }
    cand.sid = pattern_tally_diversity(cand.tallies);
    set.candidates.push_back(std::move(cand));
  }
  std::sort(set.candidates.begin(), set.candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.rec_score != b.rec_score) return a.rec_score > b.rec_score;
              return a.item < b.item;
            });
  if (set.candidates.size() > cfg.top_n) set.candidates.resize(cfg.top_n);
  return set;
}

std::vector<CandidateSet> build_all_candidates(const KnowledgeGraph& g,
                                               const EmbeddingModel& model,
                                               const CandidateBuildConfig& cfg,
                                               std::size_t workers) {
  const auto users = g.users();
  std::vector<CandidateSet> sets(users.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < users.size(); ++i) {
      sets[i] = build_candidates(g, model, users[i], cfg);
    }
    return sets;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (std::size_t w = 0; w < std::min(workers, users.size()); ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= users.size()) return;
        try {
          sets[i] = build_candidates(g, model, users[i], cfg);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return sets;
}

namespace {

using nlohmann::json;

json steps_to_json(const KnowledgeGraph& g, const PathPattern& pattern) {
  json steps = json::array();
  for (const auto& s : pattern) {
    steps.push_back({{"rel", g.relation_name(s.relation)},
                     {"dir", s.direction == Direction::Forward ? "fwd" : "rev"}});
  }
  return steps;
}

PathPattern steps_from_json(const KnowledgeGraph& g, const json& steps,
                            const std::string& where) {
  if (!steps.is_array() || steps.empty()) {
    throw Error(where + ": steps must be a non-empty array");
  }
  PathPattern pattern;
  pattern.reserve(steps.size());
  for (const auto& s : steps) {
    const std::string dir = s.at("dir").get<std::string>();
    if (dir != "fwd" && dir != "rev") throw Error(where + ": dir must be fwd or rev");
    pattern.push_back(PatternStep{
        g.relation(s.at("rel").get<std::string>()),
        dir == "fwd" ? Direction::Forward : Direction::Reverse});
  }
  return pattern;
}

json path_to_json(const KnowledgeGraph& g, const ScoredPath& sp) {
  json nodes = json::array();
  for (const auto n : sp.path.nodes) nodes.push_back(g.entity_name(n));
  return {{"nodes", std::move(nodes)},
          {"steps", steps_to_json(g, sp.path.steps)},
          {"score", sp.score}};
}

ScoredPath path_from_json(const KnowledgeGraph& g, const json& j,
                          const std::string& where) {
  ScoredPath sp;
  const auto& nodes = j.at("nodes");
  const auto& steps = j.at("steps");
  if (!nodes.is_array() || !steps.is_array() || nodes.size() != steps.size() + 1) {
    throw Error(where + ": walk must have one more node than steps");
  }
  for (const auto& n : nodes) sp.path.nodes.push_back(g.entity(n.get<std::string>()));
  sp.path.steps = steps_from_json(g, steps, where);
  sp.score = j.at("score").get<double>();
  if (!is_valid_path(g, sp.path)) throw Error(where + ": walk is not valid in the graph");
  return sp;
}

}  // namespace

void write_candidates_jsonl(const KnowledgeGraph& g, std::span<const CandidateSet> sets,
                            const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write candidate file: " + file.string());
  for (const auto& set : sets) {
    json cands = json::array();
    std::set<EntityId> seen;
    for (const auto& cand : set.candidates) {
      if (cand.paths.empty() || cand.tallies.empty()) {
        throw Error("candidate " + g.entity_name(cand.item) + " of " +
                    g.entity_name(set.user) + " has no explaining walks");
      }
      if (!seen.insert(cand.item).second) {
        throw Error("duplicate candidate " + g.entity_name(cand.item) + " for " +
                    g.entity_name(set.user));
      }
      json patterns = json::array();
      for (const auto& t : cand.tallies) {
        patterns.push_back({{"steps", steps_to_json(g, t.pattern)},
                            {"walks", t.walks},
                            {"score_sum", t.score_sum}});
      }
      json paths = json::array();
      for (const auto& sp : cand.paths) paths.push_back(path_to_json(g, sp));
      cands.push_back({{"item", g.entity_name(cand.item)},
                       {"rec_score", cand.rec_score},
                       {"patterns", std::move(patterns)},
                       {"paths", std::move(paths)}});
    }
    const json line = {{"user", g.entity_name(set.user)},
                       {"candidates", std::move(cands)},
                       {"schema", kCandidateSchemaVersion}};
    out << line.dump() << '\n';
  }
  if (!out) throw Error("failed writing candidate file: " + file.string());
}

std::vector<CandidateSet> read_candidates_jsonl(const KnowledgeGraph& g,
                                                const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open candidate file: " + file.string());
  std::vector<CandidateSet> sets;
  std::set<EntityId> seen_users;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = file.string() + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(where + ": " + e.what());
    }
    try {
      const int schema = j.at("schema").get<int>();
      if (schema != kCandidateSchemaVersion) {
        throw Error(where + ": schema version " + std::to_string(schema) +
                    " not supported, this build reads version " +
                    std::to_string(kCandidateSchemaVersion));
      }
      CandidateSet set;
      set.user = g.entity(j.at("user").get<std::string>());
      if (g.entity_class(set.user) != EntityClass::User) {
        throw Error(where + ": " + g.entity_name(set.user) + " is not a user");
      }
      if (!seen_users.insert(set.user).second) {
        throw Error(where + ": duplicate user " + g.entity_name(set.user));
      }
      std::set<EntityId> items;
      for (const auto& cj : j.at("candidates")) {
        Candidate cand;
        cand.item = g.entity(cj.at("item").get<std::string>());
        if (g.entity_class(cand.item) != EntityClass::Item) {
          throw Error(where + ": " + g.entity_name(cand.item) + " is not an item");
        }
        if (!items.insert(cand.item).second) {
          throw Error(where + ": duplicate item " + g.entity_name(cand.item));
        }
        cand.rec_score = cj.at("rec_score").get<double>();
        for (const auto& tj : cj.at("patterns")) {
          PatternTally tally;
          tally.pattern = steps_from_json(g, tj.at("steps"), where);
          tally.walks = tj.at("walks").get<std::uint64_t>();
          tally.score_sum = tj.at("score_sum").get<double>();
          if (tally.walks == 0) {
            throw Error(where + ": pattern tally with zero walks");
          }
          cand.tallies.push_back(std::move(tally));
        }
        std::sort(cand.tallies.begin(), cand.tallies.end(),
                  [](const PatternTally& a, const PatternTally& b) {
                    return a.pattern < b.pattern;
                  });
        for (std::size_t t = 1; t < cand.tallies.size(); ++t) {
          if (cand.tallies[t - 1].pattern == cand.tallies[t].pattern) {
            throw Error(where + ": duplicate pattern tally for " +
                        g.entity_name(cand.item));
          }
        }
        std::map<PathPattern, std::uint64_t> stored;
        for (const auto& pj : cj.at("paths")) {
          auto sp = path_from_json(g, pj, where);
          if (sp.path.nodes.front() != set.user || sp.path.nodes.back() != cand.item) {
            throw Error(where + ": walk endpoints do not match user and item");
          }
          ++stored[sp.path.steps];
          cand.paths.push_back(std::move(sp));
        }
        if (cand.paths.empty() || cand.tallies.empty()) {
          throw Error(where + ": candidate " + g.entity_name(cand.item) +
                      " has no explaining walks");
        }
        for (const auto& [pattern, n] : stored) {
          const auto it = std::find_if(
              cand.tallies.begin(), cand.tallies.end(),
              [&](const PatternTally& t) { return t.pattern == pattern; });
          if (it == cand.tallies.end() || it->walks < n) {
            throw Error(where + ": stored walks exceed the pattern tallies of " +
                        g.entity_name(cand.item));
          }
        }
        cand.sid = pattern_tally_diversity(cand.tallies);
        set.candidates.push_back(std::move(cand));
      }
      sets.push_back(std::move(set));
    } catch (const json::exception& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return sets;
}

}  // namespace pathfair
