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

#ifndef PATHFAIR_CANDIDATES_HPP_
#define PATHFAIR_CANDIDATES_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pathfair/embedding.hpp"
#include "pathfair/kg.hpp"
#include "pathfair/path.hpp"

namespace pathfair {

struct ScoredPath {
  Path path;
  double score = 0.0;  // embedding walk score, see path_embedding_score

  friend bool operator==(const ScoredPath&, const ScoredPath&) = default;
};

// Walk mass of one pattern between the user and this item: how many walks of
// that shape connect them and the sum of their walk scores. Tallies cover
// every enumerated walk, so heavy users keep their full path mass even though
// only a few concrete walks are stored.
struct PatternTally {
  PathPattern pattern;
  std::uint64_t walks = 0;
  double score_sum = 0.0;

  friend bool operator==(const PatternTally&, const PatternTally&) = default;
};

// One recommendable item for a user together with the walks that explain it.
// `tallies` aggregates all enumerated walks (pattern-sorted); `paths` keeps
// only the best-scoring few for display. sid is Simpson diversity over the
// tally counts; it is derived, never persisted.
struct Candidate {
  EntityId item = 0;
  double rec_score = 0.0;
  std::vector<PatternTally> tallies;
  std::vector<ScoredPath> paths;
  double sid = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct CandidateSet {
  EntityId user = 0;
  std::vector<Candidate> candidates;

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

// Walk score: with e_0 the start entity and (r_i, e_i) the i-th step's
// relation and reached entity, sum_i (e_0 + r_i) . e_i. Reverse steps reuse
// the forward relation vector.
double path_embedding_score(const EmbeddingModel& model, const Path& path);

// Predicted preference of user for item, (e_u + v_rel) . e_v.
double preference_score(const EmbeddingModel& model, EntityId user, RelationId rel,
                        EntityId item);

// Simpson diversity of the pattern counts of a walk set.
double path_pattern_diversity(std::span<const ScoredPath> paths);

// Simpson diversity over tally walk counts.
double pattern_tally_diversity(std::span<const PatternTally> tallies);

struct CandidateBuildConfig {
  std::size_t top_n = 100;
  std::size_t max_len = kMaxPatternLength;
  // Display cap: concrete walks stored per (user, item), best score first.
  // Tallies always cover every walk regardless of this cap.
  std::size_t max_paths_per_item = 10;
  std::string purchase_relation = "purchase";
};

// Candidates for one user: every item reachable by a walk of length
// <= max_len that the user has not already purchased, scored by
// preference_score, sorted by score descending (ties by ascending item id),
// truncated to top_n. Every enumerated walk lands in the pattern tallies; per
// item the max_paths_per_item best-scoring walks are also kept verbatim (ties
// by enumeration order).
CandidateSet build_candidates(const KnowledgeGraph& g, const EmbeddingModel& model,
                              EntityId user, const CandidateBuildConfig& cfg);

// All users in id order. workers > 1 fans users out to a thread pool; the
// result is identical to the sequential run.
std::vector<CandidateSet> build_all_candidates(const KnowledgeGraph& g,
                                               const EmbeddingModel& model,
                                               const CandidateBuildConfig& cfg,
                                               std::size_t workers = 1);

inline constexpr int kCandidateSchemaVersion = 1;

// JSON-lines persistence, one object per user:
//   {"user": name, "candidates": [{"item": name, "rec_score": x,
//    "patterns": [{"steps": [{"rel": name, "dir": "fwd"|"rev"}],
//                  "walks": n, "score_sum": x}],
//    "paths": [{"nodes": [names], "steps": [...], "score": x}]}], "schema": 1}
// Candidates without walks are rejected at write time and on read. Reading
// validates names against the graph, walk structure, distinct items per user,
// tally consistency with the stored walks, and the schema version.
void write_candidates_jsonl(const KnowledgeGraph& g, std::span<const CandidateSet> sets,
                            const std::filesystem::path& file);
std::vector<CandidateSet> read_candidates_jsonl(const KnowledgeGraph& g,
                                                const std::filesystem::path& file);

}  // namespace pathfair

#endif  // PATHFAIR_CANDIDATES_HPP_
