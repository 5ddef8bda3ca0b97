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

#ifndef PATHFAIR_RERANK_HPP_
#define PATHFAIR_RERANK_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pathfair/candidates.hpp"
#include "pathfair/dataset.hpp"
#include "pathfair/path.hpp"
#include "pathfair/solver.hpp"

namespace pathfair {

// Weight of one pattern within a (user, item) walk set:
//   ln(2 + n_pattern / n_total), in (ln 2, ln 3].
double pattern_weight(std::uint64_t pattern_paths, std::uint64_t total_paths);

// Preference adjustment of one pattern:
//   (w / D(pattern)) * sum of the walk scores of that pattern,
// where D is the user's smoothed historical pattern distribution. Rare
// historical patterns are boosted, dominant ones damped.
double pattern_preference(double weight, double distribution_mass,
                          double summed_path_scores);

// Debiased walk score of a candidate: pattern_preference summed over its
// pattern tallies. Throws if a tallied pattern is outside the distribution's
// vocabulary support (mass would be pure smoothing).
double debiased_path_score(const Candidate& cand, const PatternDistribution& dist,
                           const std::map<PathPattern, std::uint64_t>& vocabulary);

// Per-candidate scores feeding selection and ranking. phi is the candidate's
// additive share of the user's explanation fairness score,
//   phi = alpha * sp + (1 - alpha) * lambda * sid.
struct CandidateScores {
  EntityId item = 0;
  double rec = 0.0;
  double sp = 0.0;
  double sid = 0.0;
  double phi = 0.0;
};

struct ScoredPool {
  EntityId user = 0;
  bool active = false;
  std::vector<CandidateScores> cands;
};

// One traversal per user yields both the global pattern vocabulary (every
// pattern of any user-to-item walk in the training graph, with its total walk
// count) and each user's historical pattern counts (walks ending at items the
// user purchased in training). The latter, smoothed against the vocabulary,
// is the distribution dividing the debiased walk scores.
struct PatternStats {
  std::map<PathPattern, std::uint64_t> vocabulary;
  // Aligned with KnowledgeGraph::users().
  std::vector<std::map<PathPattern, std::uint64_t>> historical;
};
PatternStats collect_pattern_stats(const KnowledgeGraph& g, RelationId purchase,
                                   std::size_t max_len, std::size_t workers = 1);

struct RerankConfig {
  double alpha = 0.75;
  double beta = 0.5;
  std::size_t k = 10;
  ConstraintMode mode = ConstraintMode::Group;
  double group_ratio = 0.05;
  // Empty: epsilons taken from the baseline selection's own disparities
  // (constraints then demand strict improvement). Otherwise explicit values.
  std::optional<EpsilonPair> epsilon;
  // Scale factors; unset means auto (lambda: mean |sp| / mean |sid|,
  // gamma: mean |rec| / mean |phi|, over the whole pool).
  std::optional<double> lambda;
  std::optional<double> gamma;
  double pseudo_count = 1.0;
  std::size_t max_len = kMaxPatternLength;
  std::size_t workers = 1;
  std::uint64_t seed = 1;
  double epsilon_shrink = 0.02;
  std::size_t max_applied_moves = 200000;
  std::size_t max_mu_doublings = 64;
  bool keep_trace = true;
};

struct RerankModel {
  std::vector<ScoredPool> pools;   // one per candidate set, same order
  GroupSplit split;                // over all graph users
  double lambda = 1.0;             // resolved scales
  double gamma = 1.0;
  double rec_min = 0.0;            // dataset-wide rec score range
  double rec_max = 0.0;
  std::size_t vocabulary_size = 0;
};

// Scores every candidate set against the training graph and resolves the
// scale factors. Candidate users must each have at least k candidates.
RerankModel build_rerank_model(const Dataset& data, std::span<const CandidateSet> sets,
                               const RerankConfig& cfg);

SolverInstance make_solver_instance(const RerankModel& model, std::size_t k,
                                    ConstraintMode mode);

// Final presentation order of a selection: descending
//   beta * gamma * phi + (1 - beta) * rec,
// ties by ascending item id.
struct RankedItem {
  EntityId item = 0;
  std::uint32_t pool_index = 0;
  double rec = 0.0;
  double phi = 0.0;
  double blend = 0.0;
};
std::vector<RankedItem> rank_selected(const ScoredPool& pool,
                                      std::span<const std::uint32_t> chosen, double beta,
                                      double gamma);

}  // namespace pathfair

#endif  // PATHFAIR_RERANK_HPP_
