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

#ifndef PATHFAIR_SOLVER_HPP_
#define PATHFAIR_SOLVER_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace pathfair {

enum class ConstraintMode { Group, Individual };

// One user's candidate pool as the solver sees it. All vectors are aligned
// and indexed by candidate position.
struct SolverUser {
  std::vector<double> rec;        // objective coefficients (preference scores)
  std::vector<double> phi;        // additive explanation fairness shares
  std::vector<double> norm_rec;   // proxy quality gains, min-max normalized
  bool active = false;            // group membership (group mode)
};

// Select exactly k candidates per user, maximizing the summed rec scores
// subject to two disparity constraints, both strict:
//   quality:   gap (group mode) or Gini (individual mode) of the per-user
//              proxy quality, the DCG of the selected norm_rec values in
//              descending order;
//   diversity: the same statistic over the per-user summed phi.
// Gini inputs are clamped at zero.
struct SolverInstance {
  std::vector<SolverUser> users;
  std::size_t k = 0;
  ConstraintMode mode = ConstraintMode::Group;
};

struct EpsilonPair {
  double quality = 0.0;
  double diversity = 0.0;
};

struct SolverConfig {
  EpsilonPair epsilon;
  // Penalties are charged against epsilon * (1 - shrink) so that a start
  // sitting exactly on the strict boundary is still pushed inward.
  // Feasibility itself is always judged against the unshrunk epsilon.
  double epsilon_shrink = 0.02;
  std::uint64_t seed = 1;
  double mu_init = 1.0;
  std::size_t max_mu_doublings = 64;
  std::size_t max_applied_moves = 200000;
  bool keep_trace = false;
};

struct TraceRow {
  std::size_t iter = 0;
  double objective = 0.0;
  double violation_quality = 0.0;   // max(0, value - epsilon)
  double violation_diversity = 0.0;
  bool accepted_move = false;
};

struct SolveResult {
  // Per user, the chosen candidate indices, ascending, size k.
  std::vector<std::vector<std::uint32_t>> selection;
  double objective = 0.0;
  double quality_value = 0.0;    // disparity statistics of the returned selection
  double diversity_value = 0.0;
  bool feasible = false;
  std::size_t applied_moves = 0;
  std::size_t mu_doublings = 0;
  std::vector<TraceRow> trace;
};

// Unconstrained optimum: per user the k best rec scores, ties to the lower
// index. Also the reference point for "baseline" epsilons.
std::vector<std::vector<std::uint32_t>> baseline_selection(const SolverInstance& inst);

// Disparity statistics of an arbitrary selection.
struct DisparityValues {
  double quality = 0.0;
  double diversity = 0.0;
  double objective = 0.0;
};
DisparityValues measure_selection(const SolverInstance& inst,
                                  const std::vector<std::vector<std::uint32_t>>& selection);

// Greedy start, then penalty-driven local search over single-swap moves
// (drop one selected candidate, add one unselected, same user). Best
// improving move per user per pass, users scanned in a seeded permutation.
// Penalty weights double when a pass applies nothing while infeasible.
// Returns the best strictly feasible solution seen, or the least-violating
// one (never worse than the greedy start) flagged infeasible.
SolveResult solve_constrained_selection(const SolverInstance& inst, const SolverConfig& cfg);

// Full enumeration over all per-user k-subsets. Throws when the product of
// subset counts exceeds 1e6. Deterministic: first-best in lexicographic
// enumeration order.
SolveResult exhaustive_oracle(const SolverInstance& inst, const SolverConfig& cfg);

}  // namespace pathfair

#endif  // PATHFAIR_SOLVER_HPP_
