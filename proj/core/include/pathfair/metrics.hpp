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

#ifndef PATHFAIR_METRICS_HPP_
#define PATHFAIR_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>

namespace pathfair {

// Simpson's index of diversity over category counts: the probability that two
// draws without replacement fall in different categories,
//   1 - sum n_i (n_i - 1) / (N (N - 1)).
// Zero or one observation gives 0 by convention.
double simpson_diversity(std::span<const std::uint64_t> counts);

// Gini coefficient of a non-negative sample:
//   sum_{x,y} |v_x - v_y| / (2 m sum_i v_i)
// over ordered pairs. All-zero input gives 0. Throws on empty or negative
// input. Computed via the sorted identity, O(m log m).
double gini_coefficient(std::span<const double> values);

// Discounted cumulative gain of gains already in rank order:
//   sum_r gains[r] / log2(r + 2),  r zero-based.
double dcg(std::span<const double> gains);

// DCG of the first k ranked gains divided by the DCG of the best possible
// ordering of all gains. Zero when no gain is positive.
double ndcg_at_k(std::span<const double> ranked_gains, std::size_t k);

// Binary-gain NDCG of a ranked id list against a relevant set: DCG over the
// top k divided by the ideal DCG of min(k, |relevant|) hits. Zero when
// relevant is empty. Ranked ids must be distinct.
double ndcg_at_k(std::span<const std::uint32_t> ranked,
                 const std::set<std::uint32_t>& relevant, std::size_t k);

// Harmonic mean of precision (hits / k) and recall (hits / |relevant|) over
// the top k. Zero when either denominator is empty or nothing was hit.
double f1_at_k(std::span<const std::uint32_t> ranked,
               const std::set<std::uint32_t>& relevant, std::size_t k);

// Absolute gap between in-group and out-group means. Both sides must be
// non-empty.
double group_mean_gap(std::span<const double> values, std::span<const bool> in_group);

}  // namespace pathfair

#endif  // PATHFAIR_METRICS_HPP_
