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

#include "pathfair/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pathfair/error.hpp"

namespace pathfair {

double simpson_diversity(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (const auto n : counts) total += n;
  if (total <= 1) return 0.0;
  double same = 0.0;
  for (const auto n : counts) {
    same += static_cast<double>(n) * static_cast<double>(n - (n > 0 ? 1 : 0));
  }
  const double pairs = static_cast<double>(total) * static_cast<double>(total - 1);
  return 1.0 - same / pairs;
}

double gini_coefficient(std::span<const double> values) {
  if (values.empty()) throw Error("gini coefficient of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  double sum = 0.0;
  for (const double v : sorted) {
    if (v < 0.0) throw Error("gini coefficient requires non-negative values");
    sum += v;
  }
  if (sum == 0.0) return 0.0;
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  // sum_{x,y} |v_x - v_y| = 2 sum_i (2i - m - 1) v_(i) with i one-based over
  // the ascending order, so the pair normalization folds into:
  double acc = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    acc += (2.0 * static_cast<double>(i + 1) - m - 1.0) * sorted[i];
  }
  return acc / (m * sum);
}

double dcg(std::span<const double> gains) {
  double acc = 0.0;
  for (std::size_t r = 0; r < gains.size(); ++r) {
    acc += gains[r] / std::log2(static_cast<double>(r) + 2.0);
  }
  return acc;
}

double ndcg_at_k(std::span<const double> ranked_gains, std::size_t k) {
  const std::size_t cut = std::min(k, ranked_gains.size());
  const double actual = dcg(ranked_gains.subspan(0, cut));
  std::vector<double> ideal(ranked_gains.begin(), ranked_gains.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  ideal.resize(std::min(k, ideal.size()));
  const double best = dcg(ideal);
  if (best <= 0.0) return 0.0;
  return actual / best;
}

namespace {

std::size_t hits_at_k(std::span<const std::uint32_t> ranked,
                      const std::set<std::uint32_t>& relevant, std::size_t k) {
  std::size_t hits = 0;
  const std::size_t cut = std::min(k, ranked.size());
  for (std::size_t r = 0; r < cut; ++r) hits += relevant.count(ranked[r]);
  return hits;
}

}  // namespace

double ndcg_at_k(std::span<const std::uint32_t> ranked,
                 const std::set<std::uint32_t>& relevant, std::size_t k) {
  if (relevant.empty()) return 0.0;
  double actual = 0.0;
  const std::size_t cut = std::min(k, ranked.size());
  for (std::size_t r = 0; r < cut; ++r) {
    if (relevant.count(ranked[r])) actual += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  }
  double best = 0.0;
  const std::size_t ideal_hits = std::min(k, relevant.size());
  for (std::size_t r = 0; r < ideal_hits; ++r) {
    best += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  }
  return actual / best;
}

double f1_at_k(std::span<const std::uint32_t> ranked,
               const std::set<std::uint32_t>& relevant, std::size_t k) {
  if (relevant.empty() || k == 0) return 0.0;
  const auto hits = static_cast<double>(hits_at_k(ranked, relevant, k));
  if (hits == 0.0) return 0.0;
  const double precision = hits / static_cast<double>(k);
  const double recall = hits / static_cast<double>(relevant.size());
  return 2.0 * precision * recall / (precision + recall);
}

double group_mean_gap(std::span<const double> values, std::span<const bool> in_group) {
  if (values.size() != in_group.size()) {
    throw Error("group mean gap: value and mask lengths differ");
  }
  double in_sum = 0.0, out_sum = 0.0;
  std::size_t in_n = 0, out_n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (in_group[i]) {
      in_sum += values[i];
      ++in_n;
    } else {
      out_sum += values[i];
      ++out_n;
    }
  }
  if (in_n == 0 || out_n == 0) throw Error("group mean gap needs both groups populated");
  return std::abs(in_sum / static_cast<double>(in_n) - out_sum / static_cast<double>(out_n));
}

}  // namespace pathfair
