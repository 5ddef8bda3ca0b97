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

#ifndef PATHFAIR_REPORT_HPP_
#define PATHFAIR_REPORT_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "pathfair/dataset.hpp"
#include "pathfair/rerank.hpp"

namespace pathfair {

// Ordered top-k list of one user, as presented.
struct RankedList {
  EntityId user = 0;
  std::vector<std::uint32_t> order;  // pool indices, presentation order
};

// One per-user statistic, aggregated overall and per activity group. The gap
// is the absolute difference of the group means. Group means recombine to the
// overall mean weighted by group sizes.
struct GroupedMetric {
  double overall = 0.0;
  double active = 0.0;
  double inactive = 0.0;
  double gap = 0.0;
};

// Metrics of one ranking variant over all ranked users. Raw fractions
// throughout; percent is applied only when rendering.
struct VariantMetrics {
  GroupedMetric ndcg;   // true NDCG@k against held-out purchases; gap = GRU
  GroupedMetric f1;     // true F1@k
  GroupedMetric proxy;  // per-user normalized-score DCG (constraint-time view)
  GroupedMetric sid;    // per-user mean pattern diversity of the selection
  GroupedMetric f;      // explanation fairness score; gap = GEDU
  double objective = 0.0;  // summed selected rec scores
  double iru = 0.0;        // Gini of true NDCG
  double iedu = 0.0;       // Gini of the explanation fairness score
  double proxy_iru = 0.0;  // Gini of the proxy quality
  double coverage = 0.0;   // share of ranked users with a test purchase
};

struct UserMetricsRow {
  std::string user;  // entity name, so downstream consumers need no graph
  bool active = false;
  double ndcg_baseline = 0.0, ndcg_reranked = 0.0;
  double f1_baseline = 0.0, f1_reranked = 0.0;
  double sid_baseline = 0.0, sid_reranked = 0.0;
  double f_baseline = 0.0, f_reranked = 0.0;
  double proxy_baseline = 0.0, proxy_reranked = 0.0;
};

// Echo of the knobs that produced the reranked lists.
struct ConfigEcho {
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t k = 0;
  std::string mode;  // "group" or "individual"
  double epsilon_quality = 0.0;
  double epsilon_diversity = 0.0;
  std::uint64_t seed = 0;
};

struct Evaluation {
  std::size_t k = 0;
  ConfigEcho config;
  VariantMetrics baseline;
  VariantMetrics reranked;
  std::vector<UserMetricsRow> users;
};

// Baseline lists (top-k by rec, ties to the lower index) are derived from the
// model; reranked lists come from the caller and must cover exactly the
// model's users. Both variants are measured with the same scales and split.
// Group fields are zero when one activity group is empty among ranked users.
Evaluation evaluate_rankings(const Dataset& data, const RerankModel& model, std::size_t k,
                             const std::vector<RankedList>& reranked);

// Human-readable comparison: overall/inactive/active/gap blocks for NDCG and
// F1 in percent, then the disparity and diversity summary.
std::string render_report_table(const Evaluation& eval);

// metrics.csv: one row per variant and metric (ndcg, f1), columns
// overall/inactive/active/gap, raw fractions.
void write_metrics_csv(const Evaluation& eval, const std::filesystem::path& file);

// Plot-ready data. sid_distribution.csv: per-user mean SID by variant and
// group. lorenz_quality.csv / lorenz_explanation.csv: cumulative-share
// curves of per-user quality and explanation fairness scores.
void write_sid_distribution_csv(const Evaluation& eval, const std::filesystem::path& file);
void write_lorenz_csv(const Evaluation& eval, bool explanation,
                      const std::filesystem::path& file);

// Round-trip of the evaluation payload nested inside evaluation.json.
std::string evaluation_to_json_text(const Evaluation& eval);
Evaluation evaluation_from_json_text(const std::string& text);

}  // namespace pathfair

#endif  // PATHFAIR_REPORT_HPP_
