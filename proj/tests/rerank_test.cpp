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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include <doctest.h>

#include "pathfair/candidates.hpp"
#include "pathfair/dataset.hpp"
#include "pathfair/error.hpp"
#include "pathfair/rerank.hpp"
#include "pathfair/rng.hpp"
#include "test_util.hpp"

using namespace pathfair;
using pathfair::testing::dfs_path_oracle;
using pathfair::testing::graph_of;
using pathfair::testing::random_marketplace;

namespace {

struct Fixture {
  Dataset data;
  EmbeddingModel model{1, 1, 1};
  std::vector<CandidateSet> sets;
};

Fixture marketplace_fixture(std::uint64_t seed) {
  Rng rng(seed);
  auto g = random_marketplace(rng, 6, 10, 3, 6);
  EmbeddingModel model(g.entity_count(), g.relation_count(), 6);
  for (EntityId e = 0; e < g.entity_count(); ++e) {
    for (auto& x : model.entity(e)) x = rng.uniform(-1.0, 1.0);
  }
  for (RelationId r = 0; r < g.relation_count(); ++r) {
    for (auto& x : model.relation(r)) x = rng.uniform(-1.0, 1.0);
  }
  Fixture fx{load_dataset_from_graph(std::move(g)), std::move(model), {}};
  fx.sets = build_all_candidates(fx.data.graph, fx.model, {});
  return fx;
}

PathPattern single(RelationId rel) { return {{rel, Direction::Forward}}; }

}  // namespace

TEST_CASE("pattern weight follows the shifted log of the walk share") {
  CHECK(pattern_weight(5, 5) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(pattern_weight(3, 4) == doctest::Approx(std::log(2.75)).epsilon(1e-12));
  CHECK(pattern_weight(1, 4) == doctest::Approx(std::log(2.25)).epsilon(1e-12));
  CHECK(pattern_weight(5, 5) == doctest::Approx(1.0986122886681098).epsilon(1e-12));

  for (std::uint64_t total = 1; total <= 20; ++total) {
    for (std::uint64_t n = 1; n <= total; ++n) {
      const double w = pattern_weight(n, total);
      CHECK(w > std::log(2.0));
      CHECK(w <= std::log(3.0) + 1e-15);
    }
  }
  CHECK_THROWS_WITH_AS(pattern_weight(1, 0),
                       doctest::Contains("empty walk set"), Error);
}

TEST_CASE("pattern preference scales inversely with historical mass") {
  CHECK(pattern_preference(std::log(3.0), 1.0, 2.0) ==
        doctest::Approx(2.1972245773362196).epsilon(1e-12));
  const double at_half = pattern_preference(0.9, 0.5, 1.7);
  const double at_full = pattern_preference(0.9, 1.0, 1.7);
  CHECK(at_half == doctest::Approx(2.0 * at_full).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(pattern_preference(0.9, 0.0, 1.0),
                       doctest::Contains("mass must be positive"), Error);
  CHECK_THROWS_WITH_AS(pattern_preference(0.9, -0.25, 1.0),
                       doctest::Contains("mass must be positive"), Error);
}

TEST_CASE("debiased walk score hand value") {
  // Two patterns, three walks. History saw only the first pattern once, so
  // with smoothing 1 over a two-pattern vocabulary its mass is 2/3 and the
  // unseen pattern keeps the floor 1/3.
  Candidate cand;
  cand.item = 7;
  cand.tallies = {{single(0), 2, 3.0}, {single(1), 1, 1.0}};
  const PatternDistribution dist({{single(0), 1}}, 1.0, 2);
  const std::map<PathPattern, std::uint64_t> vocab{{single(0), 4}, {single(1), 9}};

  const double expect = std::log(2.0 + 2.0 / 3.0) / (2.0 / 3.0) * 3.0 +
                        std::log(2.0 + 1.0 / 3.0) / (1.0 / 3.0) * 1.0;
  CHECK(debiased_path_score(cand, dist, vocab) ==
        doctest::Approx(expect).epsilon(1e-12));

  Candidate hollow;
  hollow.item = 8;
  CHECK_THROWS_WITH_AS(debiased_path_score(hollow, dist, vocab),
                       doctest::Contains("without walk tallies"), Error);

  Candidate stranger = cand;
  stranger.tallies.push_back({single(2), 1, 0.5});
  CHECK_THROWS_WITH_AS(debiased_path_score(stranger, dist, vocab),
                       doctest::Contains("outside the training vocabulary"), Error);
}

TEST_CASE("pattern statistics match a brute-force traversal") {
  Rng rng(53);
  const auto g = random_marketplace(rng, 5, 8, 3, 5);
  const auto purchase = g.relation("purchase");
  const auto stats = collect_pattern_stats(g, purchase, kMaxPatternLength);

  std::map<PathPattern, std::uint64_t> vocab;
  std::vector<std::map<PathPattern, std::uint64_t>> hist(g.users().size());
  for (std::size_t i = 0; i < g.users().size(); ++i) {
    const auto user = g.users()[i];
    std::set<EntityId> bought;
    for (const auto& e : g.neighbors(user)) {
      if (!e.reversed && e.relation == purchase &&
          g.entity_class(e.neighbor) == EntityClass::Item) {
        bought.insert(e.neighbor);
      }
    }
    for (const auto& p : dfs_path_oracle(g, user, kMaxPatternLength)) {
      ++vocab[p.steps];
      if (bought.count(p.nodes.back())) ++hist[i][p.steps];
    }
  }
  CHECK(stats.vocabulary == vocab);
  REQUIRE(stats.historical.size() == hist.size());
  for (std::size_t i = 0; i < hist.size(); ++i) CHECK(stats.historical[i] == hist[i]);

  const auto threaded = collect_pattern_stats(g, purchase, kMaxPatternLength, 3);
  CHECK(threaded.vocabulary == stats.vocabulary);
  CHECK(threaded.historical == stats.historical);
}

TEST_CASE("scored pools blend debiased and diversity shares") {
  auto fx = marketplace_fixture(54);
  RerankConfig cfg;
  cfg.k = 1;
  cfg.alpha = 0.75;
  cfg.lambda = 2.0;
  cfg.gamma = 1.5;

  const auto model = build_rerank_model(fx.data, fx.sets, cfg);
  REQUIRE(model.pools.size() == fx.sets.size());
  CHECK(model.lambda == 2.0);
  CHECK(model.gamma == 1.5);

  const auto stats =
      collect_pattern_stats(fx.data.graph, fx.data.purchase, cfg.max_len);
  CHECK(model.vocabulary_size == stats.vocabulary.size());
  const auto split = split_by_activity(fx.data, cfg.group_ratio);

  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < fx.sets.size(); ++i) {
    const auto& set = fx.sets[i];
    const auto& pool = model.pools[i];
    CHECK(pool.user == set.user);
    const auto users = fx.data.graph.users();
    const std::size_t uidx =
        std::lower_bound(users.begin(), users.end(), set.user) - users.begin();
    CHECK(pool.active == split.active[uidx]);

    const PatternDistribution dist(stats.historical[uidx], cfg.pseudo_count,
                                   stats.vocabulary.size());
    REQUIRE(pool.cands.size() == set.candidates.size());
    for (std::size_t c = 0; c < pool.cands.size(); ++c) {
      const auto& cand = set.candidates[c];
      const auto& cs = pool.cands[c];
      CHECK(cs.item == cand.item);
      CHECK(cs.rec == cand.rec_score);
      CHECK(cs.sid == cand.sid);
      CHECK(cs.sp == doctest::Approx(debiased_path_score(cand, dist, stats.vocabulary))
                         .epsilon(1e-9));
      CHECK(cs.phi ==
            doctest::Approx(0.75 * cs.sp + 0.25 * 2.0 * cs.sid).epsilon(1e-9));
      lo = std::min(lo, cs.rec);
      hi = std::max(hi, cs.rec);
    }
  }
  CHECK(model.rec_min == lo);
  CHECK(model.rec_max == hi);
}

TEST_CASE("fairness share is linear in the blend knob") {
  auto fx = marketplace_fixture(55);
  RerankConfig cfg;
  cfg.k = 1;
  cfg.lambda = 1.5;

  cfg.alpha = 0.0;
  const auto at0 = build_rerank_model(fx.data, fx.sets, cfg);
  cfg.alpha = 1.0;
  const auto at1 = build_rerank_model(fx.data, fx.sets, cfg);
  cfg.alpha = 0.5;
  const auto mid = build_rerank_model(fx.data, fx.sets, cfg);

  for (std::size_t i = 0; i < mid.pools.size(); ++i) {
    for (std::size_t c = 0; c < mid.pools[i].cands.size(); ++c) {
      const double lerp =
          0.5 * (at0.pools[i].cands[c].phi + at1.pools[i].cands[c].phi);
      CHECK(mid.pools[i].cands[c].phi == doctest::Approx(lerp).epsilon(1e-9));
    }
  }
}

TEST_CASE("scale factors default to mean magnitude ratios") {
  auto fx = marketplace_fixture(56);
  RerankConfig cfg;
  cfg.k = 1;
  const auto model = build_rerank_model(fx.data, fx.sets, cfg);

  double sp_abs = 0.0, sid_abs = 0.0, rec_abs = 0.0, phi_abs = 0.0;
  for (const auto& pool : model.pools) {
    for (const auto& cs : pool.cands) {
      sp_abs += std::abs(cs.sp);
      sid_abs += std::abs(cs.sid);
      rec_abs += std::abs(cs.rec);
      phi_abs += std::abs(cs.phi);
    }
  }
  REQUIRE(sid_abs > 0.0);
  REQUIRE(phi_abs > 0.0);
  CHECK(model.lambda == doctest::Approx(sp_abs / sid_abs).epsilon(1e-12));
  CHECK(model.gamma == doctest::Approx(rec_abs / phi_abs).epsilon(1e-12));
}

TEST_CASE("solver instances mirror the scored pools") {
  auto fx = marketplace_fixture(57);
  RerankConfig cfg;
  cfg.k = 2;
  const auto model = build_rerank_model(fx.data, fx.sets, cfg);
  const auto inst = make_solver_instance(model, cfg.k, ConstraintMode::Individual);

  CHECK(inst.k == 2);
  CHECK(inst.mode == ConstraintMode::Individual);
  REQUIRE(inst.users.size() == model.pools.size());
  const double range = model.rec_max - model.rec_min;
  REQUIRE(range > 0.0);
  for (std::size_t i = 0; i < inst.users.size(); ++i) {
    const auto& pool = model.pools[i];
    const auto& u = inst.users[i];
    CHECK(u.active == pool.active);
    REQUIRE(u.rec.size() == pool.cands.size());
    for (std::size_t c = 0; c < pool.cands.size(); ++c) {
      CHECK(u.rec[c] == pool.cands[c].rec);
      CHECK(u.phi[c] == pool.cands[c].phi);
      CHECK(u.norm_rec[c] ==
            doctest::Approx((pool.cands[c].rec - model.rec_min) / range)
                .epsilon(1e-12));
      CHECK(u.norm_rec[c] >= 0.0);
      CHECK(u.norm_rec[c] <= 1.0);
    }
  }
}

TEST_CASE("presentation order favors the fairer item at even blend") {
  ScoredPool pool;
  pool.user = 0;
  pool.cands = {{11, 0.9, 0.0, 0.0, 0.1}, {12, 0.5, 0.0, 0.0, 0.7}};
  const std::vector<std::uint32_t> chosen{0, 1};

  const auto ranked = rank_selected(pool, chosen, 0.5, 1.0);
  REQUIRE(ranked.size() == 2);
  // 0.5 * 0.7 + 0.5 * 0.5 = 0.60 beats 0.5 * 0.1 + 0.5 * 0.9 = 0.50.
  CHECK(ranked[0].item == 12);
  CHECK(ranked[0].blend == doctest::Approx(0.60).epsilon(1e-12));
  CHECK(ranked[1].item == 11);
  CHECK(ranked[1].blend == doctest::Approx(0.50).epsilon(1e-12));
  CHECK(ranked[0].pool_index == 1);
  CHECK(ranked[1].rec == 0.9);
  CHECK(ranked[1].phi == 0.1);

  // All weight on preference restores the raw order.
  const auto raw = rank_selected(pool, chosen, 0.0, 1.0);
  CHECK(raw[0].item == 11);
  CHECK(raw[1].item == 12);

  // Gamma rescales the fairness share before blending.
  const auto scaled = rank_selected(pool, chosen, 0.5, 10.0);
  CHECK(scaled[0].item == 12);
  CHECK(scaled[0].blend == doctest::Approx(0.5 * 10.0 * 0.7 + 0.25).epsilon(1e-12));
}

TEST_CASE("presentation ties break toward the smaller item id") {
  ScoredPool pool;
  pool.cands = {{7, 0.5, 0.0, 0.0, 0.5}, {3, 0.5, 0.0, 0.0, 0.5}};
  const std::vector<std::uint32_t> chosen{0, 1};
  const auto ranked = rank_selected(pool, chosen, 0.5, 1.0);
  CHECK(ranked[0].item == 3);
  CHECK(ranked[1].item == 7);
}

TEST_CASE("rerank configuration is validated") {
  auto fx = marketplace_fixture(58);
  RerankConfig cfg;
  cfg.k = 1;

  auto bad = cfg;
  bad.alpha = -0.1;
  CHECK_THROWS_WITH_AS(build_rerank_model(fx.data, fx.sets, bad),
                       doctest::Contains("alpha must lie in [0, 1]"), Error);
  bad = cfg;
  bad.beta = 1.5;
  CHECK_THROWS_WITH_AS(build_rerank_model(fx.data, fx.sets, bad),
                       doctest::Contains("beta must lie in [0, 1]"), Error);
  bad = cfg;
  bad.k = 0;
  CHECK_THROWS_WITH_AS(build_rerank_model(fx.data, fx.sets, bad),
                       doctest::Contains("k must be positive"), Error);
  bad = cfg;
  bad.k = 1000;
  CHECK_THROWS_WITH_AS(build_rerank_model(fx.data, fx.sets, bad),
                       doctest::Contains("needs at least 1000"), Error);

  const std::vector<CandidateSet> none;
  CHECK_THROWS_WITH_AS(build_rerank_model(fx.data, none, cfg),
                       doctest::Contains("no candidates to rerank"), Error);
}
