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
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "pathfair/candidates.hpp"
#include "pathfair/error.hpp"
#include "pathfair/metrics.hpp"
#include "pathfair/rng.hpp"
#include "test_util.hpp"

using namespace pathfair;
using nlohmann::json;
using pathfair::testing::dfs_path_oracle;
using pathfair::testing::graph_of;
using pathfair::testing::random_marketplace;
using pathfair::testing::TempDir;

namespace {

EmbeddingModel random_model(const KnowledgeGraph& g, std::size_t dim,
                            std::uint64_t seed) {
  EmbeddingModel model(g.entity_count(), g.relation_count(), dim);
  Rng rng(seed);
  for (EntityId e = 0; e < g.entity_count(); ++e) {
    for (auto& x : model.entity(e)) x = rng.uniform(-1.0, 1.0);
  }
  for (RelationId r = 0; r < g.relation_count(); ++r) {
    for (auto& x : model.relation(r)) x = rng.uniform(-1.0, 1.0);
  }
  return model;
}

void set_vec(std::span<double> v, std::initializer_list<double> values) {
  std::copy(values.begin(), values.end(), v.begin());
}

}  // namespace

TEST_CASE("walk score hand values") {
  // One hop: (e_0 + r) . e_1 with e_0 = (1,0), r = (0,1), e_1 = (1,1).
  const auto g = graph_of({{"user:u", "purchase", "item:v"}});
  EmbeddingModel model(g.entity_count(), g.relation_count(), 2);
  set_vec(model.entity(g.entity("user:u")), {1.0, 0.0});
  set_vec(model.relation(g.relation("purchase")), {0.0, 1.0});
  set_vec(model.entity(g.entity("item:v")), {1.0, 1.0});

  const auto paths = enumerate_user_item_paths(g, g.entity("user:u"), 1);
  REQUIRE(paths.size() == 1);
  CHECK(path_embedding_score(model, paths[0]) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK(preference_score(model, g.entity("user:u"), g.relation("purchase"),
                         g.entity("item:v")) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("predicted preference hand value") {
  const auto g = graph_of({{"user:u", "purchase", "item:v"}});
  EmbeddingModel model(g.entity_count(), g.relation_count(), 2);
  set_vec(model.entity(g.entity("user:u")), {1.0, 0.0});
  set_vec(model.relation(g.relation("purchase")), {1.0, 0.0});
  set_vec(model.entity(g.entity("item:v")), {2.0, 0.0});
  CHECK(preference_score(model, g.entity("user:u"), g.relation("purchase"),
                         g.entity("item:v")) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("walk scores add per step from the start entity") {
  const auto g = graph_of({{"user:u1", "purchase", "item:v1"},
                           {"user:u2", "purchase", "item:v1"},
                           {"user:u2", "purchase", "item:v2"}});
  const auto model = random_model(g, 4, 41);
  const auto u1 = g.entity("user:u1");
  for (const auto& path : enumerate_user_item_paths(g, u1, 3)) {
    double expect = 0.0;
    const auto e0 = model.entity(path.nodes.front());
    for (std::size_t s = 0; s < path.steps.size(); ++s) {
      const auto r = model.relation(path.steps[s].relation);
      const auto ei = model.entity(path.nodes[s + 1]);
      for (std::size_t d = 0; d < model.dim(); ++d) expect += (e0[d] + r[d]) * ei[d];
    }
    CHECK(path_embedding_score(model, path) ==
          doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("pattern diversity helpers agree with the pair formula") {
  const auto g = graph_of({{"user:u", "purchase", "item:v"},
                           {"user:u", "mentions", "word:w"},
                           {"item:v2", "described_by", "word:w"}});
  const auto model = random_model(g, 3, 42);

  std::vector<ScoredPath> paths;
  for (const auto& p : enumerate_user_item_paths(g, g.entity("user:u"), 3)) {
    paths.push_back({p, path_embedding_score(model, p)});
  }
  std::map<PathPattern, std::uint64_t> counts;
  for (const auto& sp : paths) ++counts[sp.path.steps];
  std::vector<std::uint64_t> tally_counts;
  for (const auto& [pattern, n] : counts) tally_counts.push_back(n);
  CHECK(path_pattern_diversity(paths) ==
        doctest::Approx(simpson_diversity(tally_counts)).epsilon(1e-12));

  std::vector<PatternTally> even{{{{0, Direction::Forward}}, 2, 1.0},
                                 {{{1, Direction::Forward}}, 2, 1.0}};
  CHECK(pattern_tally_diversity(even) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  std::vector<PatternTally> lone{{{{0, Direction::Forward}}, 5, 1.0}};
  CHECK(pattern_tally_diversity(lone) == 0.0);
}

TEST_CASE("candidate pools cover reachable unpurchased items with full tallies") {
  Rng rng(43);
  const auto g = random_marketplace(rng, 6, 10, 3, 6);
  const auto model = random_model(g, 8, 44);
  CandidateBuildConfig cfg;
  cfg.top_n = 100;
  cfg.max_paths_per_item = 4;

  const auto purchase = g.relation("purchase");
  for (const auto user : g.users()) {
    const auto set = build_candidates(g, model, user, cfg);
    CHECK(set.user == user);

    // Oracle view of reachable items and their walks.
    std::map<EntityId, std::vector<Path>> walks_to;
    for (auto& p : dfs_path_oracle(g, user, cfg.max_len)) {
      walks_to[p.nodes.back()].push_back(std::move(p));
    }
    std::set<EntityId> bought;
    for (const auto& e : g.neighbors(user)) {
      if (!e.reversed && e.relation == purchase &&
          g.entity_class(e.neighbor) == EntityClass::Item) {
        bought.insert(e.neighbor);
      }
    }
    std::size_t expected = 0;
    for (const auto& [item, walks] : walks_to) {
      if (!bought.count(item)) ++expected;
    }
    CHECK(set.candidates.size() == expected);

    for (std::size_t c = 0; c < set.candidates.size(); ++c) {
      const auto& cand = set.candidates[c];
      CHECK(bought.count(cand.item) == 0);
      CHECK(cand.rec_score ==
            doctest::Approx(preference_score(model, user, purchase, cand.item))
                .epsilon(1e-12));
      if (c > 0) {
        const auto& prev = set.candidates[c - 1];
        const bool ordered = prev.rec_score > cand.rec_score ||
                             (prev.rec_score == cand.rec_score && prev.item < cand.item);
        CHECK(ordered);
      }

      // Tallies must cover every oracle walk, not just the stored few.
      const auto& walks = walks_to.at(cand.item);
      std::map<PathPattern, std::pair<std::uint64_t, double>> expect;
      for (const auto& p : walks) {
        auto& slot = expect[p.steps];
        slot.first += 1;
        slot.second += path_embedding_score(model, p);
      }
      REQUIRE(cand.tallies.size() == expect.size());
      for (const auto& t : cand.tallies) {
        const auto it = expect.find(t.pattern);
        REQUIRE(it != expect.end());
        CHECK(t.walks == it->second.first);
        CHECK(t.score_sum == doctest::Approx(it->second.second).epsilon(1e-9));
      }

      std::vector<std::uint64_t> counts;
      for (const auto& t : cand.tallies) counts.push_back(t.walks);
      CHECK(cand.sid == doctest::Approx(simpson_diversity(counts)).epsilon(1e-12));

      // Stored walks: capped, valid, and no worse than anything left out.
      CHECK(cand.paths.size() == std::min<std::size_t>(cfg.max_paths_per_item,
                                                       walks.size()));
      double worst_kept = cand.paths.empty() ? 0.0 : cand.paths.back().score;
      for (const auto& sp : cand.paths) {
        CHECK(is_valid_path(g, sp.path));
        CHECK(std::find(walks.begin(), walks.end(), sp.path) != walks.end());
      }
      if (cand.paths.size() < walks.size()) {
        std::vector<double> all_scores;
        for (const auto& p : walks) all_scores.push_back(path_embedding_score(model, p));
        std::sort(all_scores.rbegin(), all_scores.rend());
        CHECK(worst_kept >=
              all_scores[cand.paths.size() - 1] - 1e-9);
      }
    }
  }
}

TEST_CASE("top_n keeps the best preference scores") {
  Rng rng(45);
  const auto g = random_marketplace(rng, 4, 12, 3, 5);
  const auto model = random_model(g, 6, 46);

  CandidateBuildConfig wide;
  wide.top_n = 100;
  CandidateBuildConfig narrow;
  narrow.top_n = 3;

  for (const auto user : g.users()) {
    const auto full = build_candidates(g, model, user, wide);
    const auto cut = build_candidates(g, model, user, narrow);
    const auto want = std::min<std::size_t>(3, full.candidates.size());
    REQUIRE(cut.candidates.size() == want);
    for (std::size_t i = 0; i < want; ++i) {
      CHECK(cut.candidates[i] == full.candidates[i]);
    }
  }
}

TEST_CASE("parallel candidate building matches sequential") {
  Rng rng(47);
  const auto g = random_marketplace(rng, 8, 10, 3, 6);
  const auto model = random_model(g, 6, 48);
  CandidateBuildConfig cfg;
  cfg.top_n = 10;

  const auto seq = build_all_candidates(g, model, cfg, 1);
  const auto par = build_all_candidates(g, model, cfg, 3);
  CHECK(seq == par);
}

TEST_CASE("candidate files round-trip losslessly") {
  Rng rng(49);
  const auto g = random_marketplace(rng, 6, 9, 3, 5);
  const auto model = random_model(g, 5, 50);
  CandidateBuildConfig cfg;
  cfg.top_n = 8;
  cfg.max_paths_per_item = 3;
  const auto sets = build_all_candidates(g, model, cfg);

  TempDir tmp("cand");
  const auto file = tmp.file("candidates.jsonl");
  write_candidates_jsonl(g, sets, file);
  const auto back = read_candidates_jsonl(g, file);
  CHECK(back == sets);
}

TEST_CASE("writer rejects walkless and duplicate candidates") {
  const auto g = graph_of({{"user:u", "purchase", "item:v"},
                           {"user:u2", "purchase", "item:v"},
                           {"user:u2", "purchase", "item:v2"}});
  const auto model = random_model(g, 4, 51);
  const auto sets = build_all_candidates(g, model, {});
  TempDir tmp("candw");

  auto bare = sets;
  REQUIRE(!bare[0].candidates.empty());
  bare[0].candidates[0].paths.clear();
  bare[0].candidates[0].tallies.clear();
  CHECK_THROWS_WITH_AS(write_candidates_jsonl(g, bare, tmp.file("bare.jsonl")),
                       doctest::Contains("has no explaining walks"), Error);

  auto doubled = sets;
  doubled[0].candidates.push_back(doubled[0].candidates[0]);
  CHECK_THROWS_WITH_AS(write_candidates_jsonl(g, doubled, tmp.file("dup.jsonl")),
                       doctest::Contains("duplicate candidate"), Error);
}

TEST_CASE("reader validates schema, tallies, and walks") {
  const auto g = graph_of({{"user:u", "purchase", "item:v"},
                           {"user:u2", "purchase", "item:v"},
                           {"user:u2", "purchase", "item:v2"}});
  TempDir tmp("candr");

  // A hand-rolled one-candidate line: u2 bridges u to v2.
  const json walk{{"nodes", {"user:u", "item:v", "user:u2", "item:v2"}},
                  {"steps",
                   {{{"rel", "purchase"}, {"dir", "fwd"}},
                    {{"rel", "purchase"}, {"dir", "rev"}},
                    {{"rel", "purchase"}, {"dir", "fwd"}}}},
                  {"score", 1.25}};
  const json tally{{"steps", walk.at("steps")}, {"walks", 1}, {"score_sum", 1.25}};
  const auto line = [&](int schema, json tallies, json paths) {
    return json{{"user", "user:u"},
                {"schema", schema},
                {"candidates",
                 json::array({{{"item", "item:v2"},
                               {"rec_score", 0.5},
                               {"patterns", std::move(tallies)},
                               {"paths", std::move(paths)}}})}}
        .dump();
  };
  const auto write = [&](const std::string& name, const std::string& text) {
    const auto file = tmp.file(name);
    std::ofstream out(file);
    out << text << '\n';
    return file;
  };

  // The happy line parses.
  const auto good =
      read_candidates_jsonl(g, write("good.jsonl", line(1, json::array({tally}),
                                                        json::array({walk}))));
  REQUIRE(good.size() == 1);
  REQUIRE(good[0].candidates.size() == 1);
  CHECK(good[0].candidates[0].sid == 0.0);
  CHECK(good[0].candidates[0].tallies.size() == 1);

  CHECK_THROWS_WITH_AS(
      read_candidates_jsonl(g, write("schema.jsonl", line(2, json::array({tally}),
                                                          json::array({walk})))),
      doctest::Contains("schema version 2"), Error);

  auto zero = tally;
  zero["walks"] = 0;
  CHECK_THROWS_WITH_AS(
      read_candidates_jsonl(g, write("zero.jsonl", line(1, json::array({zero}),
                                                        json::array({walk})))),
      doctest::Contains("zero walks"), Error);

  CHECK_THROWS_WITH_AS(
      read_candidates_jsonl(
          g, write("twice.jsonl",
                   line(1, json::array({tally, tally}), json::array({walk})))),
      doctest::Contains("duplicate pattern tally"), Error);

  CHECK_THROWS_WITH_AS(
      read_candidates_jsonl(
          g, write("over.jsonl",
                   line(1, json::array({tally}), json::array({walk, walk})))),
      doctest::Contains("stored walks exceed the pattern tallies"), Error);

  auto sideways = walk;
  sideways["steps"][0]["dir"] = "up";
  CHECK_THROWS_WITH_AS(
      read_candidates_jsonl(g, write("dir.jsonl", line(1, json::array({tally}),
                                                       json::array({sideways})))),
      doctest::Contains("dir must be fwd or rev"), Error);

  auto detached = walk;
  detached["nodes"][3] = "item:v";  // endpoint no longer matches the item
  CHECK_THROWS_AS(
      read_candidates_jsonl(g, write("ends.jsonl", line(1, json::array({tally}),
                                                        json::array({detached})))),
      Error);

  CHECK_THROWS_WITH_AS(
      read_candidates_jsonl(
          g, write("dupuser.jsonl",
                   line(1, json::array({tally}), json::array({walk})) + "\n" +
                       line(1, json::array({tally}), json::array({walk})))),
      doctest::Contains("duplicate user"), Error);
}
