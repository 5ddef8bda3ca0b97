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
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <doctest.h>

#include "pathfair/dataset.hpp"
#include "pathfair/error.hpp"
#include "pathfair/synthetic.hpp"
#include "test_util.hpp"

using namespace pathfair;
using pathfair::testing::graph_of;
using pathfair::testing::TempDir;

namespace {

SyntheticConfig small_config() {
  SyntheticConfig cfg;
  cfg.users = 40;
  cfg.items = 120;
  cfg.brands = 6;
  cfg.categories = 4;
  cfg.words = 30;
  cfg.seed = 17;
  return cfg;
}

std::map<std::string, std::size_t> purchases_per_user(const SyntheticDataset& data) {
  std::map<std::string, std::size_t> counts;
  for (const auto& rec : data.train) {
    if (rec.relation == "purchase") ++counts[rec.head];
  }
  return counts;
}

}  // namespace

TEST_CASE("generation is reproducible and the seed only moves items") {
  const auto cfg = small_config();
  const auto a = generate_synthetic(cfg);
  const auto b = generate_synthetic(cfg);
  REQUIRE(a.train.size() == b.train.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].head == b.train[i].head);
    CHECK(a.train[i].relation == b.train[i].relation);
    CHECK(a.train[i].tail == b.train[i].tail);
  }
  CHECK(a.test == b.test);

  auto reseeded = cfg;
  reseeded.seed = 18;
  const auto c = generate_synthetic(reseeded);
  // The activity profile is pinned by the quantiles, not the seed.
  CHECK(purchases_per_user(a) == purchases_per_user(c));
  bool item_moved = false;
  for (std::size_t i = 0; i < a.train.size() && !item_moved; ++i) {
    item_moved = a.train[i].tail != c.train[i].tail;
  }
  CHECK(item_moved);
}

TEST_CASE("every user clears the purchase floor and respects the ceiling") {
  const auto cfg = small_config();
  const auto data = generate_synthetic(cfg);
  const auto counts = purchases_per_user(data);
  REQUIRE(counts.size() == cfg.users);
  const std::size_t cap = std::min(cfg.max_purchases, cfg.items / 2);
  for (const auto& [user, n] : counts) {
    CHECK(n >= cfg.min_purchases);
    CHECK(n <= cap);
  }
}

TEST_CASE("activity falls with the user index") {
  const auto data = generate_synthetic(small_config());
  const auto counts = purchases_per_user(data);
  // Names are zero padded, so map order is user index order.
  std::size_t prev = SIZE_MAX;
  for (const auto& [user, n] : counts) {
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("the head holds a strict majority of training purchases") {
  SyntheticConfig cfg;
  cfg.users = 200;
  cfg.items = 600;
  cfg.brands = 10;
  cfg.categories = 6;
  cfg.words = 40;
  cfg.seed = 3;
  const auto data = generate_synthetic(cfg);
  const auto counts = purchases_per_user(data);

  std::vector<std::size_t> sorted;
  std::size_t total = 0;
  for (const auto& [user, n] : counts) {
    sorted.push_back(n);
    total += n;
  }
  std::sort(sorted.rbegin(), sorted.rend());
  const std::size_t head = (cfg.users + 19) / 20;  // ceil of the top 5 percent
  std::size_t head_total = 0;
  for (std::size_t i = 0; i < head; ++i) head_total += sorted[i];
  CHECK(2 * head_total > total);
}

TEST_CASE("held-out purchases never overlap training and stay near a quarter") {
  const auto cfg = small_config();
  const auto data = generate_synthetic(cfg);
  const auto counts = purchases_per_user(data);

  std::map<std::string, std::set<std::string>> train_items;
  for (const auto& rec : data.train) {
    if (rec.relation == "purchase") train_items[rec.head].insert(rec.tail);
  }

  REQUIRE(data.test.size() == cfg.users);
  for (const auto& [user, held_out] : data.test) {
    const auto n = counts.at(user);
    CHECK(held_out.size() == (n + 3) / 4);
    for (const auto& item : held_out) {
      CHECK(train_items.at(user).count(item) == 0);
    }
  }
}

TEST_CASE("every item carries brand, category, and word metadata") {
  const auto cfg = small_config();
  const auto data = generate_synthetic(cfg);
  std::map<std::string, std::size_t> brands, categories, words;
  for (const auto& rec : data.train) {
    if (rec.relation == "produced_by") ++brands[rec.head];
    if (rec.relation == "belongs_to") ++categories[rec.head];
    if (rec.relation == "described_by") ++words[rec.head];
  }
  CHECK(brands.size() == cfg.items);
  CHECK(categories.size() == cfg.items);
  for (const auto& [item, n] : brands) CHECK(n == 1);
  for (const auto& [item, n] : categories) CHECK(n == 1);
  for (const auto& [item, n] : words) CHECK(n == cfg.words_per_item);
}

TEST_CASE("infeasible synthetic configs are rejected") {
  auto floor = small_config();
  floor.min_purchases = 3;
  CHECK_THROWS_WITH_AS(generate_synthetic(floor), doctest::Contains("at least 4"), Error);

  auto skew = small_config();
  skew.activity_skew = 0.0;
  CHECK_THROWS_AS(generate_synthetic(skew), Error);

  auto head = small_config();
  head.head_skew = -1.0;
  CHECK_THROWS_AS(generate_synthetic(head), Error);

  auto fraction = small_config();
  fraction.head_fraction = 1.0;
  CHECK_THROWS_AS(generate_synthetic(fraction), Error);

  auto scarce = small_config();
  scarce.items = 7;  // ceiling 3 sits under the floor of 4
  CHECK_THROWS_WITH_AS(generate_synthetic(scarce),
                       doctest::Contains("exceeds the purchase ceiling"), Error);

  auto wordless = small_config();
  wordless.words = 2;
  CHECK_THROWS_WITH_AS(generate_synthetic(wordless),
                       doctest::Contains("word universe"), Error);

  auto missing = small_config();
  missing.brands = 0;
  CHECK_THROWS_AS(generate_synthetic(missing), Error);
}

TEST_CASE("generated data loads as a dataset with matching counts") {
  const auto cfg = small_config();
  const auto synth = generate_synthetic(cfg);
  const auto counts = purchases_per_user(synth);

  const auto data = load_dataset_from_graph(load_graph(synth.train));
  REQUIRE(data.graph.users().size() == cfg.users);
  for (const auto user : data.graph.users()) {
    CHECK(data.purchase_counts.at(user) == counts.at(data.graph.entity_name(user)));
  }
}

TEST_CASE("test purchases colliding with training are rejected at load") {
  TempDir tmp("ds");
  const auto train = tmp.file("train.tsv");
  {
    std::ofstream out(train);
    out << "user:a\tpurchase\titem:x\nuser:a\tpurchase\titem:y\n"
           "user:b\tpurchase\titem:x\n";
  }

  const auto write_test = [&](const std::string& text) {
    const auto file = tmp.file("test.tsv");
    std::ofstream out(file);
    out << text;
    return file;
  };

  CHECK_THROWS_WITH_AS(
      load_dataset(train, write_test("user:a\titem:x\n")),
      doctest::Contains("(user:a, item:x) is already a training purchase"), Error);

  CHECK_THROWS_WITH_AS(load_dataset(train, write_test("user:zz\titem:x\n")),
                       doctest::Contains("unknown test user"), Error);

  CHECK_THROWS_WITH_AS(load_dataset(train, write_test("user:a\titem:zz\n")),
                       doctest::Contains("unknown test item"), Error);

  CHECK_THROWS_WITH_AS(load_dataset(train, write_test("user:a item:x\n")),
                       doctest::Contains("expected `user<TAB>item`"), Error);

  // A valid pair held out for user b.
  const auto data = load_dataset(train, write_test("user:b\titem:y\n"));
  REQUIRE(data.test_purchases.size() == 1);
  const auto b = data.graph.entity("user:b");
  CHECK(data.test_purchases.at(b).count(data.graph.entity("item:y")) == 1);

  // No test file at all is fine.
  const auto bare = load_dataset(train, {});
  CHECK(bare.test_purchases.empty());
  CHECK(bare.purchase_counts.at(bare.graph.entity("user:a")) == 2);
}

TEST_CASE("missing purchase relation is an error") {
  TempDir tmp("dsrel");
  const auto train = tmp.file("train.tsv");
  {
    std::ofstream out(train);
    out << "user:a\tviewed\titem:x\n";
  }
  CHECK_THROWS_AS(load_dataset(train, {}), Error);
}

TEST_CASE("activity split takes the top users by purchase count") {
  const auto g = graph_of({{"user:a", "purchase", "item:1"},
                           {"user:a", "purchase", "item:2"},
                           {"user:a", "purchase", "item:3"},
                           {"user:b", "purchase", "item:1"},
                           {"user:b", "purchase", "item:2"},
                           {"user:b", "purchase", "item:4"},
                           {"user:c", "purchase", "item:1"}});
  const auto data = load_dataset_from_graph(g);

  // ceil(0.4 * 3) = 2 actives: both three-purchase users.
  const auto two = split_by_activity(data, 0.4);
  CHECK(two.active_count == 2);
  REQUIRE(two.users.size() == 3);
  CHECK(two.active[0]);
  CHECK(two.active[1]);
  CHECK_FALSE(two.active[2]);

  // ceil(0.05 * 3) = 1 active; a and b tie on count, the smaller id wins.
  const auto one = split_by_activity(data, 0.05);
  CHECK(one.active_count == 1);
  CHECK(one.active[0]);
  CHECK_FALSE(one.active[1]);

  CHECK_THROWS_AS(split_by_activity(data, 0.0), Error);
  CHECK_THROWS_AS(split_by_activity(data, 1.0), Error);
}

TEST_CASE("histogram buckets cover the fixed edges") {
  std::vector<std::tuple<std::string, std::string, std::string>> triples;
  const std::vector<std::pair<std::string, int>> profile{
      {"user:a", 2},  {"user:b", 4},  {"user:c", 5},  {"user:d", 7},
      {"user:e", 10}, {"user:f", 20}, {"user:g", 35}};
  int next_item = 0;
  for (const auto& [user, n] : profile) {
    for (int i = 0; i < n; ++i) {
      triples.push_back({user, "purchase", "item:" + std::to_string(next_item++)});
    }
  }
  const auto data = load_dataset_from_graph(graph_of(triples));
  const auto hist = purchase_histogram(data);
  for (const auto users_in_bucket : hist.bucket_users) {
    CHECK(users_in_bucket == 1);
  }
}

TEST_CASE("held-out purchases round-trip through the pair file") {
  const auto g = graph_of({{"user:a", "purchase", "item:1"},
                           {"user:a", "purchase", "item:2"},
                           {"user:b", "purchase", "item:1"},
                           {"user:b", "purchase", "item:3"}});
  std::map<EntityId, std::set<EntityId>> test;
  test[g.entity("user:a")] = {g.entity("item:3")};
  test[g.entity("user:b")] = {g.entity("item:2")};

  TempDir tmp("pairs");
  const auto train = tmp.file("train.tsv");
  write_triples_tsv(g, train);
  const auto pairs = tmp.file("test.tsv");
  write_test_purchases(g, test, pairs);

  const auto data = load_dataset(train, pairs);
  REQUIRE(data.test_purchases.size() == 2);
  CHECK(data.test_purchases.at(data.graph.entity("user:a")) ==
        std::set<EntityId>{data.graph.entity("item:3")});
  CHECK(data.test_purchases.at(data.graph.entity("user:b")) ==
        std::set<EntityId>{data.graph.entity("item:2")});
}
