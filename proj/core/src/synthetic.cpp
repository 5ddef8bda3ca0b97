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

#include "pathfair/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pathfair/error.hpp"
#include "pathfair/rng.hpp"

namespace pathfair {

namespace {

std::string padded(const char* prefix, std::size_t index, std::size_t count) {
  std::size_t width = 1;
  for (std::size_t v = count > 0 ? count - 1 : 0; v >= 10; v /= 10) ++width;
  width = std::max<std::size_t>(width, 4);
  std::string digits = std::to_string(index);
  std::string out(prefix);
  out += ':';
  out.append(width - std::min(width, digits.size()), '0');
  out += digits;
  return out;
}

// Weighted sampler over item indices, Zipf-shaped: weight of rank r is
// (r+1)^-skew. skew 0 is uniform.
class ItemSampler {
 public:
  ItemSampler(std::size_t items, double skew) : cumulative_(items) {
    double acc = 0.0;
    for (std::size_t i = 0; i < items; ++i) {
      acc += std::pow(static_cast<double>(i + 1), -skew);
      cumulative_[i] = acc;
    }
  }

  std::size_t draw(Rng& rng) const {
    const double x = rng.next_double() * cumulative_.back();
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), x);
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

// n distinct draws from the sampler, insertion order preserved. Falls back to
// the lowest unused indices if rejection stalls.
std::vector<std::size_t> draw_distinct(const ItemSampler& sampler, Rng& rng, std::size_t n,
                                       std::size_t universe) {
  std::vector<std::size_t> out;
  std::vector<bool> used(universe, false);
  out.reserve(n);
  std::size_t attempts = 0;
  while (out.size() < n && attempts < 100 * n + 100) {
    ++attempts;
    const std::size_t pick = sampler.draw(rng);
    if (used[pick]) continue;
    used[pick] = true;
    out.push_back(pick);
  }
  for (std::size_t i = 0; out.size() < n && i < universe; ++i) {
    if (!used[i]) {
      used[i] = true;
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.users == 0 || cfg.items == 0 || cfg.brands == 0 || cfg.categories == 0) {
    throw Error("synthetic config needs users, items, brands, and categories");
  }
  if (cfg.min_purchases < 4) throw Error("purchase floor must be at least 4");
  if (!(cfg.activity_skew > 0.0)) throw Error("activity skew must be positive");
  if (!(cfg.head_skew > 0.0)) throw Error("head skew must be positive");
  if (!(cfg.head_fraction > 0.0) || !(cfg.head_fraction < 1.0)) {
    throw Error("head fraction must lie strictly between 0 and 1");
  }
  if (cfg.popularity_skew < 0.0) throw Error("popularity skew must be non-negative");
  if (cfg.words < cfg.words_per_item || cfg.words < cfg.mentions_per_user) {
    throw Error("word universe smaller than the per-entity word demand");
  }
  const std::size_t cap = std::min(cfg.max_purchases, cfg.items / 2);
  if (cap < cfg.min_purchases) {
    throw Error("purchase floor " + std::to_string(cfg.min_purchases) +
                " exceeds the purchase ceiling " + std::to_string(cap));
  }

  Rng rng(cfg.seed);
  SyntheticDataset data;
  auto user_name = [&](std::size_t i) { return padded("user", i, cfg.users); };
  auto item_name = [&](std::size_t i) { return padded("item", i, cfg.items); };
  auto word_name = [&](std::size_t i) { return padded("word", i, cfg.words); };
  auto brand_name = [&](std::size_t i) { return padded("brand", i, cfg.brands); };
  auto category_name = [&](std::size_t i) { return padded("category", i, cfg.categories); };
  auto emit = [&](std::string head, const char* rel, std::string tail) {
    TripleRecord rec;
    rec.head = std::move(head);
    rec.relation = rel;
    rec.tail = std::move(tail);
    rec.head_class = entity_class_of(rec.head);
    rec.tail_class = entity_class_of(rec.tail);
    data.train.push_back(std::move(rec));
  };

  // Item metadata first: brand, category, describing words.
  ItemSampler word_sampler(cfg.words, 0.0);
  for (std::size_t i = 0; i < cfg.items; ++i) {
    emit(item_name(i), "produced_by", brand_name(rng.below(cfg.brands)));
    emit(item_name(i), "belongs_to", category_name(rng.below(cfg.categories)));
    for (const auto w : draw_distinct(word_sampler, rng, cfg.words_per_item, cfg.words)) {
      emit(item_name(i), "described_by", word_name(w));
    }
  }

  // Users: mentioned words, then spliced power-law purchases driven by the
  // rank quantile. The first train_count distinct items are training
  // purchases, the remaining quarter is held out for testing.
  ItemSampler item_sampler(cfg.items, cfg.popularity_skew);
  for (std::size_t u = 0; u < cfg.users; ++u) {
    for (const auto w : draw_distinct(word_sampler, rng, cfg.mentions_per_user, cfg.words)) {
      emit(user_name(u), "mention", word_name(w));
    }

    const double quantile = (static_cast<double>(u) + 0.5) / static_cast<double>(cfg.users);
    double raw = static_cast<double>(cfg.min_purchases) *
                 std::pow(quantile, -cfg.activity_skew);
    if (quantile < cfg.head_fraction) {
      raw *= std::pow(cfg.head_fraction / quantile, cfg.head_skew);
    }
    const std::size_t train_count =
        std::min<std::size_t>(cap, raw >= static_cast<double>(cap)
                                       ? cap
                                       : static_cast<std::size_t>(raw));
    const std::size_t test_count = (train_count + 3) / 4;
    const auto picks = draw_distinct(item_sampler, rng, train_count + test_count, cfg.items);
    for (std::size_t j = 0; j < picks.size(); ++j) {
      if (j < train_count) {
        emit(user_name(u), "purchase", item_name(picks[j]));
      } else {
        data.test[user_name(u)].insert(item_name(picks[j]));
      }
    }
  }
  return data;
}

}  // namespace pathfair
