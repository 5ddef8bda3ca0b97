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

#ifndef PATHFAIR_SYNTHETIC_HPP_
#define PATHFAIR_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "pathfair/kg.hpp"

namespace pathfair {

// Imbalanced-marketplace generator. User u gets the deterministic activity
// quantile q = (u + 0.5) / users, so the purchase-count profile is fixed by
// the config and the seed only shuffles which items get bought. Training
// counts follow a spliced power law: floor * q^(-activity_skew) over the
// tail, boosted by (head_fraction / q)^head_skew inside the head, truncated
// below at `floor` and above at min(max_purchases, items/2). The steep head
// hands the top head_fraction of users a strict majority of all purchases
// while every user keeps at least `floor` training purchases. A quarter of
// each user's training count is generated on top as held-out test purchases.
struct SyntheticConfig {
  std::size_t users = 2000;
  std::size_t items = 1000;
  std::size_t brands = 50;
  std::size_t categories = 25;
  std::size_t words = 400;
  std::size_t min_purchases = 4;     // training floor, >= 4
  std::size_t max_purchases = 300;   // per-user training ceiling
  double activity_skew = 0.4;        // tail power-law exponent, > 0
  double head_skew = 2.0;            // extra exponent inside the head, > 0
  double head_fraction = 0.05;       // quantile mass treated as the head
  double popularity_skew = 0.3;      // Zipf exponent of item popularity
  std::size_t words_per_item = 3;
  std::size_t mentions_per_user = 2;
  std::uint64_t seed = 7;
};

struct SyntheticDataset {
  std::vector<TripleRecord> train;
  // Held-out purchases, user name -> item names.
  std::map<std::string, std::set<std::string>> test;
};

// Deterministic for a fixed config. Throws on an infeasible config (floor of
// zero, non-positive skew, or more purchases demanded than distinct items).
SyntheticDataset generate_synthetic(const SyntheticConfig& cfg);

}  // namespace pathfair

#endif  // PATHFAIR_SYNTHETIC_HPP_
