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

#include "pathfair/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>

#include "pathfair/error.hpp"
#include "pathfair/rng.hpp"

namespace pathfair {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dcg_desc(const std::vector<double>& desc_values) {
  double acc = 0.0;
  for (std::size_t r = 0; r < desc_values.size(); ++r) {
    acc += desc_values[r] / std::log2(static_cast<double>(r) + 2.0);
  }
  return acc;
}

void validate(const SolverInstance& inst, const SolverConfig& cfg) {
  if (inst.k == 0) throw Error("selection size k must be positive");
  if (inst.users.empty()) throw Error("solver instance has no users");
  if (cfg.epsilon.quality < 0.0 || cfg.epsilon.diversity < 0.0) {
    throw Error("epsilons must be non-negative");
  }
  bool any_active = false, any_inactive = false;
  for (std::size_t u = 0; u < inst.users.size(); ++u) {
    const auto& user = inst.users[u];
    if (user.rec.size() < inst.k) {
      throw Error("user " + std::to_string(u) + " has " +
                  std::to_string(user.rec.size()) + " candidates, needs at least " +
                  std::to_string(inst.k));
    }
    if (user.rec.size() != user.phi.size() || user.rec.size() != user.norm_rec.size()) {
      throw Error("user " + std::to_string(u) + " has misaligned score vectors");
    }
    (user.active ? any_active : any_inactive) = true;
  }
  if (inst.mode == ConstraintMode::Group && (!any_active || !any_inactive)) {
    throw Error("group constraints need both an active and an inactive group");
  }
}

// Per-user aggregates of one selection.
struct UserAggregate {
  double rec_sum = 0.0;
  double phi_sum = 0.0;
  double proxy = 0.0;  // DCG of selected norm_rec, best first
};

UserAggregate aggregate(const SolverUser& user, std::span<const std::uint32_t> chosen) {
  UserAggregate agg;
  std::vector<double> norm;
  norm.reserve(chosen.size());
  for (const auto idx : chosen) {
    agg.rec_sum += user.rec[idx];
    agg.phi_sum += user.phi[idx];
    norm.push_back(user.norm_rec[idx]);
  }
  std::sort(norm.begin(), norm.end(), std::greater<>());
  agg.proxy = dcg_desc(norm);
  return agg;
}

double clamp0(double v) { return v > 0.0 ? v : 0.0; }

// Sum over ordered value pairs |v_x - v_y| / 2, queried and updated through a
// sorted copy with prefix sums.
struct PairSpread {
  std::vector<double> sorted;  // ascending
  std::vector<double> prefix;  // prefix[i] = sum of sorted[0..i)
  double total = 0.0;
  double pair_sum = 0.0;  // sum_{x<y} |v_x - v_y|

  void reset(std::vector<double> values) {
    sorted = std::move(values);
    std::sort(sorted.begin(), sorted.end());
    rebuild_prefix();
    pair_sum = 0.0;
    // sum_{x<y} |..| over the ascending order: element i exceeds i earlier
    // ones, contributing i*v_i - prefix[i].
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      pair_sum += static_cast<double>(i) * sorted[i] - prefix[i];
    }
  }

  void rebuild_prefix() {
    prefix.assign(sorted.size() + 1, 0.0);
    for (std::size_t i = 0; i < sorted.size(); ++i) prefix[i + 1] = prefix[i] + sorted[i];
    total = prefix[sorted.size()];
  }

  // Sum of |q - v| over all stored values.
  double abs_diff_sum(double q) const {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), q);
    const auto less = static_cast<std::size_t>(it - sorted.begin());
    const double sum_less = prefix[less];
    const double sum_geq = total - sum_less;
    const auto geq = sorted.size() - less;
    return q * static_cast<double>(less) - sum_less + sum_geq -
           q * static_cast<double>(geq);
  }

  // Gini after hypothetically replacing stored value x with y.
  double gini_after(double x, double y) const {
    const double new_pairs = pair_sum - abs_diff_sum(x) + abs_diff_sum(y) - std::abs(y - x);
    const double new_total = total - x + y;
    const auto m = static_cast<double>(sorted.size());
    if (new_total <= 0.0 || sorted.empty()) return 0.0;
    return new_pairs / (m * new_total);
  }

  double gini() const {
    const auto m = static_cast<double>(sorted.size());
    if (total <= 0.0 || sorted.empty()) return 0.0;
    return pair_sum / (m * total);
  }

  void replace(double x, double y) {
    pair_sum = pair_sum - abs_diff_sum(x) + abs_diff_sum(y) - std::abs(y - x);
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    sorted.erase(it);
    sorted.insert(std::lower_bound(sorted.begin(), sorted.end(), y), y);
    rebuild_prefix();
  }
};

// Mutable global view of the two disparity statistics.
class DisparityState {
 public:
  DisparityState(const SolverInstance& inst, const std::vector<UserAggregate>& aggs)
      : mode_(inst.mode) {
    if (mode_ == ConstraintMode::Group) {
      for (std::size_t u = 0; u < inst.users.size(); ++u) {
        auto& side = inst.users[u].active ? active_ : inactive_;
        side.n += 1.0;
        side.proxy += aggs[u].proxy;
        side.phi += aggs[u].phi_sum;
      }
    } else {
      std::vector<double> proxies(aggs.size()), phis(aggs.size());
      for (std::size_t u = 0; u < aggs.size(); ++u) {
        proxies[u] = aggs[u].proxy;
        phis[u] = clamp0(aggs[u].phi_sum);
      }
      proxy_spread_.reset(std::move(proxies));
      phi_spread_.reset(std::move(phis));
    }
  }

  double quality() const {
    if (mode_ == ConstraintMode::Group) {
      return std::abs(active_.proxy / active_.n - inactive_.proxy / inactive_.n);
    }
    return proxy_spread_.gini();
  }

  double diversity() const {
    if (mode_ == ConstraintMode::Group) {
      return std::abs(active_.phi / active_.n - inactive_.phi / inactive_.n);
    }
    return phi_spread_.gini();
  }

  // Both statistics after user u moves from (proxy x, phi fx) to (y, fy).
  std::pair<double, double> after(bool user_active, double x, double y, double fx,
                                  double fy) const {
    if (mode_ == ConstraintMode::Group) {
      Side a = active_, i = inactive_;
      Side& side = user_active ? a : i;
      side.proxy += y - x;
      side.phi += fy - fx;
      return {std::abs(a.proxy / a.n - i.proxy / i.n),
              std::abs(a.phi / a.n - i.phi / i.n)};
    }
    return {proxy_spread_.gini_after(x, y),
            phi_spread_.gini_after(clamp0(fx), clamp0(fy))};
  }

  void apply(bool user_active, double x, double y, double fx, double fy) {
    if (mode_ == ConstraintMode::Group) {
      Side& side = user_active ? active_ : inactive_;
      side.proxy += y - x;
      side.phi += fy - fx;
    } else {
      proxy_spread_.replace(x, y);
      phi_spread_.replace(clamp0(fx), clamp0(fy));
    }
  }

 private:
  struct Side {
    double n = 0.0;
    double proxy = 0.0;
    double phi = 0.0;
  };
  ConstraintMode mode_;
  Side active_, inactive_;
  PairSpread proxy_spread_;
  PairSpread phi_spread_;
};

std::vector<std::uint32_t> top_k_by_rec(const SolverUser& user, std::size_t k) {
  std::vector<std::uint32_t> order(user.rec.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (user.rec[a] != user.rec[b]) return user.rec[a] > user.rec[b];
    return a < b;
  });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

std::vector<std::vector<std::uint32_t>> baseline_selection(const SolverInstance& inst) {
  std::vector<std::vector<std::uint32_t>> sel;
  sel.reserve(inst.users.size());
  for (const auto& user : inst.users) {
    if (user.rec.size() < inst.k) {
      throw Error("user has fewer candidates than the selection size");
    }
    sel.push_back(top_k_by_rec(user, inst.k));
  }
  return sel;
}

DisparityValues measure_selection(const SolverInstance& inst,
                                  const std::vector<std::vector<std::uint32_t>>& selection) {
  if (selection.size() != inst.users.size()) {
    throw Error("selection does not cover every user");
  }
  std::vector<UserAggregate> aggs(inst.users.size());
  DisparityValues out;
  for (std::size_t u = 0; u < inst.users.size(); ++u) {
    if (selection[u].size() != inst.k) throw Error("selection row is not of size k");
    aggs[u] = aggregate(inst.users[u], selection[u]);
    out.objective += aggs[u].rec_sum;
  }
  const DisparityState state(inst, aggs);
  out.quality = state.quality();
  out.diversity = state.diversity();
  return out;
}

namespace {

struct Incumbents {
  std::optional<std::vector<std::vector<std::uint32_t>>> feasible;
  double feasible_obj = -kInf;
  std::vector<std::vector<std::uint32_t>> least_viol;
  double least_viol_total = kInf;
  double least_viol_obj = -kInf;

  void offer(const std::vector<std::vector<std::uint32_t>>& sel, double obj, double vq,
             double vd, const EpsilonPair& eps) {
    const bool is_feasible = vq < eps.quality && vd < eps.diversity;
    if (is_feasible && obj > feasible_obj) {
      feasible = sel;
      feasible_obj = obj;
    }
    const double total =
        clamp0(vq - eps.quality) + clamp0(vd - eps.diversity);
    if (total < least_viol_total ||
        (total == least_viol_total && obj > least_viol_obj)) {
      least_viol = sel;
      least_viol_total = total;
      least_viol_obj = obj;
    }
  }
};

}  // namespace

SolveResult solve_constrained_selection(const SolverInstance& inst,
                                        const SolverConfig& cfg) {
  validate(inst, cfg);
  const std::size_t m = inst.users.size();
  const EpsilonPair eps = cfg.epsilon;
  EpsilonPair work = eps;
  if (std::isfinite(work.quality)) work.quality *= 1.0 - cfg.epsilon_shrink;
  if (std::isfinite(work.diversity)) work.diversity *= 1.0 - cfg.epsilon_shrink;

  SolveResult result;
  Incumbents inc;
  Rng rng(cfg.seed);

  // Working copy of one selection with incrementally maintained statistics.
  std::vector<std::vector<std::uint32_t>> selection;
  std::vector<std::vector<char>> chosen(m);
  std::vector<UserAggregate> aggs(m);
  std::vector<std::vector<double>> sel_norm(m);  // selected norm_rec, descending
  double objective = 0.0;
  std::optional<DisparityState> state;
  double cur_q = 0.0, cur_d = 0.0;

  auto load = [&](std::vector<std::vector<std::uint32_t>> sel) {
    selection = std::move(sel);
    objective = 0.0;
    for (std::size_t u = 0; u < m; ++u) {
      chosen[u].assign(inst.users[u].rec.size(), 0);
      for (const auto idx : selection[u]) chosen[u][idx] = 1;
      aggs[u] = aggregate(inst.users[u], selection[u]);
      objective += aggs[u].rec_sum;
      sel_norm[u].clear();
      for (const auto idx : selection[u]) sel_norm[u].push_back(inst.users[u].norm_rec[idx]);
      std::sort(sel_norm[u].begin(), sel_norm[u].end(), std::greater<>());
    }
    state.emplace(inst, aggs);
    cur_q = state->quality();
    cur_d = state->diversity();
    inc.offer(selection, objective, cur_q, cur_d, eps);
  };

  std::size_t iter = 0;
  auto record = [&](bool accepted) {
    if (!cfg.keep_trace) return;
    result.trace.push_back(TraceRow{iter, objective, clamp0(cur_q - eps.quality),
                                    clamp0(cur_d - eps.diversity), accepted});
  };

  double mu_q = cfg.mu_init, mu_d = cfg.mu_init;
  auto penalty = [&](double q, double d) {
    return mu_q * clamp0(q - work.quality) + mu_d * clamp0(d - work.diversity);
  };

  std::vector<std::size_t> order(m);
  for (std::size_t u = 0; u < m; ++u) order[u] = u;

  std::vector<double> scratch;
  scratch.reserve(inst.k);
  // DCG of sel_norm[u] with value x replaced by y.
  auto proxy_after = [&](std::size_t u, double x, double y) {
    scratch = sel_norm[u];
    scratch.erase(std::find(scratch.begin(), scratch.end(), x));
    scratch.insert(std::lower_bound(scratch.begin(), scratch.end(), y, std::greater<>()),
                   y);
    return dcg_desc(scratch);
  };

  bool done = false;  // global move budget exhausted

  // One pass: the best improving single swap per user, users in a seeded
  // order. Penalty mode trades rec against the weighted violation change;
  // feasible mode admits only strictly feasible neighbors and climbs rec.
  auto scan_pass = [&](bool feasible_only) {
    shuffle(order, rng);
    bool improved = false;
    for (const std::size_t u : order) {
      const auto& user = inst.users[u];
      const auto n = static_cast<std::uint32_t>(user.rec.size());
      const double base_pen = penalty(cur_q, cur_d);
      const double tol = 1e-12 * (1.0 + std::abs(objective));

      double best_gain = tol;
      std::uint32_t best_out = 0, best_in = 0;
      double best_proxy = 0.0, best_q = 0.0, best_d = 0.0;
      bool found = false;
      for (std::uint32_t a = 0; a < n; ++a) {
        if (!chosen[u][a]) continue;
        for (std::uint32_t b = 0; b < n; ++b) {
          if (chosen[u][b]) continue;
          const double d_rec = user.rec[b] - user.rec[a];
          if (feasible_only && d_rec <= best_gain) continue;
          const double new_phi = aggs[u].phi_sum + user.phi[b] - user.phi[a];
          const double new_proxy = proxy_after(u, user.norm_rec[a], user.norm_rec[b]);
          const auto [nq, nd] = state->after(user.active, aggs[u].proxy, new_proxy,
                                             aggs[u].phi_sum, new_phi);
          double gain = 0.0;
          if (feasible_only) {
            if (!(nq < eps.quality && nd < eps.diversity)) continue;
            gain = d_rec;
          } else {
            gain = d_rec - (penalty(nq, nd) - base_pen);
          }
          if (gain > best_gain) {
            best_gain = gain;
            best_out = a;
            best_in = b;
            best_proxy = new_proxy;
            best_q = nq;
            best_d = nd;
            found = true;
          }
        }
      }
      if (!found) continue;

      const double new_phi =
          aggs[u].phi_sum + user.phi[best_in] - user.phi[best_out];
      state->apply(user.active, aggs[u].proxy, best_proxy, aggs[u].phi_sum, new_phi);
      chosen[u][best_out] = 0;
      chosen[u][best_in] = 1;
      objective += user.rec[best_in] - user.rec[best_out];
      aggs[u].rec_sum += user.rec[best_in] - user.rec[best_out];
      aggs[u].phi_sum = new_phi;
      aggs[u].proxy = best_proxy;
      {
        auto& vals = sel_norm[u];
        vals.erase(std::find(vals.begin(), vals.end(), user.norm_rec[best_out]));
        vals.insert(std::lower_bound(vals.begin(), vals.end(), user.norm_rec[best_in],
                                     std::greater<>()),
                    user.norm_rec[best_in]);
      }
      {
        auto& row = selection[u];
        row.erase(std::find(row.begin(), row.end(), best_out));
        row.insert(std::lower_bound(row.begin(), row.end(), best_in), best_in);
      }
      cur_q = best_q;
      cur_d = best_d;
      improved = true;
      ++result.applied_moves;
      ++iter;
      record(true);
      inc.offer(selection, objective, cur_q, cur_d, eps);
      if (result.applied_moves >= cfg.max_applied_moves) {
        done = true;
        break;
      }
    }
    return improved;
  };

  // Penalty descent until a local optimum survives the weight doublings.
  auto penalty_search = [&]() {
    mu_q = cfg.mu_init;
    mu_d = cfg.mu_init;
    std::size_t doublings = 0;
    while (!done) {
      if (scan_pass(false)) continue;
      const bool q_viol = cur_q > work.quality;
      const bool d_viol = cur_d > work.diversity;
      if (!q_viol && !d_viol) break;  // unpenalized local optimum
      if (doublings >= cfg.max_mu_doublings) break;
      if (q_viol) mu_q *= 2.0;
      if (d_viol) mu_d *= 2.0;
      ++doublings;
      ++result.mu_doublings;
      ++iter;
      record(false);
    }
  };

  // Swap a random chosen candidate per kicked user, within the k-per-user
  // shape, to push the next descent out of the current basin.
  auto kick_row = [&](std::vector<std::uint32_t>& row, std::size_t n) {
    const auto out_pos = static_cast<std::size_t>(rng.below(row.size()));
    std::uint32_t in = 0;
    do {
      in = static_cast<std::uint32_t>(rng.below(n));
    } while (std::find(row.begin(), row.end(), in) != row.end());
    row.erase(row.begin() + out_pos);
    row.insert(std::lower_bound(row.begin(), row.end(), in), in);
  };
  auto kick = [&](std::vector<std::vector<std::uint32_t>> sel) {
    bool any_slack = false;
    bool kicked = false;
    for (std::size_t u = 0; u < m; ++u) {
      const auto n = inst.users[u].rec.size();
      if (n == inst.k) continue;
      any_slack = true;
      if (rng.next_double() >= 0.35) continue;
      kick_row(sel[u], n);
      kicked = true;
    }
    while (any_slack && !kicked) {
      const auto u = static_cast<std::size_t>(rng.below(m));
      if (inst.users[u].rec.size() == inst.k) continue;
      kick_row(sel[u], inst.users[u].rec.size());
      kicked = true;
    }
    return sel;
  };

  // Iterated descent: from the unconstrained optimum first, then from seeded
  // kicks of the best selection so far. After each descent the objective is
  // re-climbed inside the feasible region. Stops when two rounds in a row
  // brought nothing new or the move budget runs out.
  constexpr std::size_t kMaxRestarts = 6;
  std::size_t stale = 0;
  for (std::size_t r = 0; r < kMaxRestarts && !done && stale < 2; ++r) {
    const double before_feas = inc.feasible_obj;
    const double before_viol = inc.least_viol_total;
    const double before_viol_obj = inc.least_viol_obj;

    if (r == 0) {
      load(baseline_selection(inst));
    } else {
      load(kick(inc.feasible ? *inc.feasible : inc.least_viol));
    }
    record(false);
    penalty_search();
    if (inc.feasible && !done) {
      load(*inc.feasible);
      while (!done && scan_pass(true)) {
      }
    }

    const bool gained = inc.feasible_obj > before_feas ||
                        inc.least_viol_total < before_viol ||
                        (inc.least_viol_total == before_viol &&
                         inc.least_viol_obj > before_viol_obj);
    stale = gained ? 0 : stale + 1;
  }

  if (inc.feasible) {
    result.selection = std::move(*inc.feasible);
    result.feasible = true;
  } else {
    result.selection = std::move(inc.least_viol);
    result.feasible = false;
  }
  const auto final_values = measure_selection(inst, result.selection);
  result.objective = final_values.objective;
  result.quality_value = final_values.quality;
  result.diversity_value = final_values.diversity;
  return result;
}

SolveResult exhaustive_oracle(const SolverInstance& inst, const SolverConfig& cfg) {
  validate(inst, cfg);
  const std::size_t m = inst.users.size();
  const EpsilonPair eps = cfg.epsilon;

  // All k-subsets per user, with cached aggregates.
  double leaves = 1.0;
  std::vector<std::vector<std::vector<std::uint32_t>>> combos(m);
  std::vector<std::vector<UserAggregate>> combo_aggs(m);
  for (std::size_t u = 0; u < m; ++u) {
    const auto n = static_cast<std::uint32_t>(inst.users[u].rec.size());
    std::vector<std::uint32_t> combo(inst.k);
    for (std::uint32_t i = 0; i < inst.k; ++i) combo[i] = i;
    for (;;) {
      combos[u].push_back(combo);
      combo_aggs[u].push_back(aggregate(inst.users[u], combo));
      // next lexicographic k-subset
      std::size_t i = inst.k;
      while (i > 0 && combo[i - 1] == n - inst.k + i - 1) --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t j = i; j < inst.k; ++j) combo[j] = combo[j - 1] + 1;
    }
    leaves *= static_cast<double>(combos[u].size());
    if (leaves > 1e6) {
      throw Error("exhaustive enumeration too large: over 1e6 combinations");
    }
  }

  std::vector<std::size_t> pick(m, 0);
  std::vector<UserAggregate> aggs(m);
  Incumbents inc;
  std::function<void(std::size_t, double)> walk = [&](std::size_t u, double obj) {
    if (u == m) {
      const DisparityState state(inst, aggs);
      std::vector<std::vector<std::uint32_t>> sel(m);
      for (std::size_t i = 0; i < m; ++i) sel[i] = combos[i][pick[i]];
      inc.offer(sel, obj, state.quality(), state.diversity(), eps);
      return;
    }
    for (std::size_t c = 0; c < combos[u].size(); ++c) {
      pick[u] = c;
      aggs[u] = combo_aggs[u][c];
      walk(u + 1, obj + combo_aggs[u][c].rec_sum);
    }
  };
  walk(0, 0.0);

  SolveResult result;
  if (inc.feasible) {
    result.selection = std::move(*inc.feasible);
    result.feasible = true;
  } else {
    result.selection = std::move(inc.least_viol);
    result.feasible = false;
  }
  const auto values = measure_selection(inst, result.selection);
  result.objective = values.objective;
  result.quality_value = values.quality;
  result.diversity_value = values.diversity;
  return result;
}

}  // namespace pathfair
