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

#include "pathfair/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "pathfair/error.hpp"
#include "pathfair/metrics.hpp"

namespace pathfair {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double clamp0(double v) { return v > 0.0 ? v : 0.0; }

struct UserSeries {
  std::vector<double> ndcg, f1, sid, f, proxy;
  double objective = 0.0;
};

GroupedMetric grouped(const std::vector<double>& values, const std::vector<bool>& active,
                      std::size_t active_n) {
  GroupedMetric g;
  const std::size_t m = values.size();
  const std::size_t inactive_n = m - active_n;
  double total = 0.0, act = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    total += values[i];
    if (active[i]) act += values[i];
  }
  g.overall = total / static_cast<double>(m);
  if (active_n == 0 || inactive_n == 0) return g;  // group view undefined
  g.active = act / static_cast<double>(active_n);
  g.inactive = (total - act) / static_cast<double>(inactive_n);
  g.gap = std::abs(g.active - g.inactive);
  return g;
}

VariantMetrics summarize(const UserSeries& s, const std::vector<bool>& active,
                         std::size_t active_n, double covered) {
  VariantMetrics v;
  v.ndcg = grouped(s.ndcg, active, active_n);
  v.f1 = grouped(s.f1, active, active_n);
  v.proxy = grouped(s.proxy, active, active_n);
  v.sid = grouped(s.sid, active, active_n);
  v.f = grouped(s.f, active, active_n);
  v.objective = s.objective;
  v.iru = gini_coefficient(s.ndcg);
  std::vector<double> f_pos(s.f.size());
  std::transform(s.f.begin(), s.f.end(), f_pos.begin(), clamp0);
  v.iedu = gini_coefficient(f_pos);
  v.proxy_iru = gini_coefficient(s.proxy);
  v.coverage = covered / static_cast<double>(s.ndcg.size());
  return v;
}

double proxy_dcg(const ScoredPool& pool, std::span<const std::uint32_t> order,
                 double rec_min, double rec_max) {
  const double range = rec_max - rec_min;
  std::vector<double> norm;
  norm.reserve(order.size());
  for (const auto idx : order) {
    const double rec = pool.cands[idx].rec;
    norm.push_back(range > 0.0 ? (rec - rec_min) / range : 1.0);
  }
  std::sort(norm.begin(), norm.end(), std::greater<>());
  return dcg(norm);
}

}  // namespace

Evaluation evaluate_rankings(const Dataset& data, const RerankModel& model, std::size_t k,
                             const std::vector<RankedList>& reranked) {
  if (k == 0) throw Error("evaluation needs k >= 1");
  const auto& pools = model.pools;
  if (pools.empty()) throw Error("no scored users to evaluate");
  std::map<EntityId, std::size_t> pool_of;
  for (std::size_t p = 0; p < pools.size(); ++p) pool_of[pools[p].user] = p;

  if (reranked.size() != pools.size()) {
    throw Error("reranked lists cover " + std::to_string(reranked.size()) +
                " users, expected " + std::to_string(pools.size()));
  }
  std::vector<const RankedList*> lists(pools.size(), nullptr);
  for (const auto& list : reranked) {
    const auto it = pool_of.find(list.user);
    if (it == pool_of.end()) {
      throw Error("reranked list for unknown user " + data.graph.entity_name(list.user));
    }
    if (lists[it->second] != nullptr) {
      throw Error("duplicate reranked list for user " + data.graph.entity_name(list.user));
    }
    if (list.order.size() != k) {
      throw Error("reranked list for user " + data.graph.entity_name(list.user) +
                  " has " + std::to_string(list.order.size()) + " items, expected " +
                  std::to_string(k));
    }
    std::vector<bool> seen(pools[it->second].cands.size(), false);
    for (const auto idx : list.order) {
      if (idx >= seen.size() || seen[idx]) {
        throw Error("reranked list for user " + data.graph.entity_name(list.user) +
                    " repeats or exceeds its candidate pool");
      }
      seen[idx] = true;
    }
    lists[it->second] = &list;
  }

  const std::size_t m = pools.size();
  std::vector<bool> active(m);
  std::size_t active_n = 0;
  for (std::size_t p = 0; p < m; ++p) {
    active[p] = pools[p].active;
    active_n += pools[p].active ? 1 : 0;
  }

  UserSeries base, rer;
  for (auto* s : {&base, &rer}) {
    s->ndcg.resize(m);
    s->f1.resize(m);
    s->sid.resize(m);
    s->f.resize(m);
    s->proxy.resize(m);
  }
  double covered = 0.0;

  Evaluation eval;
  eval.k = k;
  eval.users.resize(m);
  static const std::set<EntityId> kNoTest;
  for (std::size_t p = 0; p < m; ++p) {
    const auto& pool = pools[p];
    if (pool.cands.size() < k) {
      throw Error("user " + data.graph.entity_name(pool.user) +
                  " has fewer candidates than k");
    }
    std::vector<std::uint32_t> base_order(pool.cands.size());
    for (std::uint32_t i = 0; i < base_order.size(); ++i) base_order[i] = i;
    std::sort(base_order.begin(), base_order.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                if (pool.cands[a].rec != pool.cands[b].rec) {
                  return pool.cands[a].rec > pool.cands[b].rec;
                }
                return a < b;
              });
    base_order.resize(k);

    const auto test_it = data.test_purchases.find(pool.user);
    const auto& relevant = test_it == data.test_purchases.end() ? kNoTest : test_it->second;
    if (!relevant.empty()) covered += 1.0;

    auto measure = [&](std::span<const std::uint32_t> order, UserSeries& s) {
      std::vector<std::uint32_t> items;
      items.reserve(order.size());
      double sid_sum = 0.0, f_sum = 0.0;
      for (const auto idx : order) {
        const auto& c = pool.cands[idx];
        items.push_back(c.item);
        sid_sum += c.sid;
        f_sum += c.phi;
        s.objective += c.rec;
      }
      s.ndcg[p] = ndcg_at_k(items, relevant, k);
      s.f1[p] = f1_at_k(items, relevant, k);
      s.sid[p] = sid_sum / static_cast<double>(order.size());
      s.f[p] = f_sum;
      s.proxy[p] = proxy_dcg(pool, order, model.rec_min, model.rec_max);
    };
    measure(base_order, base);
    measure(lists[p]->order, rer);

    auto& row = eval.users[p];
    row.user = data.graph.entity_name(pool.user);
    row.active = pool.active;
    row.ndcg_baseline = base.ndcg[p];
    row.ndcg_reranked = rer.ndcg[p];
    row.f1_baseline = base.f1[p];
    row.f1_reranked = rer.f1[p];
    row.sid_baseline = base.sid[p];
    row.sid_reranked = rer.sid[p];
    row.f_baseline = base.f[p];
    row.f_reranked = rer.f[p];
    row.proxy_baseline = base.proxy[p];
    row.proxy_reranked = rer.proxy[p];
  }

  eval.baseline = summarize(base, active, active_n, covered);
  eval.reranked = summarize(rer, active, active_n, covered);
  return eval;
}

namespace {

std::string cell(const char* fmt, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string label(const std::string& text) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%-10s ", text.c_str());
  return buf;
}

}  // namespace

std::string render_report_table(const Evaluation& eval) {
  const std::string at_k = "@" + std::to_string(eval.k);
  std::string out;
  out += "ranking quality, percent (gap = |active - inactive|)\n";
  out += label("metric") + label("variant") +
         "   overall  inactive    active       gap\n";
  auto quality_row = [&](const std::string& metric, const char* name,
                         const GroupedMetric& g) {
    out += label(metric) + label(name) + cell("%10.3f", g.overall * 100.0) +
           cell("%10.3f", g.inactive * 100.0) + cell("%10.3f", g.active * 100.0) +
           cell("%10.3f", g.gap * 100.0) + "\n";
  };
  quality_row("ndcg" + at_k, "baseline", eval.baseline.ndcg);
  quality_row("ndcg" + at_k, "reranked", eval.reranked.ndcg);
  quality_row("f1" + at_k, "baseline", eval.baseline.f1);
  quality_row("f1" + at_k, "reranked", eval.reranked.f1);

  out += "\nexplanation diversity and disparities, raw values\n";
  out += label("variant") +
         "     objective   mean sid  inact sid  activ sid          gedu       iedu"
         "        iru  proxy gap\n";
  auto fairness_row = [&](const char* name, const VariantMetrics& v) {
    out += label(name) + cell("%14.5f", v.objective) + cell("%11.5f", v.sid.overall) +
           cell("%11.5f", v.sid.inactive) + cell("%11.5f", v.sid.active) +
           cell("%14.5f", v.f.gap) + cell("%11.5f", v.iedu) + cell("%11.5f", v.iru) +
           cell("%11.5f", v.proxy.gap) + "\n";
  };
  fairness_row("baseline", eval.baseline);
  fairness_row("reranked", eval.reranked);
  out += "\ncoverage: " + cell("%.3f", eval.baseline.coverage * 100.0) +
         "% of users hold at least one held-out purchase\n";
  return out;
}

void write_metrics_csv(const Evaluation& eval, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << "variant,metric,overall,inactive,active,gap\n";
  auto rows = [&](const char* name, const VariantMetrics& v) {
    out << name << ",ndcg," << num(v.ndcg.overall) << ',' << num(v.ndcg.inactive) << ','
        << num(v.ndcg.active) << ',' << num(v.ndcg.gap) << '\n';
    out << name << ",f1," << num(v.f1.overall) << ',' << num(v.f1.inactive) << ','
        << num(v.f1.active) << ',' << num(v.f1.gap) << '\n';
  };
  rows("baseline", eval.baseline);
  rows("reranked", eval.reranked);
  if (!out.flush()) throw Error("failed writing " + file.string());
}

void write_sid_distribution_csv(const Evaluation& eval, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << "user,group,sid_baseline,sid_reranked\n";
  for (const auto& row : eval.users) {
    out << row.user << ',' << (row.active ? "active" : "inactive") << ','
        << num(row.sid_baseline) << ',' << num(row.sid_reranked) << '\n';
  }
  if (!out.flush()) throw Error("failed writing " + file.string());
}

void write_lorenz_csv(const Evaluation& eval, bool explanation,
                      const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  const std::size_t m = eval.users.size();
  auto curve = [&](auto&& pick) {
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = clamp0(pick(eval.users[i]));
    std::sort(v.begin(), v.end());
    double total = 0.0;
    for (const double x : v) total += x;
    std::vector<double> shares(m + 1, 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      acc += v[i];
      // all-zero samples fall back to the equality diagonal, matching the
      // zero-Gini convention
      shares[i + 1] = total > 0.0 ? acc / total
                                  : static_cast<double>(i + 1) / static_cast<double>(m);
    }
    return shares;
  };
  std::vector<double> base, rer;
  if (explanation) {
    base = curve([](const UserMetricsRow& r) { return r.f_baseline; });
    rer = curve([](const UserMetricsRow& r) { return r.f_reranked; });
  } else {
    base = curve([](const UserMetricsRow& r) { return r.ndcg_baseline; });
    rer = curve([](const UserMetricsRow& r) { return r.ndcg_reranked; });
  }
  out << "user_share,baseline_share,reranked_share\n";
  for (std::size_t i = 0; i <= m; ++i) {
    out << num(static_cast<double>(i) / static_cast<double>(m)) << ',' << num(base[i])
        << ',' << num(rer[i]) << '\n';
  }
  if (!out.flush()) throw Error("failed writing " + file.string());
}

namespace {

json grouped_to_json(const GroupedMetric& g) {
  return json{{"overall", g.overall},
              {"active", g.active},
              {"inactive", g.inactive},
              {"gap", g.gap}};
}

GroupedMetric grouped_from_json(const json& j) {
  GroupedMetric g;
  g.overall = j.at("overall").get<double>();
  g.active = j.at("active").get<double>();
  g.inactive = j.at("inactive").get<double>();
  g.gap = j.at("gap").get<double>();
  return g;
}

json variant_to_json(const VariantMetrics& v) {
  return json{{"ndcg", grouped_to_json(v.ndcg)},
              {"f1", grouped_to_json(v.f1)},
              {"proxy", grouped_to_json(v.proxy)},
              {"sid", grouped_to_json(v.sid)},
              {"f", grouped_to_json(v.f)},
              {"objective", v.objective},
              {"iru", v.iru},
              {"iedu", v.iedu},
              {"proxy_iru", v.proxy_iru},
              {"coverage", v.coverage}};
}

// Unbounded epsilons serialize as null.
double double_or_inf(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

VariantMetrics variant_from_json(const json& j) {
  VariantMetrics v;
  v.ndcg = grouped_from_json(j.at("ndcg"));
  v.f1 = grouped_from_json(j.at("f1"));
  v.proxy = grouped_from_json(j.at("proxy"));
  v.sid = grouped_from_json(j.at("sid"));
  v.f = grouped_from_json(j.at("f"));
  v.objective = j.at("objective").get<double>();
  v.iru = j.at("iru").get<double>();
  v.iedu = j.at("iedu").get<double>();
  v.proxy_iru = j.at("proxy_iru").get<double>();
  v.coverage = j.at("coverage").get<double>();
  return v;
}

}  // namespace

std::string evaluation_to_json_text(const Evaluation& eval) {
  json users = json::array();
  for (const auto& r : eval.users) {
    users.push_back(json{{"user", r.user},
                         {"active", r.active},
                         {"ndcg_baseline", r.ndcg_baseline},
                         {"ndcg_reranked", r.ndcg_reranked},
                         {"f1_baseline", r.f1_baseline},
                         {"f1_reranked", r.f1_reranked},
                         {"sid_baseline", r.sid_baseline},
                         {"sid_reranked", r.sid_reranked},
                         {"f_baseline", r.f_baseline},
                         {"f_reranked", r.f_reranked},
                         {"proxy_baseline", r.proxy_baseline},
                         {"proxy_reranked", r.proxy_reranked}});
  }
  const json j{{"k", eval.k},
               {"config",
                json{{"alpha", eval.config.alpha},
                     {"beta", eval.config.beta},
                     {"k", eval.config.k},
                     {"mode", eval.config.mode},
                     {"epsilon_quality", eval.config.epsilon_quality},
                     {"epsilon_diversity", eval.config.epsilon_diversity},
                     {"seed", eval.config.seed}}},
               {"baseline", variant_to_json(eval.baseline)},
               {"reranked", variant_to_json(eval.reranked)},
               {"users", users}};
  return j.dump(2) + "\n";
}

Evaluation evaluation_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("evaluation json: ") + e.what());
  }
  try {
    Evaluation eval;
    eval.k = j.at("k").get<std::size_t>();
    const auto& c = j.at("config");
    eval.config.alpha = c.at("alpha").get<double>();
    eval.config.beta = c.at("beta").get<double>();
    eval.config.k = c.at("k").get<std::size_t>();
    eval.config.mode = c.at("mode").get<std::string>();
    eval.config.epsilon_quality = double_or_inf(c.at("epsilon_quality"));
    eval.config.epsilon_diversity = double_or_inf(c.at("epsilon_diversity"));
    eval.config.seed = c.at("seed").get<std::uint64_t>();
    eval.baseline = variant_from_json(j.at("baseline"));
    eval.reranked = variant_from_json(j.at("reranked"));
    for (const auto& u : j.at("users")) {
      UserMetricsRow r;
      r.user = u.at("user").get<std::string>();
      r.active = u.at("active").get<bool>();
      r.ndcg_baseline = u.at("ndcg_baseline").get<double>();
      r.ndcg_reranked = u.at("ndcg_reranked").get<double>();
      r.f1_baseline = u.at("f1_baseline").get<double>();
      r.f1_reranked = u.at("f1_reranked").get<double>();
      r.sid_baseline = u.at("sid_baseline").get<double>();
      r.sid_reranked = u.at("sid_reranked").get<double>();
      r.f_baseline = u.at("f_baseline").get<double>();
      r.f_reranked = u.at("f_reranked").get<double>();
      r.proxy_baseline = u.at("proxy_baseline").get<double>();
      r.proxy_reranked = u.at("proxy_reranked").get<double>();
      eval.users.push_back(std::move(r));
    }
    return eval;
  } catch (const json::exception& e) {
    throw Error(std::string("evaluation json: ") + e.what());
  }
}

}  // namespace pathfair
