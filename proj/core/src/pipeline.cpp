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

#include "pathfair/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "pathfair/error.hpp"
#include "pathfair/hash.hpp"
#include "pathfair/solver.hpp"

namespace pathfair {

std::string file_fingerprint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(buf.str())));
  return hex;
}

}  // namespace pathfair

namespace pathfair::pipeline {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string text_fingerprint(const std::string& text) {
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));
  return hex;
}

// A stage's output files, written to scratch names first and renamed to
// their final names together. A failure anywhere before publish() leaves
// only scratch files, which the destructor removes; a failure during
// publish() rolls back the names already published. Stages therefore never
// leave a partial artifact set behind.
class Outputs {
 public:
  Outputs() = default;
  Outputs(const Outputs&) = delete;
  Outputs& operator=(const Outputs&) = delete;

  ~Outputs() {
    std::error_code ec;
    for (const auto& job : jobs_) {
      if (!job.published) std::filesystem::remove(job.scratch, ec);
    }
  }

  static std::filesystem::path scratch_name(const std::filesystem::path& file) {
    auto tmp = file;
    tmp += ".tmp";
    return tmp;
  }

  // Registers a file some writer already produced at scratch_name(file).
  void staged(const std::filesystem::path& file) {
    jobs_.push_back({file, scratch_name(file), false});
  }

  void text(const std::filesystem::path& file, const std::string& content) {
    const auto tmp = scratch_name(file);
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("failed writing " + tmp.string());
    out.close();
    jobs_.push_back({file, tmp, false});
  }

  void json_file(const std::filesystem::path& file, const json& j) {
    text(file, j.dump(2) + "\n");
  }

  void publish() {
    try {
      for (auto& job : jobs_) {
        std::filesystem::rename(job.scratch, job.target);
        job.published = true;
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& job : jobs_) {
        if (job.published) std::filesystem::remove(job.target, ec);
      }
      throw;  // unpublished scratch files fall to the destructor
    }
  }

 private:
  struct Job {
    std::filesystem::path target;
    std::filesystem::path scratch;
    bool published;
  };
  std::vector<Job> jobs_;
};

json read_json_file(const std::filesystem::path& file, const std::string& what) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + what + ": " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(file.string() + ": " + e.what());
  }
  return j;
}

std::string mode_name(ConstraintMode mode) {
  return mode == ConstraintMode::Group ? "group" : "individual";
}

ConstraintMode mode_from_name(const std::string& name) {
  if (name == "group") return ConstraintMode::Group;
  if (name == "individual") return ConstraintMode::Individual;
  throw Error("unknown constraint mode `" + name + "`, expected group or individual");
}

// Unbounded epsilons serialize as null.
json epsilon_json(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

double epsilon_from_json(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

void require_dir(const std::filesystem::path& dir) {
  if (dir.empty()) throw Error("output directory not set");
  std::filesystem::create_directories(dir);
}

}  // namespace

GenerateArtifacts run_generate(const GenerateOptions& opt) {
  require_dir(opt.out_dir);
  const auto synth = generate_synthetic(opt.synth);

  GenerateArtifacts art;
  art.train_file = opt.out_dir / "train.tsv";
  art.test_file = opt.out_dir / "test.tsv";
  art.meta_file = opt.out_dir / "generate_meta.json";
  art.train_triples = synth.train.size();

  std::string test_text;
  for (const auto& [user, items] : synth.test) {
    for (const auto& item : items) {
      test_text += user;
      test_text += '\t';
      test_text += item;
      test_text += '\n';
      ++art.test_pairs;
    }
  }

  Outputs out;
  write_triples_tsv(synth.train, Outputs::scratch_name(art.train_file));
  out.staged(art.train_file);
  out.text(art.test_file, test_text);

  const json meta{
      {"stage", "generate"},
      {"config",
       {{"users", opt.synth.users},
        {"items", opt.synth.items},
        {"brands", opt.synth.brands},
        {"categories", opt.synth.categories},
        {"words", opt.synth.words},
        {"min_purchases", opt.synth.min_purchases},
        {"max_purchases", opt.synth.max_purchases},
        {"activity_skew", opt.synth.activity_skew},
        {"head_skew", opt.synth.head_skew},
        {"head_fraction", opt.synth.head_fraction},
        {"popularity_skew", opt.synth.popularity_skew},
        {"words_per_item", opt.synth.words_per_item},
        {"mentions_per_user", opt.synth.mentions_per_user},
        {"seed", opt.synth.seed}}},
      {"inputs", json::object()},
      {"outputs",
       {{"train.tsv", file_fingerprint(Outputs::scratch_name(art.train_file))},
        {"test.tsv", text_fingerprint(test_text)},
        {"train_triples", art.train_triples},
        {"test_pairs", art.test_pairs}}}};
  out.json_file(art.meta_file, meta);
  out.publish();
  return art;
}

TrainArtifacts run_train(const TrainOptions& opt) {
  if (opt.out_file.empty()) throw Error("embedding output file not set");
  if (opt.out_file.has_parent_path()) {
    std::filesystem::create_directories(opt.out_file.parent_path());
  }
  const auto graph = load_graph(read_triples_file(opt.triples_file));
  TrainStats stats;
  const auto model = train_embeddings(graph, opt.train, &stats);

  TrainArtifacts art;
  art.embeddings_file = opt.out_file;
  art.meta_file = opt.out_file.parent_path() /
                  (opt.out_file.stem().string() + "_meta.json");
  art.epoch_loss = stats.epoch_loss;

  Outputs out;
  write_embeddings(model, graph, Outputs::scratch_name(art.embeddings_file));
  out.staged(art.embeddings_file);

  const json meta{
      {"stage", "train"},
      {"config",
       {{"dim", opt.train.dim},
        {"epochs", opt.train.epochs},
        {"learning_rate", opt.train.learning_rate},
        {"margin", opt.train.margin},
        {"seed", opt.train.seed},
        {"negative_retries", opt.train.negative_retries}}},
      {"inputs", {{"triples", file_fingerprint(opt.triples_file)}}},
      {"outputs",
       {{"embeddings", file_fingerprint(Outputs::scratch_name(art.embeddings_file))},
        {"epoch_loss", art.epoch_loss}}}};
  out.json_file(art.meta_file, meta);
  out.publish();
  return art;
}

PathsArtifacts run_paths(const PathsOptions& opt) {
  if (opt.out_file.empty()) throw Error("candidate output file not set");
  if (opt.out_file.has_parent_path()) {
    std::filesystem::create_directories(opt.out_file.parent_path());
  }
  const auto graph = load_graph(read_triples_file(opt.triples_file));
  const auto model = read_embeddings(graph, opt.embeddings_file);
  const auto sets = build_all_candidates(graph, model, opt.build, opt.workers);

  PathsArtifacts art;
  art.candidates_file = opt.out_file;
  art.meta_file = opt.out_file.parent_path() /
                  (opt.out_file.stem().string() + "_meta.json");
  art.users = sets.size();
  for (const auto& set : sets) {
    art.candidates += set.candidates.size();
    for (const auto& cand : set.candidates) {
      for (const auto& t : cand.tallies) art.paths += t.walks;
    }
  }

  Outputs out;
  write_candidates_jsonl(graph, sets, Outputs::scratch_name(art.candidates_file));
  out.staged(art.candidates_file);

  const json meta{
      {"stage", "paths"},
      {"config",
       {{"top_n", opt.build.top_n},
        {"max_len", opt.build.max_len},
        {"max_paths_per_item", opt.build.max_paths_per_item},
        {"purchase_relation", opt.build.purchase_relation},
        {"workers", opt.workers}}},
      {"inputs",
       {{"triples", file_fingerprint(opt.triples_file)},
        {"embeddings", file_fingerprint(opt.embeddings_file)}}},
      {"outputs",
       {{"candidates", file_fingerprint(Outputs::scratch_name(art.candidates_file))},
        {"users", art.users},
        {"candidate_count", art.candidates},
        {"path_count", art.paths}}}};
  out.json_file(art.meta_file, meta);
  out.publish();
  return art;
}

namespace {

json rerank_config_json(const RerankConfig& cfg, const std::string& purchase_relation,
                        const EpsilonPair& resolved, bool epsilon_from_baseline,
                        double lambda, double gamma) {
  return json{{"alpha", cfg.alpha},
              {"beta", cfg.beta},
              {"k", cfg.k},
              {"mode", mode_name(cfg.mode)},
              {"group_ratio", cfg.group_ratio},
              {"epsilon_quality", epsilon_json(resolved.quality)},
              {"epsilon_diversity", epsilon_json(resolved.diversity)},
              {"epsilon_from_baseline", epsilon_from_baseline},
              {"lambda", lambda},
              {"gamma", gamma},
              {"pseudo_count", cfg.pseudo_count},
              {"max_len", cfg.max_len},
              {"workers", cfg.workers},
              {"seed", cfg.seed},
              {"epsilon_shrink", cfg.epsilon_shrink},
              {"max_applied_moves", cfg.max_applied_moves},
              {"max_mu_doublings", cfg.max_mu_doublings},
              {"purchase_relation", purchase_relation}};
}

struct RerankMeta {
  RerankConfig cfg;  // lambda, gamma, epsilon resolved and pinned
  std::string purchase_relation;
  EpsilonPair resolved_epsilon;
};

RerankMeta parse_rerank_meta(const std::filesystem::path& file) {
  const json j = read_json_file(file, "rerank meta");
  RerankMeta meta;
  try {
    const auto& c = j.at("config");
    meta.cfg.alpha = c.at("alpha").get<double>();
    meta.cfg.beta = c.at("beta").get<double>();
    meta.cfg.k = c.at("k").get<std::size_t>();
    meta.cfg.mode = mode_from_name(c.at("mode").get<std::string>());
    meta.cfg.group_ratio = c.at("group_ratio").get<double>();
    meta.resolved_epsilon.quality = epsilon_from_json(c.at("epsilon_quality"));
    meta.resolved_epsilon.diversity = epsilon_from_json(c.at("epsilon_diversity"));
    meta.cfg.epsilon = meta.resolved_epsilon;
    meta.cfg.lambda = c.at("lambda").get<double>();
    meta.cfg.gamma = c.at("gamma").get<double>();
    meta.cfg.pseudo_count = c.at("pseudo_count").get<double>();
    meta.cfg.max_len = c.at("max_len").get<std::size_t>();
    meta.cfg.workers = c.at("workers").get<std::size_t>();
    meta.cfg.seed = c.at("seed").get<std::uint64_t>();
    meta.cfg.epsilon_shrink = c.at("epsilon_shrink").get<double>();
    meta.cfg.max_applied_moves = c.at("max_applied_moves").get<std::size_t>();
    meta.cfg.max_mu_doublings = c.at("max_mu_doublings").get<std::size_t>();
    meta.purchase_relation = c.at("purchase_relation").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(file.string() + ": " + e.what());
  }
  return meta;
}

std::string trace_csv_text(const std::vector<TraceRow>& trace) {
  std::string text = "iter,objective,violation_1,violation_2,accepted_move\n";
  for (const auto& row : trace) {
    text += std::to_string(row.iter);
    text += ',';
    text += num(row.objective);
    text += ',';
    text += num(row.violation_quality);
    text += ',';
    text += num(row.violation_diversity);
    text += ',';
    text += row.accepted_move ? '1' : '0';
    text += '\n';
  }
  return text;
}

}  // namespace

RerankArtifacts run_rerank(const RerankOptions& opt) {
  require_dir(opt.out_dir);
  const auto data = load_dataset(opt.triples_file, {}, opt.purchase_relation);
  const auto sets = read_candidates_jsonl(data.graph, opt.candidates_file);
  const auto model = build_rerank_model(data, sets, opt.rerank);
  const auto inst = make_solver_instance(model, opt.rerank.k, opt.rerank.mode);

  const auto base_sel = baseline_selection(inst);
  const auto base_vals = measure_selection(inst, base_sel);
  const bool eps_from_baseline = !opt.rerank.epsilon.has_value();
  const EpsilonPair resolved =
      eps_from_baseline ? EpsilonPair{base_vals.quality, base_vals.diversity}
                        : *opt.rerank.epsilon;

  SolverConfig solver_cfg;
  solver_cfg.epsilon = resolved;
  solver_cfg.epsilon_shrink = opt.rerank.epsilon_shrink;
  solver_cfg.seed = opt.rerank.seed;
  solver_cfg.max_mu_doublings = opt.rerank.max_mu_doublings;
  solver_cfg.max_applied_moves = opt.rerank.max_applied_moves;
  solver_cfg.keep_trace = opt.rerank.keep_trace;
  const auto result = solve_constrained_selection(inst, solver_cfg);

  RerankArtifacts art;
  art.ranking_file = opt.out_dir / "ranking.jsonl";
  art.meta_file = opt.out_dir / "rerank_meta.json";
  art.trace_file = opt.out_dir / "trace.csv";
  art.feasible = result.feasible;
  art.objective = result.objective;
  art.lambda = model.lambda;
  art.gamma = model.gamma;
  art.resolved_epsilon = resolved;
  art.baseline = base_vals;
  art.reranked = measure_selection(inst, result.selection);
  art.applied_moves = result.applied_moves;

  std::string ranking_text;
  for (std::size_t p = 0; p < model.pools.size(); ++p) {
    const auto& pool = model.pools[p];
    const auto ranked =
        rank_selected(pool, result.selection[p], opt.rerank.beta, model.gamma);
    json items = json::array();
    for (const auto& r : ranked) {
      items.push_back(json{{"item", data.graph.entity_name(r.item)},
                           {"rec", r.rec},
                           {"phi", r.phi},
                           {"blend", r.blend}});
    }
    const json row{{"schema", 1},
                   {"user", data.graph.entity_name(pool.user)},
                   {"ranking", items}};
    ranking_text += row.dump();
    ranking_text += '\n';
  }

  Outputs out;
  out.text(art.ranking_file, ranking_text);
  out.text(art.trace_file, trace_csv_text(result.trace));

  json meta{{"stage", "rerank"},
            {"config",
             rerank_config_json(opt.rerank, opt.purchase_relation, resolved,
                                eps_from_baseline, model.lambda, model.gamma)},
            {"inputs",
             {{"triples", file_fingerprint(opt.triples_file)},
              {"candidates", file_fingerprint(opt.candidates_file)}}},
            {"results",
             {{"feasible", result.feasible},
              {"objective", result.objective},
              {"applied_moves", result.applied_moves},
              {"mu_doublings", result.mu_doublings},
              {"vocabulary_size", model.vocabulary_size},
              {"baseline",
               {{"quality", base_vals.quality},
                {"diversity", base_vals.diversity},
                {"objective", base_vals.objective}}},
              {"reranked",
               {{"quality", art.reranked.quality},
                {"diversity", art.reranked.diversity},
                {"objective", art.reranked.objective}}}}}};
  out.json_file(art.meta_file, meta);
  out.publish();
  return art;
}

namespace {

std::vector<RankedList> read_ranking_jsonl(const KnowledgeGraph& g,
                                           const RerankModel& model,
                                           const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read ranking file: " + file.string());
  std::map<EntityId, std::size_t> pool_of;
  for (std::size_t p = 0; p < model.pools.size(); ++p) {
    pool_of[model.pools[p].user] = p;
  }
  std::vector<RankedList> lists;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto at = [&](const std::string& msg) {
      return Error(file.string() + ":" + std::to_string(line_no) + ": " + msg);
    };
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception& e) {
      throw at(e.what());
    }
    try {
      if (row.at("schema").get<int>() != 1) {
        throw at("unsupported ranking schema, expected 1");
      }
      RankedList list;
      const auto user_name = row.at("user").get<std::string>();
      const auto user = g.find_entity(user_name);
      if (!user) throw at("unknown user `" + user_name + "`");
      list.user = *user;
      const auto pool_it = pool_of.find(*user);
      if (pool_it == pool_of.end()) {
        throw at("user `" + user_name + "` has no candidate pool");
      }
      const auto& pool = model.pools[pool_it->second];
      std::map<EntityId, std::uint32_t> index_of;
      for (std::uint32_t i = 0; i < pool.cands.size(); ++i) {
        index_of[pool.cands[i].item] = i;
      }
      for (const auto& item : row.at("ranking")) {
        const auto item_name = item.at("item").get<std::string>();
        const auto entity = g.find_entity(item_name);
        if (!entity) throw at("unknown item `" + item_name + "`");
        const auto idx_it = index_of.find(*entity);
        if (idx_it == index_of.end()) {
          throw at("item `" + item_name + "` is not a candidate of `" + user_name + "`");
        }
        list.order.push_back(idx_it->second);
      }
      lists.push_back(std::move(list));
    } catch (const json::exception& e) {
      throw at(e.what());
    }
  }
  return lists;
}

}  // namespace

EvaluateArtifacts run_evaluate(const EvaluateOptions& opt) {
  require_dir(opt.out_dir);
  const auto meta_file = opt.rerank_dir / "rerank_meta.json";
  const auto ranking_file = opt.rerank_dir / "ranking.jsonl";
  if (!std::filesystem::exists(meta_file) || !std::filesystem::exists(ranking_file)) {
    throw Error("no reranked output under " + opt.rerank_dir.string() +
                "; run the rerank stage first");
  }
  const auto meta = parse_rerank_meta(meta_file);
  const auto data = load_dataset(opt.triples_file, opt.test_file, meta.purchase_relation);
  const auto sets = read_candidates_jsonl(data.graph, opt.candidates_file);
  const auto model = build_rerank_model(data, sets, meta.cfg);
  const auto lists = read_ranking_jsonl(data.graph, model, ranking_file);

  auto evaluation = evaluate_rankings(data, model, meta.cfg.k, lists);
  evaluation.config.alpha = meta.cfg.alpha;
  evaluation.config.beta = meta.cfg.beta;
  evaluation.config.k = meta.cfg.k;
  evaluation.config.mode = mode_name(meta.cfg.mode);
  evaluation.config.epsilon_quality = meta.resolved_epsilon.quality;
  evaluation.config.epsilon_diversity = meta.resolved_epsilon.diversity;
  evaluation.config.seed = meta.cfg.seed;

  EvaluateArtifacts art;
  art.json_file = opt.out_dir / "evaluation.json";
  art.csv_file = opt.out_dir / "evaluation.csv";
  art.evaluation = evaluation;

  json inputs{{"triples", file_fingerprint(opt.triples_file)},
              {"candidates", file_fingerprint(opt.candidates_file)},
              {"ranking", file_fingerprint(ranking_file)},
              {"rerank_meta", file_fingerprint(meta_file)}};
  if (!opt.test_file.empty()) inputs["test"] = file_fingerprint(opt.test_file);
  const json payload{{"stage", "evaluate"},
                     {"inputs", inputs},
                     {"evaluation", json::parse(evaluation_to_json_text(evaluation))}};
  Outputs out;
  out.text(art.json_file, payload.dump(2) + "\n");
  write_metrics_csv(evaluation, Outputs::scratch_name(art.csv_file));
  out.staged(art.csv_file);
  out.publish();
  return art;
}

SweepArtifacts run_sweep(const SweepOptions& opt) {
  require_dir(opt.out_dir);
  const auto data = load_dataset(opt.triples_file, opt.test_file, opt.purchase_relation);
  const auto sets = read_candidates_jsonl(data.graph, opt.candidates_file);

  const std::vector<double> alphas =
      opt.alphas.empty() ? std::vector<double>{opt.rerank.alpha} : opt.alphas;
  const std::vector<double> betas =
      opt.betas.empty() ? std::vector<double>{opt.rerank.beta} : opt.betas;

  std::string csv =
      "alpha,beta,feasible,objective,ndcg,f1,proxy_quality,mean_sid,sid_inactive,"
      "sid_active,gru,gedu,iru,iedu,coverage\n";
  SweepArtifacts art;
  art.csv_file = opt.out_dir / "sweep.csv";

  for (const double alpha : alphas) {
    RerankConfig cfg = opt.rerank;
    cfg.alpha = alpha;
    const auto model = build_rerank_model(data, sets, cfg);
    const auto inst = make_solver_instance(model, cfg.k, cfg.mode);
    const auto base_sel = baseline_selection(inst);
    const auto base_vals = measure_selection(inst, base_sel);
    const EpsilonPair resolved =
        cfg.epsilon ? *cfg.epsilon : EpsilonPair{base_vals.quality, base_vals.diversity};
    SolverConfig solver_cfg;
    solver_cfg.epsilon = resolved;
    solver_cfg.epsilon_shrink = cfg.epsilon_shrink;
    solver_cfg.seed = cfg.seed;
    solver_cfg.max_mu_doublings = cfg.max_mu_doublings;
    solver_cfg.max_applied_moves = cfg.max_applied_moves;
    solver_cfg.keep_trace = false;
    const auto result = solve_constrained_selection(inst, solver_cfg);

    // The selection is shared across beta; beta only reorders what is shown.
    for (const double beta : betas) {
      std::vector<RankedList> lists;
      lists.reserve(model.pools.size());
      for (std::size_t p = 0; p < model.pools.size(); ++p) {
        const auto ranked =
            rank_selected(model.pools[p], result.selection[p], beta, model.gamma);
        RankedList list;
        list.user = model.pools[p].user;
        for (const auto& r : ranked) list.order.push_back(r.pool_index);
        lists.push_back(std::move(list));
      }
      const auto eval = evaluate_rankings(data, model, cfg.k, lists);
      const auto& v = eval.reranked;
      csv += num(alpha);
      csv += ',';
      csv += num(beta);
      csv += ',';
      csv += result.feasible ? '1' : '0';
      csv += ',';
      csv += num(v.objective);
      for (const double x : {v.ndcg.overall, v.f1.overall, v.proxy.overall,
                             v.sid.overall, v.sid.inactive, v.sid.active, v.ndcg.gap,
                             v.f.gap, v.iru, v.iedu, v.coverage}) {
        csv += ',';
        csv += num(x);
      }
      csv += '\n';
      ++art.rows;
    }
  }

  Outputs out;
  out.text(art.csv_file, csv);
  json inputs{{"triples", file_fingerprint(opt.triples_file)},
              {"candidates", file_fingerprint(opt.candidates_file)}};
  if (!opt.test_file.empty()) inputs["test"] = file_fingerprint(opt.test_file);
  const json meta{{"stage", "sweep"},
                  {"config",
                   {{"alphas", alphas},
                    {"betas", betas},
                    {"k", opt.rerank.k},
                    {"mode", mode_name(opt.rerank.mode)},
                    {"group_ratio", opt.rerank.group_ratio},
                    {"seed", opt.rerank.seed},
                    {"workers", opt.rerank.workers},
                    {"purchase_relation", opt.purchase_relation}}},
                  {"inputs", inputs},
                  {"outputs",
                   {{"sweep.csv", text_fingerprint(csv)}, {"rows", art.rows}}}};
  out.json_file(opt.out_dir / "sweep_meta.json", meta);
  out.publish();
  return art;
}

ReportArtifacts run_report(const ReportOptions& opt) {
  require_dir(opt.out_dir);
  json j = read_json_file(opt.evaluation_json, "evaluation");
  if (j.contains("evaluation")) j = j.at("evaluation");
  const auto eval = evaluation_from_json_text(j.dump());

  ReportArtifacts art;
  art.table_file = opt.out_dir / "report.txt";
  art.sid_csv = opt.out_dir / "sid_distribution.csv";
  art.lorenz_quality_csv = opt.out_dir / "lorenz_quality.csv";
  art.lorenz_explanation_csv = opt.out_dir / "lorenz_explanation.csv";
  art.table = render_report_table(eval);

  Outputs out;
  out.text(art.table_file, art.table);
  write_sid_distribution_csv(eval, Outputs::scratch_name(art.sid_csv));
  out.staged(art.sid_csv);
  write_lorenz_csv(eval, false, Outputs::scratch_name(art.lorenz_quality_csv));
  out.staged(art.lorenz_quality_csv);
  write_lorenz_csv(eval, true, Outputs::scratch_name(art.lorenz_explanation_csv));
  out.staged(art.lorenz_explanation_csv);

  const json meta{
      {"stage", "report"},
      {"inputs", {{"evaluation", file_fingerprint(opt.evaluation_json)}}},
      {"outputs",
       {{"report.txt", text_fingerprint(art.table)},
        {"sid_distribution.csv",
         file_fingerprint(Outputs::scratch_name(art.sid_csv))},
        {"lorenz_quality.csv",
         file_fingerprint(Outputs::scratch_name(art.lorenz_quality_csv))},
        {"lorenz_explanation.csv",
         file_fingerprint(Outputs::scratch_name(art.lorenz_explanation_csv))}}}};
  out.json_file(opt.out_dir / "report_meta.json", meta);
  out.publish();
  return art;
}

}  // namespace pathfair::pipeline
