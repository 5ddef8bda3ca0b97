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

// Batch front end: generate, train, paths, rerank, evaluate, sweep, report.
// Every subcommand accepts --config FILE with key=value lines; explicit
// flags win over the file.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pathfair/error.hpp"
#include "pathfair/pipeline.hpp"
#include "pathfair/solver.hpp"

namespace {

using namespace pathfair;
namespace pl = pathfair::pipeline;

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find(',', pos);
    const auto part = text.substr(pos, next == std::string::npos ? next : next - pos);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(std::string(what) + ": `" + part + "` is not a number");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return values;
}

// "baseline" keeps the optional empty; otherwise one shared value or a
// quality,diversity pair.
std::optional<EpsilonPair> parse_epsilon(const std::string& text) {
  if (text == "baseline") return std::nullopt;
  const auto values = parse_double_list(text, "--epsilon");
  if (values.size() == 1) return EpsilonPair{values[0], values[0]};
  if (values.size() == 2) return EpsilonPair{values[0], values[1]};
  throw Error("--epsilon expects `baseline`, one value, or quality,diversity");
}

ConstraintMode parse_mode(const std::string& text) {
  if (text == "group") return ConstraintMode::Group;
  if (text == "individual") return ConstraintMode::Individual;
  throw Error("--constraint-mode expects group or individual");
}

void add_config_option(CLI::App* cmd) {
  cmd->set_config("--config", "", "key=value file; explicit flags override it");
}

int run(int argc, char** argv) {
  CLI::App app{"fairness-constrained re-ranking of path-explained recommendations"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "write a synthetic dataset");
  add_config_option(generate);
  pl::GenerateOptions gen;
  generate->add_option("--users", gen.synth.users, "user count");
  generate->add_option("--items", gen.synth.items, "item count");
  generate->add_option("--brands", gen.synth.brands, "brand count");
  generate->add_option("--categories", gen.synth.categories, "category count");
  generate->add_option("--words", gen.synth.words, "vocabulary size");
  generate->add_option("--min-purchases", gen.synth.min_purchases,
                       "training purchases floor per user");
  generate->add_option("--max-purchases", gen.synth.max_purchases,
                       "training purchases ceiling per user");
  generate->add_option("--activity-skew", gen.synth.activity_skew,
                       "user activity power-law exponent");
  generate->add_option("--head-skew", gen.synth.head_skew,
                       "extra activity exponent for the most active users");
  generate->add_option("--head-fraction", gen.synth.head_fraction,
                       "fraction of users boosted by the head skew");
  generate->add_option("--popularity-skew", gen.synth.popularity_skew,
                       "item popularity Zipf exponent");
  generate->add_option("--words-per-item", gen.synth.words_per_item);
  generate->add_option("--mentions-per-user", gen.synth.mentions_per_user);
  generate->add_option("--seed", gen.synth.seed, "generator seed");
  generate->add_option("--out", gen.out_dir, "output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "train graph embeddings");
  add_config_option(train);
  pl::TrainOptions tr;
  train->add_option("--triples", tr.triples_file, "training triples TSV")->required();
  train->add_option("--dim", tr.train.dim, "embedding dimension");
  train->add_option("--epochs", tr.train.epochs);
  train->add_option("--learning-rate", tr.train.learning_rate);
  train->add_option("--margin", tr.train.margin);
  train->add_option("--seed", tr.train.seed);
  train->add_option("--out", tr.out_file, "embeddings TSV")->required();

  // paths
  auto* paths = app.add_subcommand("paths", "enumerate and score candidate walks");
  add_config_option(paths);
  pl::PathsOptions pa;
  paths->add_option("--triples", pa.triples_file, "training triples TSV")->required();
  paths->add_option("--embeddings", pa.embeddings_file, "embeddings TSV")->required();
  paths->add_option("--top-n", pa.build.top_n, "candidates kept per user");
  paths->add_option("--max-len", pa.build.max_len, "walk length cap (at most 3)");
  paths->add_option("--max-paths", pa.build.max_paths_per_item,
                    "walks kept per (user, item)");
  paths->add_option("--purchase-relation", pa.build.purchase_relation);
  paths->add_option("--workers", pa.workers, "worker threads");
  paths->add_option("--out", pa.out_file, "candidates JSONL")->required();

  // rerank
  auto* rerank = app.add_subcommand("rerank", "fairness-constrained selection");
  add_config_option(rerank);
  pl::RerankOptions rr;
  std::string rr_epsilon = "baseline";
  std::string rr_mode = "group";
  double rr_lambda = 0.0, rr_gamma = 0.0;
  bool rr_no_trace = false;
  rerank->add_option("--triples", rr.triples_file, "training triples TSV")->required();
  rerank->add_option("--candidates", rr.candidates_file, "candidates JSONL")->required();
  rerank->add_option("--alpha", rr.rerank.alpha, "blend of debiased walk score vs SID");
  rerank->add_option("--beta", rr.rerank.beta, "presentation blend toward fairness");
  rerank->add_option("--k", rr.rerank.k, "items selected per user");
  rerank->add_option("--group-ratio", rr.rerank.group_ratio, "active-group share");
  auto* rr_mode_opt = rerank->add_option("--constraint-mode", rr_mode,
                                         "group or individual");
  auto* rr_eps_opt = rerank->add_option(
      "--epsilon", rr_epsilon, "baseline, one bound, or quality,diversity");
  auto* rr_lambda_opt = rerank->add_option("--lambda", rr_lambda,
                                           "SID scale (default: auto)");
  auto* rr_gamma_opt = rerank->add_option("--gamma", rr_gamma,
                                          "fairness-score scale (default: auto)");
  rerank->add_option("--pseudo-count", rr.rerank.pseudo_count,
                     "pattern distribution smoothing");
  rerank->add_option("--max-len", rr.rerank.max_len, "walk length cap (at most 3)");
  rerank->add_option("--epsilon-shrink", rr.rerank.epsilon_shrink,
                     "inner margin for the penalty search");
  rerank->add_option("--seed", rr.rerank.seed);
  rerank->add_option("--workers", rr.rerank.workers, "worker threads");
  rerank->add_option("--purchase-relation", rr.purchase_relation);
  rerank->add_flag("--no-trace", rr_no_trace, "skip trace.csv rows");
  rerank->add_option("--out", rr.out_dir, "output directory")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score rankings against held-out data");
  add_config_option(evaluate);
  pl::EvaluateOptions ev;
  evaluate->add_option("--triples", ev.triples_file, "training triples TSV")->required();
  evaluate->add_option("--test", ev.test_file, "held-out `user<TAB>item` pairs");
  evaluate->add_option("--candidates", ev.candidates_file, "candidates JSONL")
      ->required();
  evaluate->add_option("--rerank-dir", ev.rerank_dir, "rerank output directory")
      ->required();
  evaluate->add_option("--out", ev.out_dir, "output directory")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid of reranks over alpha and beta");
  add_config_option(sweep);
  pl::SweepOptions sw;
  std::string sw_alphas, sw_betas;
  std::string sw_epsilon = "baseline";
  std::string sw_mode = "group";
  sweep->add_option("--triples", sw.triples_file, "training triples TSV")->required();
  sweep->add_option("--test", sw.test_file, "held-out `user<TAB>item` pairs");
  sweep->add_option("--candidates", sw.candidates_file, "candidates JSONL")->required();
  auto* sw_alpha_opt =
      sweep->add_option("--alpha", sw_alphas, "comma-separated alpha values");
  auto* sw_beta_opt = sweep->add_option("--beta", sw_betas, "comma-separated beta values");
  sweep->add_option("--k", sw.rerank.k, "items selected per user");
  sweep->add_option("--group-ratio", sw.rerank.group_ratio);
  auto* sw_mode_opt = sweep->add_option("--constraint-mode", sw_mode);
  auto* sw_eps_opt = sweep->add_option("--epsilon", sw_epsilon);
  sweep->add_option("--pseudo-count", sw.rerank.pseudo_count);
  sweep->add_option("--max-len", sw.rerank.max_len);
  sweep->add_option("--seed", sw.rerank.seed);
  sweep->add_option("--workers", sw.rerank.workers);
  sweep->add_option("--purchase-relation", sw.purchase_relation);
  sweep->add_option("--out", sw.out_dir, "output directory")->required();

  // report
  auto* report = app.add_subcommand("report", "render tables and plot data");
  add_config_option(report);
  pl::ReportOptions rep;
  report->add_option("--evaluation", rep.evaluation_json, "evaluation.json")->required();
  report->add_option("--out", rep.out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) {
    const auto art = pl::run_generate(gen);
    std::printf("wrote %zu training triples to %s\n", art.train_triples,
                art.train_file.c_str());
    std::printf("wrote %zu test pairs to %s\n", art.test_pairs, art.test_file.c_str());
  } else if (train->parsed()) {
    const auto art = pl::run_train(tr);
    std::printf("wrote embeddings to %s (%zu epochs, final loss %.6f)\n",
                art.embeddings_file.c_str(), art.epoch_loss.size(),
                art.epoch_loss.empty() ? 0.0 : art.epoch_loss.back());
  } else if (paths->parsed()) {
    const auto art = pl::run_paths(pa);
    std::printf("wrote %zu candidates (%zu walks) for %zu users to %s\n", art.candidates,
                art.paths, art.users, art.candidates_file.c_str());
  } else if (rerank->parsed()) {
    if (*rr_mode_opt) rr.rerank.mode = parse_mode(rr_mode);
    if (*rr_eps_opt) rr.rerank.epsilon = parse_epsilon(rr_epsilon);
    if (*rr_lambda_opt) rr.rerank.lambda = rr_lambda;
    if (*rr_gamma_opt) rr.rerank.gamma = rr_gamma;
    rr.rerank.keep_trace = !rr_no_trace;
    const auto art = pl::run_rerank(rr);
    std::printf("%s selection, objective %.6f (baseline %.6f)\n",
                art.feasible ? "feasible" : "infeasible", art.objective,
                art.baseline.objective);
    std::printf("disparities quality %.6f -> %.6f, diversity %.6f -> %.6f\n",
                art.baseline.quality, art.reranked.quality, art.baseline.diversity,
                art.reranked.diversity);
    std::printf("wrote %s\n", art.ranking_file.c_str());
  } else if (evaluate->parsed()) {
    const auto art = pl::run_evaluate(ev);
    std::printf("wrote %s\n", art.json_file.c_str());
    std::printf("ndcg %.5f -> %.5f, gedu %.6f -> %.6f\n",
                art.evaluation.baseline.ndcg.overall, art.evaluation.reranked.ndcg.overall,
                art.evaluation.baseline.f.gap, art.evaluation.reranked.f.gap);
  } else if (sweep->parsed()) {
    if (*sw_mode_opt) sw.rerank.mode = parse_mode(sw_mode);
    if (*sw_eps_opt) sw.rerank.epsilon = parse_epsilon(sw_epsilon);
    if (*sw_alpha_opt) sw.alphas = parse_double_list(sw_alphas, "--alpha");
    if (*sw_beta_opt) sw.betas = parse_double_list(sw_betas, "--beta");
    const auto art = pl::run_sweep(sw);
    std::printf("wrote %zu sweep rows to %s\n", art.rows, art.csv_file.c_str());
  } else if (report->parsed()) {
    const auto art = pl::run_report(rep);
    std::fputs(art.table.c_str(), stdout);
    std::printf("wrote %s\n", art.table_file.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
