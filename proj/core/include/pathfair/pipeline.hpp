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

#ifndef PATHFAIR_PIPELINE_HPP_
#define PATHFAIR_PIPELINE_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "pathfair/candidates.hpp"
#include "pathfair/dataset.hpp"
#include "pathfair/embedding.hpp"
#include "pathfair/report.hpp"
#include "pathfair/rerank.hpp"
#include "pathfair/synthetic.hpp"

// Batch stages behind the command-line surface. Every stage writes its
// artifacts plus a meta JSON embedding the resolved configuration and the
// fingerprints of all inputs, and fails without leaving partial outputs.
namespace pathfair::pipeline {

struct GenerateOptions {
  SyntheticConfig synth;
  std::filesystem::path out_dir;
};
struct GenerateArtifacts {
  std::filesystem::path train_file;
  std::filesystem::path test_file;
  std::filesystem::path meta_file;
  std::size_t train_triples = 0;
  std::size_t test_pairs = 0;
};
GenerateArtifacts run_generate(const GenerateOptions& opt);

struct TrainOptions {
  std::filesystem::path triples_file;
  TrainConfig train;
  std::filesystem::path out_file;  // embeddings TSV, meta written beside it
};
struct TrainArtifacts {
  std::filesystem::path embeddings_file;
  std::filesystem::path meta_file;
  std::vector<double> epoch_loss;
};
TrainArtifacts run_train(const TrainOptions& opt);

struct PathsOptions {
  std::filesystem::path triples_file;
  std::filesystem::path embeddings_file;
  std::filesystem::path out_file;  // candidates JSONL
  CandidateBuildConfig build;
  std::size_t workers = 1;
};
struct PathsArtifacts {
  std::filesystem::path candidates_file;
  std::filesystem::path meta_file;
  std::size_t users = 0;
  std::size_t candidates = 0;
  std::size_t paths = 0;
};
PathsArtifacts run_paths(const PathsOptions& opt);

struct RerankOptions {
  std::filesystem::path triples_file;
  std::filesystem::path candidates_file;
  std::filesystem::path out_dir;
  RerankConfig rerank;
  std::string purchase_relation = "purchase";
};
struct RerankArtifacts {
  std::filesystem::path ranking_file;  // ranking.jsonl
  std::filesystem::path meta_file;     // rerank_meta.json
  std::filesystem::path trace_file;    // trace.csv
  bool feasible = false;
  double objective = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  EpsilonPair resolved_epsilon;
  DisparityValues baseline;
  DisparityValues reranked;
  std::size_t applied_moves = 0;
};
RerankArtifacts run_rerank(const RerankOptions& opt);

struct EvaluateOptions {
  std::filesystem::path triples_file;
  std::filesystem::path test_file;  // may be empty: zero coverage
  std::filesystem::path candidates_file;
  std::filesystem::path rerank_dir;  // artifacts of run_rerank
  std::filesystem::path out_dir;
};
struct EvaluateArtifacts {
  std::filesystem::path json_file;  // evaluation.json
  std::filesystem::path csv_file;   // evaluation.csv, one row per variant
  Evaluation evaluation;
};
EvaluateArtifacts run_evaluate(const EvaluateOptions& opt);

struct SweepOptions {
  std::filesystem::path triples_file;
  std::filesystem::path test_file;
  std::filesystem::path candidates_file;
  std::filesystem::path out_dir;
  RerankConfig rerank;  // template cell
  std::string purchase_relation = "purchase";
  std::vector<double> alphas;  // empty: {rerank.alpha}
  std::vector<double> betas;   // empty: {rerank.beta}
};
struct SweepArtifacts {
  std::filesystem::path csv_file;  // sweep.csv, one row per (alpha, beta)
  std::size_t rows = 0;
};
SweepArtifacts run_sweep(const SweepOptions& opt);

struct ReportOptions {
  std::filesystem::path evaluation_json;
  std::filesystem::path out_dir;
};
struct ReportArtifacts {
  std::filesystem::path table_file;  // report.txt
  std::filesystem::path sid_csv;
  std::filesystem::path lorenz_quality_csv;
  std::filesystem::path lorenz_explanation_csv;
  std::string table;
};
ReportArtifacts run_report(const ReportOptions& opt);

}  // namespace pathfair::pipeline

#endif  // PATHFAIR_PIPELINE_HPP_
