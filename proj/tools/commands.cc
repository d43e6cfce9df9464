// Copyright 2026 The groundvec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.h"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "groundvec/clustering.h"
#include "groundvec/corpus.h"
#include "groundvec/embedding.h"
#include "groundvec/error.h"
#include "groundvec/evaluation.h"
#include "groundvec/grounding.h"
#include "groundvec/pretrain.h"

namespace groundvec::cli {
namespace {

namespace fs = std::filesystem;

constexpr Role kRoles[] = {Role::kPrimary, Role::kRelation, Role::kSecondary};

struct PretrainArgs {
  std::string corpus;
  std::string out;
  std::string lemmas;
  PretrainConfig config;
};

struct ClusterArgs {
  std::string features;
  std::string out;
  std::string labels;
  std::optional<double> pca;
  KMeansOptions kmeans;
};

struct FinetuneArgs {
  std::string embeddings;
  std::string features;
  std::string text;
  std::string cluster_model;
  std::string out;
  std::string loss_log;
  std::string lemmas;
  std::optional<std::size_t> clusters;
  std::optional<std::size_t> window_width;
  std::string strategy = "words";
  std::string mode = "shared";
  double lr = 0.01;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  bool no_shuffle = false;
};

struct EvalCsArgs {
  std::string train;
  std::string test;
  std::string embeddings;
  std::string baseline;
  std::string validation;
  std::string scores;
  std::string report;
  std::string lemmas;
  std::string mode = "shared";
  std::optional<double> delta;
  bool no_normalize = false;
};

struct EvalVpArgs {
  std::string pairs;
  std::string train;
  std::string embeddings;
  std::string scores;
  std::string report;
  std::string lemmas;
  std::uint64_t seed = 1;
};

struct RetrieveArgs {
  std::string queries;
  std::string database;
  std::string embeddings;
  std::string ranks;
  std::string report;
  std::string lemmas;
  std::string mode = "shared";
};

struct CooccurrenceArgs {
  std::string features;
  std::string text;
  std::string cluster_model;
  std::string out;
  std::string lemmas;
  std::size_t relation_field = 1;
};

void RequireWritable(const std::string& path, const char* flag) {
  if (path.empty()) return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw UsageError(std::string(flag) + ": directory " + parent.string() +
                     " does not exist");
  }
}

std::optional<LemmaTable> MaybeLemmas(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return LemmaTable::Load(path);
}

const LemmaTable* Ptr(const std::optional<LemmaTable>& table) {
  return table ? &*table : nullptr;
}

RoleMode ParseMode(const std::string& text) {
  try {
    return ParseRoleMode(text);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::string RolePath(const std::string& base, Role role) {
  return base + "." + RoleSuffix(role);
}

// Shared mode reads `base`; separate mode reads base.P, base.R and base.S.
RoleModels LoadRoleModels(const std::string& base, RoleMode mode) {
  if (mode == RoleMode::kShared) {
    return RoleModels::Shared(std::make_shared<const EmbeddingModel>(LoadText(base)));
  }
  std::array<std::shared_ptr<const EmbeddingModel>, 3> models;
  for (Role role : kRoles) {
    models[static_cast<std::size_t>(role)] =
        std::make_shared<const EmbeddingModel>(LoadText(RolePath(base, role)));
  }
  return RoleModels::Separate(models[0], models[1], models[2]);
}

void RequireRoleFiles(const std::string& base, RoleMode mode, const char* flag) {
  if (mode == RoleMode::kShared) {
    if (!fs::is_regular_file(base)) {
      throw UsageError(std::string(flag) + ": " + base + " does not exist");
    }
    return;
  }
  for (Role role : kRoles) {
    const auto path = RolePath(base, role);
    if (!fs::is_regular_file(path)) {
      throw UsageError(std::string(flag) + ": " + path + " does not exist");
    }
  }
}

std::string FormatReal(double value) {
  std::ostringstream s;
  s << std::setprecision(10) << value;
  return s.str();
}

void Emit(const std::string& report, const std::string& path, std::ostream& out) {
  out << report;
  if (path.empty()) return;
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("cannot write " + path);
  file << report;
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("cannot write " + path);
  file << contents;
  if (!file) throw Error("write failed for " + path);
}

void RunPretrain(const PretrainArgs& args, std::ostream& out) {
  RequireWritable(args.out, "--out");
  try {
    args.config.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto lemmas = MaybeLemmas(args.lemmas);
  const auto documents = LoadCorpus(args.corpus, Ptr(lemmas));
  const EmbeddingModel model = TrainCbow(documents, args.config);
  SaveText(model, args.out);
  out << "words\t" << model.vocab_size() << "\nhidden\t" << model.hidden_size()
      << '\n';
}

void RunCluster(const ClusterArgs& args, std::ostream& out) {
  RequireWritable(args.out, "--out");
  RequireWritable(args.labels, "--labels");
  if (args.pca && !(*args.pca > 0.0 && *args.pca <= 1.0)) {
    throw UsageError("--pca: retention must be in (0, 1]");
  }
  const RowMatrix features = LoadFeatures(args.features);
  const KMeansResult result = FitClusters(features, args.kmeans, args.pca);
  SaveClusterModel(result.model, args.out);
  if (!args.labels.empty()) {
    std::ostringstream labels;
    for (std::size_t i = 0; i < result.labels.size(); ++i) {
      labels << i << '\t' << result.labels[i] << '\n';
    }
    WriteFile(args.labels, labels.str());
  }
  out << "clusters\t" << result.model.num_clusters() << "\ndim\t"
      << result.model.centroids.cols() << "\nwcss\t" << FormatReal(result.wcss)
      << '\n';
}

WindowStrategy ResolveStrategy(const FinetuneArgs& args) {
  WindowStrategy strategy;
  try {
    strategy = WindowStrategy::Parse(args.strategy);
  } catch (const Error& e) {
    throw UsageError(std::string("--strategy: ") + e.what());
  }
  if (args.window_width) {
    if (strategy.kind != WindowStrategy::Kind::kWinds) {
      throw UsageError("--window-width is only valid with --strategy winds");
    }
    if (args.strategy != "winds" && strategy.width != *args.window_width) {
      throw UsageError("--window-width conflicts with the width in --strategy");
    }
    if (*args.window_width < 1) throw UsageError("--window-width must be >= 1");
    strategy.width = *args.window_width;
  }
  return strategy;
}

void RunFinetune(const FinetuneArgs& args, std::ostream& out) {
  const WindowStrategy strategy = ResolveStrategy(args);
  const RoleMode mode = ParseMode(args.mode);
  RequireWritable(args.out, "--out");
  RequireWritable(args.loss_log, "--loss-log");
  if (args.epochs < 1) throw UsageError("--epochs must be at least 1");
  if (!(args.lr >= 0.0)) throw UsageError("--lr must be non-negative");

  const ClusterModel clusters = LoadClusterModel(args.cluster_model);
  if (args.clusters && *args.clusters != clusters.num_clusters()) {
    throw Error("--clusters " + std::to_string(*args.clusters) +
                " does not match the " + std::to_string(clusters.num_clusters()) +
                " clusters in " + args.cluster_model);
  }
  const auto lemmas = MaybeLemmas(args.lemmas);
  const auto pairs = LoadMultimodal(args.features, args.text, Ptr(lemmas));
  if (!pairs.empty() && pairs.front().features.size() != clusters.input_dim()) {
    throw Error("feature dimension " + std::to_string(pairs.front().features.size()) +
                " does not match the cluster model's " +
                std::to_string(clusters.input_dim()));
  }
  const EmbeddingModel initial = LoadText(args.embeddings);

  GroundingConfig config;
  config.learning_rate = args.lr;
  config.epochs = args.epochs;
  config.strategy = strategy;
  config.num_classes = clusters.num_clusters();
  config.seed = args.seed;
  config.shuffle = !args.no_shuffle;

  const auto train = [&](std::span<const MultimodalPair> subset,
                         const std::string& out_path, const std::string& log_path,
                         const std::string& tag) {
    const FinetuneResult result = Finetune(initial, subset, clusters, config);
    SaveText(result.model, out_path);
    if (!log_path.empty()) SaveLossLog(result.epoch_loss, log_path);
    out << tag << "final_loss\t" << FormatReal(result.epoch_loss.back()) << '\n';
  };

  if (mode == RoleMode::kShared) {
    train(pairs, args.out, args.loss_log, "");
    return;
  }
  for (Role role : kRoles) {
    const auto subset = SelectSegment(pairs, static_cast<std::size_t>(role));
    const std::string log =
        args.loss_log.empty() ? std::string() : RolePath(args.loss_log, role);
    train(subset, RolePath(args.out, role), log,
          std::string(1, RoleSuffix(role)) + "_");
  }
}

std::vector<int> Labels(std::span<const Tuple> tuples, const std::string& file) {
  std::vector<int> labels;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (!tuples[i].label) {
      throw Error(file + " row " + std::to_string(i + 1) + ": missing 0/1 label");
    }
    labels.push_back(*tuples[i].label ? 1 : 0);
  }
  return labels;
}

void RunEvalCs(const EvalCsArgs& args, std::ostream& out) {
  const RoleMode mode = ParseMode(args.mode);
  if (args.delta && !args.validation.empty()) {
    throw UsageError("--delta and --validation are mutually exclusive");
  }
  if (args.delta && !std::isfinite(*args.delta)) throw UsageError("--delta must be finite");
  RequireRoleFiles(args.embeddings, mode, "--embeddings");
  if (!args.baseline.empty()) RequireRoleFiles(args.baseline, mode, "--baseline");
  RequireWritable(args.scores, "--scores");
  RequireWritable(args.report, "--report");

  const auto lemmas = MaybeLemmas(args.lemmas);
  const auto train = LoadTuples(args.train, Ptr(lemmas));
  const auto test = LoadTuples(args.test, Ptr(lemmas));
  const auto labels = Labels(test, args.test);
  std::vector<Tuple> validation;
  if (!args.validation.empty()) validation = LoadTuples(args.validation, Ptr(lemmas));
  const bool normalize = !args.no_normalize;

  struct Scored {
    double delta;
    double ap;
    std::vector<double> scores;
  };
  const auto evaluate = [&](const std::string& path) {
    const RoleModels models = LoadRoleModels(path, mode);
    const PlausibilityScorer scorer(models, train, normalize);
    Scored s{args.delta.value_or(0.0), 0.0, {}};
    if (!validation.empty()) s.delta = SweepDelta(scorer, validation).best_delta;
    for (const auto& tuple : test) s.scores.push_back(scorer.Score(tuple, s.delta));
    s.ap = AveragePrecision(s.scores, labels);
    return s;
  };

  const Scored main = evaluate(args.embeddings);
  std::optional<Scored> baseline;
  if (!args.baseline.empty()) baseline = evaluate(args.baseline);

  std::ostringstream report;
  report << "mode\t" << ToString(mode) << "\ndelta\t" << FormatReal(main.delta)
         << "\nap\t" << FormatReal(main.ap) << '\n';
  if (baseline) {
    report << "baseline_delta\t" << FormatReal(baseline->delta) << "\nbaseline_ap\t"
           << FormatReal(baseline->ap) << '\n';
  }
  Emit(report.str(), args.report, out);

  if (!args.scores.empty()) {
    std::ostringstream scores;
    for (std::size_t i = 0; i < test.size(); ++i) {
      scores << (i + 1) << '\t' << labels[i] << '\t' << FormatReal(main.scores[i]);
      if (baseline) scores << '\t' << FormatReal(baseline->scores[i]);
      scores << '\n';
    }
    WriteFile(args.scores, scores.str());
  }
}

void RunEvalVp(const EvalVpArgs& args, std::ostream& out) {
  RequireWritable(args.scores, "--scores");
  RequireWritable(args.report, "--report");
  const auto lemmas = MaybeLemmas(args.lemmas);
  const EmbeddingModel model = LoadText(args.embeddings);

  const auto featurize = [&](const std::vector<ParaphrasePair>& pairs,
                             std::vector<VpFeatures>& features, std::vector<int>& labels) {
    for (const auto& p : pairs) {
      features.push_back(ComputeVpFeatures(model, p.first, p.second));
      labels.push_back(p.label ? 1 : 0);
    }
  };

  VpWeights weights;
  if (!args.train.empty()) {
    std::vector<VpFeatures> features;
    std::vector<int> labels;
    featurize(LoadParaphrasePairs(args.train, Ptr(lemmas)), features, labels);
    weights = FitVpWeights(features, labels, args.seed);
  }
  std::vector<VpFeatures> features;
  std::vector<int> labels;
  featurize(LoadParaphrasePairs(args.pairs, Ptr(lemmas)), features, labels);
  std::vector<double> scores;
  for (const auto& f : features) scores.push_back(weights.Score(f));
  const double ap = AveragePrecision(scores, labels);

  std::ostringstream report;
  report << "ap\t" << FormatReal(ap) << "\nw_emb\t" << FormatReal(weights.w_emb)
         << "\nw_tf\t" << FormatReal(weights.w_tf) << "\nbias\t"
         << FormatReal(weights.bias) << '\n';
  Emit(report.str(), args.report, out);
  if (!args.scores.empty()) {
    std::ostringstream rows;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      rows << (i + 1) << '\t' << labels[i] << '\t' << FormatReal(scores[i]) << '\n';
    }
    WriteFile(args.scores, rows.str());
  }
}

void RunRetrieve(const RetrieveArgs& args, std::ostream& out) {
  const RoleMode mode = ParseMode(args.mode);
  RequireRoleFiles(args.embeddings, mode, "--embeddings");
  RequireWritable(args.ranks, "--ranks");
  RequireWritable(args.report, "--report");
  const auto lemmas = MaybeLemmas(args.lemmas);
  const auto queries = LoadTuples(args.queries, Ptr(lemmas));
  const auto database = LoadTuples(args.database, Ptr(lemmas));
  if (queries.empty()) throw Error(args.queries + ": no queries");
  if (queries.size() > database.size()) {
    throw Error("query i targets database row i, but there are " +
                std::to_string(queries.size()) + " queries and only " +
                std::to_string(database.size()) + " database rows");
  }
  const RoleModels models = LoadRoleModels(args.embeddings, mode);
  const Retriever retriever(models, database, mode);
  std::vector<RankedResult> results;
  results.reserve(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    results.push_back(retriever.Rank(q, queries[q], q));
  }

  if (!args.ranks.empty()) {
    std::ostringstream ranks;
    for (const auto& r : results) ranks << (r.query_id + 1) << '\t' << r.target_rank << '\n';
    WriteFile(args.ranks, ranks.str());
  }
  std::ostringstream report;
  report << "R@1\t" << FormatReal(RecallAtK(results, 1)) << "\nR@5\t"
         << FormatReal(RecallAtK(results, 5)) << "\nR@10\t"
         << FormatReal(RecallAtK(results, 10)) << "\nmedR\t"
         << FormatReal(MedianRank(results)) << '\n';
  Emit(report.str(), args.report, out);
}

void RunCooccurrence(const CooccurrenceArgs& args, std::ostream& out) {
  RequireWritable(args.out, "--out");
  const auto lemmas = MaybeLemmas(args.lemmas);
  const ClusterModel clusters = LoadClusterModel(args.cluster_model);
  const auto pairs = LoadMultimodal(args.features, args.text, Ptr(lemmas));
  const auto rows = CooccurrenceReport(pairs, clusters, SegmentRelation(args.relation_field));
  Emit(CooccurrenceTsv(rows), args.out, out);
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Visually grounded word embeddings: pretrain, cluster, finetune, evaluate"};
  app.name(args.empty() ? "groundvec" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);

  PretrainArgs pretrain;
  auto* pretrain_cmd = app.add_subcommand("pretrain", "Train CBOW initialization embeddings");
  pretrain_cmd->add_option("--corpus", pretrain.corpus, "Text corpus, one document per line")
      ->required()->check(CLI::ExistingFile);
  pretrain_cmd->add_option("--out", pretrain.out, "Output embedding file")->required();
  pretrain_cmd->add_option("--n-hidden", pretrain.config.hidden_size, "Embedding width")
      ->capture_default_str();
  pretrain_cmd->add_option("--context-radius", pretrain.config.context_radius)
      ->capture_default_str();
  pretrain_cmd->add_option("--negatives", pretrain.config.negatives)->capture_default_str();
  pretrain_cmd->add_option("--lr", pretrain.config.learning_rate)->capture_default_str();
  pretrain_cmd->add_option("--epochs", pretrain.config.epochs)->capture_default_str();
  pretrain_cmd->add_option("--min-count", pretrain.config.min_count)->capture_default_str();
  pretrain_cmd->add_option("--seed", pretrain.config.seed)->capture_default_str();
  pretrain_cmd->add_option("--lemmas", pretrain.lemmas, "word<TAB>lemma table")
      ->check(CLI::ExistingFile);

  ClusterArgs cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "K-means over visual feature vectors");
  cluster_cmd->add_option("--features", cluster.features, "Feature CSV")
      ->required()->check(CLI::ExistingFile);
  cluster_cmd->add_option("--clusters", cluster.kmeans.k, "Number of clusters K")->required();
  cluster_cmd->add_option("--pca", cluster.pca, "Reduce with PCA keeping this variance fraction");
  cluster_cmd->add_option("--restarts", cluster.kmeans.restarts)->capture_default_str();
  cluster_cmd->add_option("--max-iter", cluster.kmeans.max_iter)->capture_default_str();
  cluster_cmd->add_option("--seed", cluster.kmeans.seed)->capture_default_str();
  cluster_cmd->add_option("--out", cluster.out, "Output cluster model")->required();
  cluster_cmd->add_option("--labels", cluster.labels, "Output row<TAB>label TSV");

  FinetuneArgs finetune;
  auto* finetune_cmd = app.add_subcommand("finetune", "Ground embeddings on surrogate visual classes");
  finetune_cmd->add_option("--embeddings", finetune.embeddings, "Initial embeddings")
      ->required()->check(CLI::ExistingFile);
  finetune_cmd->add_option("--features", finetune.features)->required()->check(CLI::ExistingFile);
  finetune_cmd->add_option("--text", finetune.text)->required()->check(CLI::ExistingFile);
  finetune_cmd->add_option("--cluster-model", finetune.cluster_model)
      ->required()->check(CLI::ExistingFile);
  finetune_cmd->add_option("--clusters", finetune.clusters, "Expected N_K (checked)");
  finetune_cmd->add_option("--lr", finetune.lr)->capture_default_str();
  finetune_cmd->add_option("--epochs", finetune.epochs)->capture_default_str();
  finetune_cmd->add_option("--strategy", finetune.strategy, "words|phrases|sents|winds[:n]|descs")
      ->capture_default_str();
  finetune_cmd->add_option("--window-width", finetune.window_width, "Width for --strategy winds");
  finetune_cmd->add_option("--mode", finetune.mode, "shared|separate")->capture_default_str();
  finetune_cmd->add_option("--seed", finetune.seed)->capture_default_str();
  finetune_cmd->add_flag("--no-shuffle", finetune.no_shuffle);
  finetune_cmd->add_option("--out", finetune.out, "Output embeddings (.P/.R/.S in separate mode)")
      ->required();
  finetune_cmd->add_option("--loss-log", finetune.loss_log, "epoch<TAB>mean_nll TSV");
  finetune_cmd->add_option("--lemmas", finetune.lemmas)->check(CLI::ExistingFile);

  EvalCsArgs eval_cs;
  auto* eval_cs_cmd = app.add_subcommand("eval-cs", "Common-sense plausibility AP");
  eval_cs_cmd->add_option("--train", eval_cs.train, "Plausible tuples TSV")
      ->required()->check(CLI::ExistingFile);
  eval_cs_cmd->add_option("--test", eval_cs.test, "Labeled test tuples TSV")
      ->required()->check(CLI::ExistingFile);
  eval_cs_cmd->add_option("--embeddings", eval_cs.embeddings)->required();
  eval_cs_cmd->add_option("--baseline", eval_cs.baseline, "Second embeddings to compare");
  eval_cs_cmd->add_option("--validation", eval_cs.validation, "Labeled tuples for a delta sweep")
      ->check(CLI::ExistingFile);
  eval_cs_cmd->add_option("--mode", eval_cs.mode, "shared|separate")->capture_default_str();
  eval_cs_cmd->add_option("--delta", eval_cs.delta, "Hinge threshold (default 0)");
  eval_cs_cmd->add_flag("--no-normalize", eval_cs.no_normalize, "Raw dot products");
  eval_cs_cmd->add_option("--scores", eval_cs.scores, "Per-tuple scores TSV");
  eval_cs_cmd->add_option("--report", eval_cs.report, "Copy of the report");
  eval_cs_cmd->add_option("--lemmas", eval_cs.lemmas)->check(CLI::ExistingFile);

  EvalVpArgs eval_vp;
  auto* eval_vp_cmd = app.add_subcommand("eval-vp", "Visual paraphrasing AP");
  eval_vp_cmd->add_option("--pairs", eval_vp.pairs, "desc<TAB>desc<TAB>label test file")
      ->required()->check(CLI::ExistingFile);
  eval_vp_cmd->add_option("--train", eval_vp.train, "Split used to fit the scorer weights")
      ->check(CLI::ExistingFile);
  eval_vp_cmd->add_option("--embeddings", eval_vp.embeddings)->required()->check(CLI::ExistingFile);
  eval_vp_cmd->add_option("--seed", eval_vp.seed)->capture_default_str();
  eval_vp_cmd->add_option("--scores", eval_vp.scores);
  eval_vp_cmd->add_option("--report", eval_vp.report);
  eval_vp_cmd->add_option("--lemmas", eval_vp.lemmas)->check(CLI::ExistingFile);

  RetrieveArgs retrieve;
  auto* retrieve_cmd = app.add_subcommand("retrieve", "Tuple-to-image retrieval (query i targets row i)");
  retrieve_cmd->add_option("--queries", retrieve.queries)->required()->check(CLI::ExistingFile);
  retrieve_cmd->add_option("--database", retrieve.database)->required()->check(CLI::ExistingFile);
  retrieve_cmd->add_option("--embeddings", retrieve.embeddings)->required();
  retrieve_cmd->add_option("--mode", retrieve.mode, "shared|separate")->capture_default_str();
  retrieve_cmd->add_option("--ranks", retrieve.ranks, "Per-query query<TAB>rank TSV");
  retrieve_cmd->add_option("--report", retrieve.report);
  retrieve_cmd->add_option("--lemmas", retrieve.lemmas)->check(CLI::ExistingFile);

  CooccurrenceArgs cooc;
  auto* cooc_cmd = app.add_subcommand("report-cooccurrence", "Relations sharing clusters");
  cooc_cmd->add_option("--features", cooc.features)->required()->check(CLI::ExistingFile);
  cooc_cmd->add_option("--text", cooc.text)->required()->check(CLI::ExistingFile);
  cooc_cmd->add_option("--cluster-model", cooc.cluster_model)->required()->check(CLI::ExistingFile);
  cooc_cmd->add_option("--relation-field", cooc.relation_field,
                       "0-based text segment holding the relation")
      ->capture_default_str();
  cooc_cmd->add_option("--out", cooc.out);
  cooc_cmd->add_option("--lemmas", cooc.lemmas)->check(CLI::ExistingFile);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("groundvec");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*pretrain_cmd) RunPretrain(pretrain, out);
    else if (*cluster_cmd) RunCluster(cluster, out);
    else if (*finetune_cmd) RunFinetune(finetune, out);
    else if (*eval_cs_cmd) RunEvalCs(eval_cs, out);
    else if (*eval_vp_cmd) RunEvalVp(eval_vp, out);
    else if (*retrieve_cmd) RunRetrieve(retrieve, out);
    else if (*cooc_cmd) RunCooccurrence(cooc, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace groundvec::cli
