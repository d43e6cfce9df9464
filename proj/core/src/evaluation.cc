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

#include "groundvec/evaluation.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "groundvec/error.h"
#include "groundvec/random.h"

namespace groundvec {
namespace {

constexpr std::size_t kRoles = 3;

const char* RoleName(std::size_t role) {
  static constexpr const char* kNames[] = {"primary", "relation", "secondary"};
  return kNames[role];
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Indices ordered by score descending; equal scores keep input order.
std::vector<std::size_t> RankOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

Eigen::VectorXd MeanOrThrow(const EmbeddingModel& model,
                            std::span<const std::string> tokens,
                            const char* what) {
  auto mean = model.MeanOfKnown(tokens);
  if (!mean) {
    throw Error(std::string(what) + " has no in-vocabulary tokens");
  }
  return std::move(*mean);
}

}  // namespace

Eigen::VectorXd ElementEmbedding(const EmbeddingModel& model,
                                 std::span<const std::string> tokens,
                                 bool normalize) {
  Eigen::VectorXd mean = MeanOrThrow(model, tokens, "tuple element");
  if (normalize) {
    const double norm = mean.norm();
    if (norm == 0.0) throw Error("tuple element embeds to the zero vector");
    mean /= norm;
  }
  return mean;
}

double CsPairScore(const RoleModels& models, const Tuple& query,
                   const Tuple& train, bool normalize) {
  double h = 0.0;
  for (std::size_t role = 0; role < kRoles; ++role) {
    const EmbeddingModel& model = models.For(role);
    h += ElementEmbedding(model, query.element(role), normalize)
             .dot(ElementEmbedding(model, train.element(role), normalize));
  }
  return h;
}

PlausibilityScorer::PlausibilityScorer(const RoleModels& models,
                                       std::span<const Tuple> train,
                                       bool normalize)
    : models_(models), normalize_(normalize) {
  if (train.empty()) throw Error("plausibility: empty training tuple set");
  train_.reserve(train.size());
  for (const auto& tuple : train) train_.push_back(Embed(tuple));
}

PlausibilityScorer::Embedded PlausibilityScorer::Embed(const Tuple& tuple) const {
  Embedded out;
  for (std::size_t role = 0; role < kRoles; ++role) {
    try {
      out[role] = ElementEmbedding(models_.For(role), tuple.element(role), normalize_);
    } catch (const Error& e) {
      throw Error(std::string(RoleName(role)) + ": " + e.what());
    }
  }
  return out;
}

std::vector<double> PlausibilityScorer::PairScores(const Tuple& query) const {
  const Embedded q = Embed(query);
  std::vector<double> scores;
  scores.reserve(train_.size());
  for (const auto& t : train_) {
    scores.push_back(q[0].dot(t[0]) + q[1].dot(t[1]) + q[2].dot(t[2]));
  }
  return scores;
}

double PlausibilityScorer::Score(const Tuple& query, double delta) const {
  if (!std::isfinite(delta)) throw Error("plausibility: delta must be finite");
  double total = 0.0;
  for (double h : PairScores(query)) total += std::max(h - delta, 0.0);
  return total / static_cast<double>(train_.size());
}

double CsPlausibility(const RoleModels& models, const Tuple& query,
                      std::span<const Tuple> train, const CommonSenseConfig& config) {
  return PlausibilityScorer(models, train, config.normalize).Score(query, config.delta);
}

double AveragePrecision(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error("average precision: scores and labels differ in length");
  }
  const auto order = RankOrder(scores);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] != 0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  if (hits == 0) throw Error("average precision: no positive labels");
  return sum / static_cast<double>(hits);
}

std::vector<double> DefaultDeltaGrid() {
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(i / 10.0);
  return grid;
}

DeltaSweepResult SweepDelta(const PlausibilityScorer& scorer,
                            std::span<const Tuple> validation,
                            std::span<const double> grid) {
  std::vector<double> default_grid;
  if (grid.empty()) {
    default_grid = DefaultDeltaGrid();
    grid = default_grid;
  }
  std::vector<int> labels;
  std::vector<std::vector<double>> pair_scores;
  for (const auto& tuple : validation) {
    if (!tuple.label) throw Error("delta sweep: validation tuple without label");
    labels.push_back(*tuple.label ? 1 : 0);
    pair_scores.push_back(scorer.PairScores(tuple));
  }

  DeltaSweepResult result;
  bool first = true;
  for (double delta : grid) {
    std::vector<double> scores;
    scores.reserve(pair_scores.size());
    for (const auto& hs : pair_scores) {
      double total = 0.0;
      for (double h : hs) total += std::max(h - delta, 0.0);
      scores.push_back(total / static_cast<double>(hs.size()));
    }
    const double ap = AveragePrecision(scores, labels);
    result.curve.emplace_back(delta, ap);
    if (first || ap > result.best_ap) {
      result.best_ap = ap;
      result.best_delta = delta;
      first = false;
    }
  }
  return result;
}

VpFeatures ComputeVpFeatures(const EmbeddingModel& model,
                             std::span<const std::string> desc_a,
                             std::span<const std::string> desc_b) {
  VpFeatures f;
  f.embedding_cosine = Cosine(MeanOrThrow(model, desc_a, "first description"),
                              MeanOrThrow(model, desc_b, "second description"));

  std::map<std::string_view, std::pair<double, double>> tf;
  for (const auto& t : desc_a) tf[t].first += 1.0;
  for (const auto& t : desc_b) tf[t].second += 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [term, counts] : tf) {
    dot += counts.first * counts.second;
    na += counts.first * counts.first;
    nb += counts.second * counts.second;
  }
  f.tf_cosine = dot / (std::sqrt(na) * std::sqrt(nb));
  return f;
}

double VpScore(const EmbeddingModel& model, std::span<const std::string> desc_a,
               std::span<const std::string> desc_b, const VpWeights& weights) {
  return weights.Score(ComputeVpFeatures(model, desc_a, desc_b));
}

VpWeights FitVpWeights(std::span<const VpFeatures> features,
                       std::span<const int> labels, std::uint64_t seed,
                       std::size_t iterations, double learning_rate) {
  if (features.size() != labels.size() || features.empty()) {
    throw Error("paraphrase weights: need equal, non-empty features and labels");
  }
  Rng rng = MakeRng(seed, Stream::kParaphrase);
  VpWeights w;
  w.w_emb = (UniformUnit(rng) - 0.5) * 0.02;
  w.w_tf = (UniformUnit(rng) - 0.5) * 0.02;
  w.bias = 0.0;
  const double n = static_cast<double>(features.size());
  for (std::size_t it = 0; it < iterations; ++it) {
    double g_emb = 0.0, g_tf = 0.0, g_bias = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      const double err = Sigmoid(w.Score(features[i])) - (labels[i] != 0 ? 1.0 : 0.0);
      g_emb += err * features[i].embedding_cosine;
      g_tf += err * features[i].tf_cosine;
      g_bias += err;
    }
    w.w_emb -= learning_rate * g_emb / n;
    w.w_tf -= learning_rate * g_tf / n;
    w.bias -= learning_rate * g_bias / n;
  }
  return w;
}

std::vector<ParaphrasePair> LoadParaphrasePairs(const std::filesystem::path& path,
                                                const LemmaTable* lemmas) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<ParaphrasePair> pairs;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + " row " + std::to_string(row);
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos || line.find('\t', tab2 + 1) != std::string::npos) {
      throw Error(where + ": expected description<TAB>description<TAB>label");
    }
    ParaphrasePair pair;
    pair.first = Preprocess(std::string_view(line).substr(0, tab1), lemmas);
    pair.second =
        Preprocess(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1), lemmas);
    const std::string label = line.substr(tab2 + 1);
    if (label != "0" && label != "1") throw Error(where + ": label must be 0 or 1");
    pair.label = label == "1";
    if (pair.first.empty() || pair.second.empty()) {
      throw Error(where + ": empty description");
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

Retriever::Retriever(const RoleModels& models, std::span<const Tuple> database,
                     RoleMode mode)
    : models_(models), mode_(mode) {
  if (database.empty()) throw Error("retrieval: empty database");
  database_.reserve(database.size());
  for (std::size_t i = 0; i < database.size(); ++i) {
    try {
      database_.push_back(Embed(database[i]));
    } catch (const Error& e) {
      throw Error("database tuple " + std::to_string(i + 1) + ": " + e.what());
    }
  }
}

Retriever::Embedded Retriever::Embed(const Tuple& tuple) const {
  Embedded out;
  if (mode_ == RoleMode::kShared) {
    out[0] = MeanOrThrow(models_.For(Role::kPrimary), tuple.Tokens(), "tuple");
    return out;
  }
  for (std::size_t role = 0; role < kRoles; ++role) {
    out[role] = MeanOrThrow(models_.For(role), tuple.element(role), RoleName(role));
  }
  return out;
}

std::vector<double> Retriever::Scores(const Tuple& query) const {
  const Embedded q = Embed(query);
  std::vector<double> scores;
  scores.reserve(database_.size());
  for (const auto& item : database_) {
    if (mode_ == RoleMode::kShared) {
      scores.push_back(Cosine(q[0], item[0]));
    } else {
      scores.push_back(
          (Cosine(q[0], item[0]) + Cosine(q[1], item[1]) + Cosine(q[2], item[2])) /
          3.0);
    }
  }
  return scores;
}

RankedResult Retriever::Rank(std::size_t query_id, const Tuple& query,
                             std::size_t target) const {
  if (target >= database_.size()) {
    throw Error("retrieval: target " + std::to_string(target) +
                " outside a database of " + std::to_string(database_.size()));
  }
  const auto scores = Scores(query);
  const auto order = RankOrder(scores);
  RankedResult result;
  result.query_id = query_id;
  result.ranking.reserve(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    result.ranking.emplace_back(order[pos], scores[order[pos]]);
    if (order[pos] == target) result.target_rank = pos + 1;
  }
  return result;
}

double RetrievalScore(const RoleModels& models, const Tuple& query,
                      const Tuple& item, RoleMode mode) {
  const Tuple one[] = {item};
  return Retriever(models, one, mode).Scores(query).front();
}

RankedResult Retrieve(const RoleModels& models, const Tuple& query,
                      std::span<const Tuple> database, RoleMode mode,
                      std::size_t target, std::size_t query_id) {
  return Retriever(models, database, mode).Rank(query_id, query, target);
}

double RecallAtK(std::span<const std::size_t> ranks, std::size_t k) {
  if (k < 1) throw Error("recall@k: k must be at least 1");
  if (ranks.empty()) return 0.0;
  const auto hits = std::count_if(ranks.begin(), ranks.end(),
                                  [k](std::size_t r) { return r <= k; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double RecallAtK(std::span<const RankedResult> results, std::size_t k) {
  std::vector<std::size_t> ranks;
  ranks.reserve(results.size());
  for (const auto& r : results) ranks.push_back(r.target_rank);
  return RecallAtK(ranks, k);
}

double MedianRank(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw Error("median rank: no results");
  std::vector<std::size_t> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  if (sorted.size() % 2 == 1) return static_cast<double>(sorted[mid]);
  return (static_cast<double>(sorted[mid - 1]) + static_cast<double>(sorted[mid])) / 2.0;
}

double MedianRank(std::span<const RankedResult> results) {
  std::vector<std::size_t> ranks;
  ranks.reserve(results.size());
  for (const auto& r : results) ranks.push_back(r.target_rank);
  return MedianRank(ranks);
}

}  // namespace groundvec
