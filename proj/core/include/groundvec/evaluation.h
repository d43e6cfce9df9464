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

#ifndef GROUNDVEC_EVALUATION_H_
#define GROUNDVEC_EVALUATION_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "groundvec/corpus.h"
#include "groundvec/embedding.h"

namespace groundvec {

// ---------------------------------------------------------------------------
// Common-sense plausibility
// ---------------------------------------------------------------------------

struct CommonSenseConfig {
  double delta = 0.0;
  // L2-normalize element embeddings before the dot products, which bounds
  // the pair score to [-3, 3].
  bool normalize = true;
};

// Mean row of the element's in-vocabulary tokens, optionally unit length.
// Throws when every token is OOV or the mean is the zero vector under
// normalization.
Eigen::VectorXd ElementEmbedding(const EmbeddingModel& model,
                                 std::span<const std::string> tokens,
                                 bool normalize);

// h(query, train): sum over P/R/S of dot(E_role(query_role), E_role(train_role)).
double CsPairScore(const RoleModels& models, const Tuple& query,
                   const Tuple& train, bool normalize = true);

// Caches the embedded training tuples so scoring many queries is cheap.
class PlausibilityScorer {
 public:
  PlausibilityScorer(const RoleModels& models, std::span<const Tuple> train,
                     bool normalize = true);

  // h against every training tuple, in training order.
  std::vector<double> PairScores(const Tuple& query) const;
  // f = mean over training tuples of max(h - delta, 0).
  double Score(const Tuple& query, double delta) const;

 private:
  using Embedded = std::array<Eigen::VectorXd, 3>;
  Embedded Embed(const Tuple& tuple) const;

  RoleModels models_;
  bool normalize_;
  std::vector<Embedded> train_;
};

double CsPlausibility(const RoleModels& models, const Tuple& query,
                      std::span<const Tuple> train, const CommonSenseConfig& config);

// ---------------------------------------------------------------------------
// Ranking metrics
// ---------------------------------------------------------------------------

// Sort by score descending (ties keep input order) and average the precision
// at each positive. Labels are 0/1. Throws when there is no positive.
double AveragePrecision(std::span<const double> scores, std::span<const int> labels);

struct DeltaSweepResult {
  double best_delta = 0.0;
  double best_ap = 0.0;
  std::vector<std::pair<double, double>> curve;  // (delta, AP)
};

// Grid search for delta maximizing AP on labeled validation tuples.
// Default grid: 0.0, 0.1, ..., 3.0. Ties keep the smallest delta.
DeltaSweepResult SweepDelta(const PlausibilityScorer& scorer,
                            std::span<const Tuple> validation,
                            std::span<const double> grid = {});
std::vector<double> DefaultDeltaGrid();

// ---------------------------------------------------------------------------
// Visual paraphrasing
// ---------------------------------------------------------------------------

struct VpFeatures {
  double embedding_cosine = 0.0;  // cosine of mean embeddings
  double tf_cosine = 0.0;         // cosine of term-frequency vectors
};

VpFeatures ComputeVpFeatures(const EmbeddingModel& model,
                             std::span<const std::string> desc_a,
                             std::span<const std::string> desc_b);

// Linear scorer over VpFeatures. Score() is the raw (pre-sigmoid) value.
struct VpWeights {
  double w_emb = 1.0;
  double w_tf = 1.0;
  double bias = 0.0;

  double Score(const VpFeatures& f) const {
    return w_emb * f.embedding_cosine + w_tf * f.tf_cosine + bias;
  }
};

double VpScore(const EmbeddingModel& model, std::span<const std::string> desc_a,
               std::span<const std::string> desc_b, const VpWeights& weights);

// Logistic regression by full-batch gradient descent (1000 iterations,
// step 0.1); initial weights drawn small from the seed.
VpWeights FitVpWeights(std::span<const VpFeatures> features,
                       std::span<const int> labels, std::uint64_t seed,
                       std::size_t iterations = 1000, double learning_rate = 0.1);

struct ParaphrasePair {
  TokenList first;
  TokenList second;
  bool label = false;
};

// Lines of "description<TAB>description<TAB>0|1".
std::vector<ParaphrasePair> LoadParaphrasePairs(const std::filesystem::path& path,
                                                const LemmaTable* lemmas = nullptr);

// ---------------------------------------------------------------------------
// Retrieval
// ---------------------------------------------------------------------------

struct RankedResult {
  std::size_t query_id = 0;
  std::vector<std::pair<std::size_t, double>> ranking;  // (item, score) desc
  std::size_t target_rank = 0;                          // 1-based
};

// Shared: cosine between means over all tuple tokens (role P model).
// Separate: mean of the per-role cosines.
double RetrievalScore(const RoleModels& models, const Tuple& query,
                      const Tuple& item, RoleMode mode);

class Retriever {
 public:
  Retriever(const RoleModels& models, std::span<const Tuple> database,
            RoleMode mode);

  std::vector<double> Scores(const Tuple& query) const;
  RankedResult Rank(std::size_t query_id, const Tuple& query,
                    std::size_t target) const;
  std::size_t size() const { return database_.size(); }

 private:
  using Embedded = std::array<Eigen::VectorXd, 3>;
  Embedded Embed(const Tuple& tuple) const;

  RoleModels models_;
  RoleMode mode_;
  std::vector<Embedded> database_;
};

RankedResult Retrieve(const RoleModels& models, const Tuple& query,
                      std::span<const Tuple> database, RoleMode mode,
                      std::size_t target, std::size_t query_id = 0);

// Fraction of results whose target rank is <= k. Empty input gives 0.
double RecallAtK(std::span<const std::size_t> ranks, std::size_t k);
double RecallAtK(std::span<const RankedResult> results, std::size_t k);

// Median target rank; the mean of the two middle ranks for even counts.
double MedianRank(std::span<const std::size_t> ranks);
double MedianRank(std::span<const RankedResult> results);

}  // namespace groundvec

#endif  // GROUNDVEC_EVALUATION_H_
