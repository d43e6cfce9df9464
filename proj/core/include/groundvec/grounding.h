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

#ifndef GROUNDVEC_GROUNDING_H_
#define GROUNDVEC_GROUNDING_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "groundvec/clustering.h"
#include "groundvec/corpus.h"
#include "groundvec/embedding.h"

namespace groundvec {

struct GroundingConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 10;
  WindowStrategy strategy = WindowStrategy::Words();
  std::size_t num_classes = 25;
  std::uint64_t seed = 1;
  bool shuffle = true;

  void Validate() const;
};

// One training example: a window of word ids and its surrogate class.
struct TrainRecord {
  std::vector<WordId> window;
  std::size_t label = 0;
};

// softmax(hidden(window) * W_O), computed with max subtraction.
Eigen::VectorXd Forward(const EmbeddingModel& model, std::span<const WordId> window);

// -log(probs[label]).
double Nll(const Eigen::Ref<const Eigen::VectorXd>& probs, std::size_t label);

// Gradient of the NLL for one record.
struct GroundingGradient {
  double loss = 0.0;
  RowMatrix output;  // N_H x N_K
  // dL/dW_I row for each distinct window token, in first-occurrence order.
  std::vector<std::pair<WordId, Eigen::VectorXd>> input_rows;
};

GroundingGradient ComputeGradient(const EmbeddingModel& model,
                                  const TrainRecord& record);

// W -= lr * grad for W_O and the window's W_I rows. The hidden-layer
// gradient uses W_O from before the update. Returns the loss before the
// update.
double SgdStep(EmbeddingModel& model, const TrainRecord& record, double lr);

// Labels every pair through the cluster model and expands it into records.
// Pairs whose windows are all out of vocabulary contribute nothing.
std::vector<TrainRecord> BuildRecords(std::span<const MultimodalPair> pairs,
                                      const ClusterModel& clusters,
                                      const WindowStrategy& strategy,
                                      const Vocabulary& vocab);

struct FinetuneResult {
  EmbeddingModel model;  // W_O stripped
  std::vector<double> epoch_loss;  // mean NLL per completed epoch
};

// Called after each epoch with (epoch index, current model); returning true
// stops training early.
using EarlyStop = std::function<bool(std::size_t, const EmbeddingModel&)>;

// Grounds `initial` on the multimodal pairs. A fresh W_O is drawn from the
// config seed for every run and dropped afterwards.
FinetuneResult Finetune(const EmbeddingModel& initial,
                        std::span<const MultimodalPair> pairs,
                        const ClusterModel& clusters,
                        const GroundingConfig& config,
                        const EarlyStop& early_stop = {});

// Record-level entry point used by Finetune.
FinetuneResult FinetuneRecords(const EmbeddingModel& initial,
                               std::vector<TrainRecord> records,
                               const GroundingConfig& config,
                               const EarlyStop& early_stop = {});

// Keeps a single text segment of each pair (e.g. the relation of a tuple).
// Throws if a pair lacks that segment.
std::vector<MultimodalPair> SelectSegment(std::span<const MultimodalPair> pairs,
                                          std::size_t segment);

// Writes "epoch<TAB>mean_nll" rows, epochs numbered from 1.
void SaveLossLog(std::span<const double> epoch_loss,
                 const std::filesystem::path& path);

struct CooccurrenceRow {
  std::string first;
  std::string second;
  std::size_t shared_clusters = 0;
};

// For every unordered pair of distinct relations, the number of clusters in
// which both occur. Sorted by count descending, then lexicographically.
std::vector<CooccurrenceRow> Cooccurrence(std::span<const std::string> relations,
                                          std::span<const std::size_t> labels);

using RelationExtractor =
    std::function<std::optional<std::string>(const MultimodalPair&)>;

// Relation = tokens of the given segment joined by spaces.
RelationExtractor SegmentRelation(std::size_t segment);

// Labels pairs through the cluster model and tabulates relation
// co-occurrence. Throws when a pair has no relation annotation.
std::vector<CooccurrenceRow> CooccurrenceReport(
    std::span<const MultimodalPair> pairs, const ClusterModel& clusters,
    const RelationExtractor& relation);

std::string CooccurrenceTsv(std::span<const CooccurrenceRow> rows);

}  // namespace groundvec

#endif  // GROUNDVEC_GROUNDING_H_
