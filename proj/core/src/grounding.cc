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

#include "groundvec/grounding.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "groundvec/error.h"
#include "groundvec/random.h"

namespace groundvec {
namespace {

void CheckWindow(const EmbeddingModel& model, std::span<const WordId> window) {
  if (window.empty()) throw Error("grounding: empty window");
  for (WordId id : window) {
    if (id >= model.vocab_size()) throw Error("grounding: word id out of range");
  }
}

std::string JoinTokens(const TokenList& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace

void GroundingConfig::Validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error("grounding: learning rate must be finite and non-negative");
  }
  if (epochs < 1) throw Error("grounding: epochs must be at least 1");
  if (num_classes < 2) throw Error("grounding: need at least 2 classes");
  if (strategy.kind == WindowStrategy::Kind::kWinds && strategy.width < 1) {
    throw Error("grounding: window width must be at least 1");
  }
}

Eigen::VectorXd Forward(const EmbeddingModel& model, std::span<const WordId> window) {
  const RowMatrix& output = model.output();
  CheckWindow(model, window);
  const Eigen::VectorXd hidden = model.Hidden(window);
  Eigen::VectorXd logits = output.transpose() * hidden;
  logits.array() -= logits.maxCoeff();
  Eigen::VectorXd probs = logits.array().exp();
  probs /= probs.sum();
  return probs;
}

double Nll(const Eigen::Ref<const Eigen::VectorXd>& probs, std::size_t label) {
  if (label >= static_cast<std::size_t>(probs.size())) {
    throw Error("nll: label out of range");
  }
  return -std::log(probs(static_cast<Eigen::Index>(label)));
}

GroundingGradient ComputeGradient(const EmbeddingModel& model,
                                  const TrainRecord& record) {
  const RowMatrix& output = model.output();
  if (record.label >= static_cast<std::size_t>(output.cols())) {
    throw Error("grounding: label " + std::to_string(record.label) +
                " out of range for " + std::to_string(output.cols()) + " classes");
  }
  const Eigen::VectorXd probs = Forward(model, record.window);
  const Eigen::VectorXd hidden = model.Hidden(record.window);

  GroundingGradient grad;
  grad.loss = Nll(probs, record.label);
  Eigen::VectorXd delta_out = probs;
  delta_out(static_cast<Eigen::Index>(record.label)) -= 1.0;
  grad.output = hidden * delta_out.transpose();
  const Eigen::VectorXd delta_hidden = output * delta_out;

  const double size = static_cast<double>(record.window.size());
  for (WordId id : record.window) {
    auto it = std::find_if(grad.input_rows.begin(), grad.input_rows.end(),
                           [id](const auto& entry) { return entry.first == id; });
    if (it == grad.input_rows.end()) {
      const auto multiplicity = static_cast<double>(
          std::count(record.window.begin(), record.window.end(), id));
      grad.input_rows.emplace_back(id, (multiplicity / size) * delta_hidden);
    }
  }
  return grad;
}

double SgdStep(EmbeddingModel& model, const TrainRecord& record, double lr) {
  const GroundingGradient grad = ComputeGradient(model, record);
  model.mutable_output() -= lr * grad.output;
  RowMatrix& input = model.mutable_input();
  for (const auto& [id, g] : grad.input_rows) input.row(id) -= lr * g.transpose();
  return grad.loss;
}

std::vector<TrainRecord> BuildRecords(std::span<const MultimodalPair> pairs,
                                      const ClusterModel& clusters,
                                      const WindowStrategy& strategy,
                                      const Vocabulary& vocab) {
  std::vector<TrainRecord> records;
  for (const auto& pair : pairs) {
    auto windows = WindowsOrEmpty(pair, strategy, vocab);
    if (windows.empty()) continue;
    const std::size_t label = Assign(clusters, std::span<const double>(pair.features));
    for (auto& window : windows) records.push_back({std::move(window), label});
  }
  return records;
}

FinetuneResult FinetuneRecords(const EmbeddingModel& initial,
                               std::vector<TrainRecord> records,
                               const GroundingConfig& config,
                               const EarlyStop& early_stop) {
  config.Validate();
  if (records.empty()) {
    throw Error("grounding: no valid training records (every window is empty)");
  }
  for (const auto& record : records) {
    CheckWindow(initial, record.window);
    if (record.label >= config.num_classes) {
      throw Error("grounding: record label " + std::to_string(record.label) +
                  " out of range for " + std::to_string(config.num_classes) +
                  " classes");
    }
  }

  FinetuneResult result{initial, {}};
  EmbeddingModel& model = result.model;
  Rng init_rng = MakeRng(config.seed, Stream::kGrounding, 0);
  Rng order_rng = MakeRng(config.seed, Stream::kGrounding, 1);
  model.InitOutput(config.num_classes, init_rng);

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) Shuffle(order.begin(), order.end(), order_rng);
    double total = 0.0;
    for (std::size_t i : order) total += SgdStep(model, records[i], config.learning_rate);
    result.epoch_loss.push_back(total / static_cast<double>(records.size()));
    if (early_stop && early_stop(epoch, model)) break;
  }
  model.CheckFinite();
  model.ClearOutput();
  return result;
}

FinetuneResult Finetune(const EmbeddingModel& initial,
                        std::span<const MultimodalPair> pairs,
                        const ClusterModel& clusters,
                        const GroundingConfig& config,
                        const EarlyStop& early_stop) {
  config.Validate();
  if (clusters.num_clusters() != config.num_classes) {
    throw Error("grounding: cluster model has " +
                std::to_string(clusters.num_clusters()) +
                " clusters but N_K = " + std::to_string(config.num_classes));
  }
  auto records = BuildRecords(pairs, clusters, config.strategy, initial.vocab());
  return FinetuneRecords(initial, std::move(records), config, early_stop);
}

std::vector<MultimodalPair> SelectSegment(std::span<const MultimodalPair> pairs,
                                          std::size_t segment) {
  std::vector<MultimodalPair> selected;
  selected.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    if (segment >= pair.segments.size()) {
      throw Error("select segment: pair " + std::to_string(i + 1) + " has " +
                  std::to_string(pair.segments.size()) + " segments, need " +
                  std::to_string(segment + 1));
    }
    selected.push_back({pair.features, {pair.segments[segment]}});
  }
  return selected;
}

void SaveLossLog(std::span<const double> epoch_loss,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  for (std::size_t i = 0; i < epoch_loss.size(); ++i) {
    out << (i + 1) << '\t' << epoch_loss[i] << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<CooccurrenceRow> Cooccurrence(std::span<const std::string> relations,
                                          std::span<const std::size_t> labels) {
  if (relations.size() != labels.size()) {
    throw Error("cooccurrence: relation and label counts differ");
  }
  std::map<std::size_t, std::set<std::string>> by_cluster;
  std::set<std::string> distinct;
  for (std::size_t i = 0; i < relations.size(); ++i) {
    by_cluster[labels[i]].insert(relations[i]);
    distinct.insert(relations[i]);
  }
  const std::vector<std::string> names(distinct.begin(), distinct.end());
  std::vector<CooccurrenceRow> rows;
  for (std::size_t a = 0; a < names.size(); ++a) {
    for (std::size_t b = a + 1; b < names.size(); ++b) {
      std::size_t shared = 0;
      for (const auto& [cluster, members] : by_cluster) {
        if (members.contains(names[a]) && members.contains(names[b])) ++shared;
      }
      rows.push_back({names[a], names[b], shared});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    return x.shared_clusters > y.shared_clusters;
  });
  return rows;
}

RelationExtractor SegmentRelation(std::size_t segment) {
  return [segment](const MultimodalPair& pair) -> std::optional<std::string> {
    if (segment >= pair.segments.size() || pair.segments[segment].empty()) {
      return std::nullopt;
    }
    return JoinTokens(pair.segments[segment]);
  };
}

std::vector<CooccurrenceRow> CooccurrenceReport(
    std::span<const MultimodalPair> pairs, const ClusterModel& clusters,
    const RelationExtractor& relation) {
  std::vector<std::string> relations;
  std::vector<std::size_t> labels;
  relations.reserve(pairs.size());
  labels.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto name = relation(pairs[i]);
    if (!name) {
      throw Error("cooccurrence: record " + std::to_string(i + 1) +
                  " has no relation annotation");
    }
    relations.push_back(std::move(*name));
    labels.push_back(Assign(clusters, std::span<const double>(pairs[i].features)));
  }
  return Cooccurrence(relations, labels);
}

std::string CooccurrenceTsv(std::span<const CooccurrenceRow> rows) {
  std::ostringstream out;
  for (const auto& row : rows) {
    out << row.first << '\t' << row.second << '\t' << row.shared_clusters << '\n';
  }
  return out.str();
}

}  // namespace groundvec
