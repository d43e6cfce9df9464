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

#include "groundvec/pretrain.h"

#include <algorithm>
#include <cmath>

#include "groundvec/error.h"

namespace groundvec {
namespace {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// -log(sigmoid(x)), stable for large |x|.
double NegLogSigmoid(double x) {
  if (x >= 0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

Eigen::VectorXd* FindRow(std::vector<std::pair<WordId, Eigen::VectorXd>>& rows,
                         WordId id) {
  for (auto& [row_id, grad] : rows) {
    if (row_id == id) return &grad;
  }
  return nullptr;
}

void AddToRow(std::vector<std::pair<WordId, Eigen::VectorXd>>& rows, WordId id,
              const Eigen::VectorXd& delta) {
  if (auto* grad = FindRow(rows, id)) {
    *grad += delta;
  } else {
    rows.emplace_back(id, delta);
  }
}

}  // namespace

void PretrainConfig::Validate() const {
  if (hidden_size < 1 || context_radius < 1 || negatives < 1 || epochs < 1 ||
      min_count < 1) {
    throw Error("pretrain: integer settings must all be at least 1");
  }
  if (!(learning_rate > 0.0)) throw Error("pretrain: learning rate must be positive");
}

UnigramSampler::UnigramSampler(std::span<const std::uint64_t> counts,
                               double power) {
  if (counts.empty()) throw Error("sampler: empty vocabulary");
  cumulative_.reserve(counts.size());
  double total = 0.0;
  for (std::uint64_t c : counts) {
    total += std::pow(static_cast<double>(c), power);
    cumulative_.push_back(total);
  }
  if (!(total > 0.0)) throw Error("sampler: all counts are zero");
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

WordId UnigramSampler::Sample(Rng& rng) const {
  const double u = UniformUnit(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto index = static_cast<std::size_t>(it - cumulative_.begin());
  return static_cast<WordId>(std::min(index, cumulative_.size() - 1));
}

double UnigramSampler::Probability(WordId id) const {
  const double upper = cumulative_.at(id);
  const double lower = id == 0 ? 0.0 : cumulative_[id - 1];
  return upper - lower;
}

double NegSamplingLoss(const Eigen::Ref<const Eigen::VectorXd>& hidden,
                       const RowMatrix& output, WordId target,
                       std::span<const WordId> negatives) {
  double loss = NegLogSigmoid(output.row(target).dot(hidden));
  for (WordId neg : negatives) {
    if (neg == target) continue;
    loss += NegLogSigmoid(-output.row(neg).dot(hidden));
  }
  return loss;
}

NegSamplingGradient NegSamplingGrad(const Eigen::Ref<const Eigen::VectorXd>& hidden,
                                    const RowMatrix& output, WordId target,
                                    std::span<const WordId> negatives) {
  NegSamplingGradient grad;
  grad.hidden = Eigen::VectorXd::Zero(hidden.size());

  const double pos_score = output.row(target).dot(hidden);
  grad.loss = NegLogSigmoid(pos_score);
  const double pos_coeff = Sigmoid(pos_score) - 1.0;
  grad.hidden += pos_coeff * output.row(target).transpose();
  AddToRow(grad.output_rows, target, pos_coeff * hidden);

  for (WordId neg : negatives) {
    if (neg == target) continue;
    const double score = output.row(neg).dot(hidden);
    grad.loss += NegLogSigmoid(-score);
    const double coeff = Sigmoid(score);
    grad.hidden += coeff * output.row(neg).transpose();
    AddToRow(grad.output_rows, neg, coeff * hidden);
  }
  return grad;
}

double CbowStep(CbowState& state, std::span<const WordId> context, WordId target,
                std::span<const WordId> negatives, double learning_rate) {
  if (context.empty()) throw Error("cbow: empty context");
  Eigen::VectorXd hidden = Eigen::VectorXd::Zero(state.input.cols());
  for (WordId id : context) hidden += state.input.row(id).transpose();
  hidden /= static_cast<double>(context.size());

  const NegSamplingGradient grad = NegSamplingGrad(hidden, state.output, target, negatives);
  for (const auto& [id, g] : grad.output_rows) {
    state.output.row(id) -= learning_rate * g.transpose();
  }
  const double share = learning_rate / static_cast<double>(context.size());
  for (WordId id : context) state.input.row(id) -= share * grad.hidden.transpose();
  return grad.loss;
}

EmbeddingModel TrainCbow(std::span<const TokenList> documents,
                         const PretrainConfig& config) {
  config.Validate();
  if (documents.empty()) throw Error("pretrain: empty corpus");
  Vocabulary vocab = BuildVocab(documents, config.min_count);

  std::vector<std::vector<WordId>> encoded;
  std::size_t positions = 0;
  for (const auto& doc : documents) {
    auto ids = vocab.Encode(doc);
    if (ids.size() >= 2) {
      positions += ids.size();
      encoded.push_back(std::move(ids));
    }
  }
  if (positions == 0) throw Error("pretrain: corpus has no training windows");

  const auto num_words = static_cast<Eigen::Index>(vocab.size());
  const auto dim = static_cast<Eigen::Index>(config.hidden_size);
  Rng rng = MakeRng(config.seed, Stream::kPretrain);

  CbowState state;
  state.input.resize(num_words, dim);
  for (Eigen::Index i = 0; i < state.input.size(); ++i) {
    state.input.data()[i] = (UniformUnit(rng) - 0.5) / static_cast<double>(dim);
  }
  state.output = RowMatrix::Zero(num_words, dim);

  const UnigramSampler sampler(vocab.counts());
  const double total_updates = static_cast<double>(positions * config.epochs);
  const auto radius = config.context_radius;
  std::vector<WordId> context;
  std::vector<WordId> negatives(config.negatives);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& doc : encoded) {
      for (std::size_t pos = 0; pos < doc.size(); ++pos) {
        const double progress = static_cast<double>(step++) / total_updates;
        const double lr = config.learning_rate * (1.0 - 0.99 * progress);
        context.clear();
        const std::size_t begin = pos >= radius ? pos - radius : 0;
        const std::size_t end = std::min(doc.size(), pos + radius + 1);
        for (std::size_t j = begin; j < end; ++j) {
          if (j != pos) context.push_back(doc[j]);
        }
        for (auto& neg : negatives) neg = sampler.Sample(rng);
        CbowStep(state, context, doc[pos], negatives, lr);
      }
    }
  }
  return EmbeddingModel(std::move(vocab), std::move(state.input));
}

EmbeddingModel ImportPretrained(const std::filesystem::path& path) {
  return LoadText(path);
}

}  // namespace groundvec
