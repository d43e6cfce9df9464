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

#ifndef GROUNDVEC_PRETRAIN_H_
#define GROUNDVEC_PRETRAIN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "groundvec/corpus.h"
#include "groundvec/embedding.h"
#include "groundvec/random.h"

namespace groundvec {

struct PretrainConfig {
  std::size_t hidden_size = 100;
  std::size_t context_radius = 5;
  std::size_t negatives = 5;
  double learning_rate = 0.05;
  std::size_t epochs = 5;
  std::uint64_t min_count = 1;
  std::uint64_t seed = 1;

  // Throws if any integer is zero or the learning rate is not positive.
  void Validate() const;
};

// Draws word ids with probability proportional to count^0.75.
class UnigramSampler {
 public:
  explicit UnigramSampler(std::span<const std::uint64_t> counts,
                          double power = 0.75);

  WordId Sample(Rng& rng) const;
  double Probability(WordId id) const;
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;  // normalized, last entry == 1
};

// Loss and gradient of the negative-sampling objective for one prediction:
//   -log s(h.o_target) - sum_n log s(-h.o_n)
// where h is the averaged context vector and o_w are output rows.
struct NegSamplingGradient {
  double loss = 0.0;
  Eigen::VectorXd hidden;  // dL/dh
  // dL/do_w for each distinct output row touched, in first-touch order.
  std::vector<std::pair<WordId, Eigen::VectorXd>> output_rows;
};

double NegSamplingLoss(const Eigen::Ref<const Eigen::VectorXd>& hidden,
                       const RowMatrix& output, WordId target,
                       std::span<const WordId> negatives);

NegSamplingGradient NegSamplingGrad(const Eigen::Ref<const Eigen::VectorXd>& hidden,
                                    const RowMatrix& output, WordId target,
                                    std::span<const WordId> negatives);

struct CbowState {
  RowMatrix input;   // N_V x N_H, becomes W_I
  RowMatrix output;  // N_V x N_H, discarded after training
};

// One SGD update on (context -> target). Negatives equal to the target are
// skipped. Returns the loss before the update.
double CbowStep(CbowState& state, std::span<const WordId> context, WordId target,
                std::span<const WordId> negatives, double learning_rate);

// CBOW with negative sampling over documents (context never crosses a
// document boundary). Learning rate decays linearly from learning_rate to
// learning_rate / 100 across all updates. Returns W_I only.
EmbeddingModel TrainCbow(std::span<const TokenList> documents,
                         const PretrainConfig& config);

// Loads embeddings produced elsewhere (text interchange format).
EmbeddingModel ImportPretrained(const std::filesystem::path& path);

}  // namespace groundvec

#endif  // GROUNDVEC_PRETRAIN_H_
